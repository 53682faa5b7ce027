#include "dbfft/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <vector>

#include "dbfft/errors.hpp"

namespace dbfft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
  static const bool initialized = [] { return fftw_init_threads() != 0; }();
  (void)initialized;
}

}  // namespace

struct FftEngine::Plans {
  GridPtr grid;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  mutable std::vector<Complex> scratch;

  Plans(GridPtr g, int threads) : grid(std::move(g)), scratch(grid->spectral_count()) {
    const Grid& gr = *grid;
    // Row-major dims with axis 0 varying fastest.
    const int dims[3] = {static_cast<int>(gr.n(2)), static_cast<int>(gr.n(1)), static_cast<int>(gr.n(0))};
    std::vector<double> real(gr.voxel_count());
    std::vector<Complex> spec(gr.spectral_count());
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    std::lock_guard lock(planner_mutex());
    init_threads_once();
    fftw_plan_with_nthreads(std::max(threads, 1));
    // FFTW_ESTIMATE keeps the chosen algorithm, and so the rounding,
    // identical from run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c(3, dims, real.data(), cplx, flags);
    c2r = fftw_plan_dft_c2r(3, dims, cplx, real.data(), flags);
    if (!r2c || !c2r) throw Error("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

FftEngine::FftEngine(GridPtr grid, int threads) : plans_(std::make_unique<Plans>(std::move(grid), threads)) {}
FftEngine::~FftEngine() = default;
FftEngine::FftEngine(FftEngine&&) noexcept = default;
FftEngine& FftEngine::operator=(FftEngine&&) noexcept = default;

const GridPtr& FftEngine::grid_ptr() const noexcept { return plans_->grid; }

void FftEngine::forward(std::span<const double> in, std::span<Complex> out) const {
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  // The k0 = 0 plane holds both members of each conjugate pair. Make them
  // exact conjugates so that operators acting per frequency keep the
  // symmetry bit for bit, even when their output is pure cancellation.
  const Grid& g = *plans_->grid;
  const std::size_t h0 = g.half_n0(), n1 = g.n(1), n2 = g.n(2);
  for (std::size_t k2 = 0; k2 < n2; ++k2)
    for (std::size_t k1 = 0; k1 < n1; ++k1) {
      const std::size_t p = h0 * (k1 + n1 * k2);
      const std::size_t q = h0 * ((n1 - k1) % n1 + n1 * ((n2 - k2) % n2));
      if (q < p) continue;
      if (q == p) {
        out[p] = Complex(out[p].real(), 0.0);
        continue;
      }
      const Complex z = 0.5 * (out[p] + std::conj(out[q]));
      out[p] = z;
      out[q] = std::conj(z);
    }
}

void FftEngine::inverse(std::span<const Complex> in, std::span<double> out) const {
  // c2r overwrites its input.
  std::copy(in.begin(), in.end(), plans_->scratch.begin());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(plans_->scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(out.size());
  for (double& x : out) x *= scale;
}

SpectralField FftEngine::forward(const RealField& field) const {
  if (!(field.grid() == *plans_->grid)) throw ContractError("forward: field lives on another grid");
  SpectralField out(field.grid_ptr(), field.layout());
  for (int c = 0; c < field.components(); ++c) forward(field.comp(c), out.comp(c));
  return out;
}

RealField FftEngine::inverse(const SpectralField& field) const {
  if (!(field.grid() == *plans_->grid)) throw ContractError("inverse: field lives on another grid");
  const double residue = conjugate_symmetry_residue(field);
  if (residue > 1e-12)
    throw ConjugateSymmetryError("inverse: spectrum is not conjugate symmetric (relative residue " +
                                 std::to_string(residue) + ")");
  RealField out(field.grid_ptr(), field.layout());
  for (int c = 0; c < field.components(); ++c) inverse(field.comp(c), out.comp(c));
  return out;
}

double conjugate_symmetry_residue(const SpectralField& field) {
  const Grid& g = field.grid();
  double scale = 0.0;
  for (const Complex& z : field.data()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t n1 = g.n(1), n2 = g.n(2);
  for (int c = 0; c < field.components(); ++c)
    for (std::size_t k2 = 0; k2 < n2; ++k2)
      for (std::size_t k1 = 0; k1 < n1; ++k1) {
        const Complex a = field(c, field.index(0, k1, k2));
        const Complex b = field(c, field.index(0, (n1 - k1) % n1, (n2 - k2) % n2));
        worst = std::max(worst, std::abs(a - std::conj(b)));
      }
  return worst / scale;
}

}  // namespace dbfft
