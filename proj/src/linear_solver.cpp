#include "dbfft/linear_solver.hpp"

#include <cmath>

#include "dbfft/errors.hpp"

namespace dbfft {

SolutionVector& SolutionVector::operator+=(const SolutionVector& o) {
  fluctuation += o.fluctuation;
  for (int c = 0; c < 9; ++c) macro[c] += o.macro[c];
  return *this;
}

void SolutionVector::axpy(double a, const SolutionVector& o) {
  fluctuation.axpy(a, o.fluctuation);
  for (int c = 0; c < 9; ++c) macro[c] += a * o.macro[c];
}

void SolutionVector::scale(double a) {
  fluctuation *= a;
  for (double& m : macro) m *= a;
}

namespace {

/// Strain-controlled part of the target as a displacement gradient, zero
/// on the stress-controlled components.
Mat3 prescribed_gradient(const MacroTarget& target) {
  Mat3 g = target.strain_gradient();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (target.stress_controlled[flat(i, j)]) g(i, j) = 0.0;
  return g;
}

RealField constant_field(const GridPtr& grid, Layout layout, const Mat3& value) {
  RealField f(grid, layout);
  for (int c = 0; c < f.components(); ++c) {
    const auto [i, j] = tensor_index(layout, c);
    std::fill(f.comp(c).begin(), f.comp(c).end(), value(i, j));
  }
  return f;
}

}  // namespace

LinearSystem::LinearSystem(const FftEngine& fft, Kinematics kinematics, StiffnessField tangent,
                           ComponentMask stress_controlled)
    : fft_(&fft), kinematics_(kinematics),
      strain_layout_(kinematics == Kinematics::Small ? Layout::SymTensor : Layout::Tensor),
      tangent_(std::move(tangent)), mask_(stress_controlled) {
  if (!(tangent_.grid() == *fft.grid_ptr())) throw ContractError("LinearSystem: tangent lives on another grid");
  for (int c = 0; c < component_count(strain_layout_); ++c) {
    const auto [i, j] = tensor_index(strain_layout_, c);
    if (mask_[flat(i, j)]) active_.push_back(c);
  }
}

SolutionVector LinearSystem::zero() const { return {RealField(fft_->grid_ptr(), Layout::Vector), {}}; }

RealField LinearSystem::strain_of(const SolutionVector& x) const {
  const SpectralField u = fft_->forward(x.fluctuation);
  RealField d = fft_->inverse(kinematics_ == Kinematics::Small ? sym_grad(u) : grad(u));
  for (int c : active_)
    for (double& v : d.comp(c)) v += x.macro[c];
  return d;
}

SolutionVector LinearSystem::apply_operator(const SolutionVector& x) const {
  const RealField s = contract_stiffness(tangent_, strain_of(x));
  SolutionVector out{fft_->inverse(div(fft_->forward(s))), {}};
  out.fluctuation.remove_mean();
  for (int c : active_) out.macro[c] = s.mean(c);
  return out;
}

SolutionVector LinearSystem::apply(const SolutionVector& x) const {
  return to_positive_form(apply_operator(x));
}

double LinearSystem::dot(const SolutionVector& x, const SolutionVector& y) const {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto a = x.fluctuation.comp(c);
    const auto b = y.fluctuation.comp(c);
    for (std::size_t v = 0; v < a.size(); ++v) s += a[v] * b[v];
  }
  s /= static_cast<double>(x.fluctuation.points());
  for (int c : active_) s += frobenius_weight(strain_layout_, c) * x.macro[c] * y.macro[c];
  return s;
}

Mat3 LinearSystem::macro_tensor(const SolutionVector& x) const {
  Mat3 m = Mat3::Zero();
  for (int c : active_) {
    const auto [i, j] = tensor_index(strain_layout_, c);
    m(i, j) = x.macro[c];
    if (strain_layout_ == Layout::SymTensor) m(j, i) = x.macro[c];
  }
  return m;
}

SolutionVector to_positive_form(SolutionVector v) {
  v.fluctuation *= -1.0;
  return v;
}

SolutionVector residual_rhs(const LinearSystem& system, const RealField& stress, const MacroTarget& target) {
  if (stress.layout() != system.strain_layout()) throw ContractError("residual_rhs: stress layout mismatch");
  const FftEngine& fft = system.fft();
  SolutionVector out{fft.inverse(div(fft.forward(stress))), {}};
  out.fluctuation *= -1.0;
  out.fluctuation.remove_mean();
  for (int c : system.active_macro()) {
    const auto [i, j] = tensor_index(stress.layout(), c);
    out.macro[c] = target.stress(i, j) - stress.mean(c);
  }
  return out;
}

SolutionVector build_rhs(const LinearSystem& system, const MacroTarget& target) {
  const RealField eps_u = constant_field(system.fft().grid_ptr(), system.strain_layout(), prescribed_gradient(target));
  return residual_rhs(system, contract_stiffness(system.tangent(), eps_u), target);
}

Mat3 acoustic_tensor(const Tensor4& c, const Vec3& xi) {
  Mat3 a = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) a(i, k) += c(flat(i, j), flat(k, l)) * xi(j) * xi(l);
  return a;
}

namespace {

Mat3 invert_block(const Mat3& a) {
  Eigen::FullPivLU<Mat3> lu(a);
  if (!lu.isInvertible()) throw PreconditionerError("singular acoustic tensor");
  return lu.inverse();
}

}  // namespace

Preconditioner::Preconditioner(const FftEngine& fft, Layout layout, const ComponentMask& stress_controlled,
                               const Tensor4& mean_stiffness)
    : fft_(&fft), mean_(mean_stiffness) {
  for (int c = 0; c < component_count(layout); ++c) {
    const auto [i, j] = tensor_index(layout, c);
    if (stress_controlled[flat(i, j)]) active_.push_back(c);
  }
  const Grid& grid = *fft.grid_ptr();
  blocks_.resize(9 * grid.spectral_count());
  for_each_frequency(grid, [&](std::size_t p, const Vec3& xi) {
    const Mat3 m = invert_block(p == 0 ? acoustic_tensor(mean_, Vec3::Ones()) : acoustic_tensor(mean_, xi));
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) blocks_[9 * p + flat(i, k)] = m(i, k);
  });

  const auto& active = active_;
  const auto n = static_cast<Eigen::Index>(active.size());
  if (n > 0) {
    Eigen::MatrixXd block(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto [i, j] = tensor_index(layout, active[a]);
      for (Eigen::Index b = 0; b < n; ++b) {
        const auto [k, l] = tensor_index(layout, active[b]);
        // Stress (i,j) produced by a unit macro entry in slot b, which
        // populates (k,l) and, for symmetric storage, (l,k).
        double v = mean_(flat(i, j), flat(k, l));
        if (layout == Layout::SymTensor && k != l) v += mean_(flat(i, j), flat(l, k));
        if (layout == Layout::SymTensor && i != j) {
          double w = mean_(flat(j, i), flat(k, l));
          if (k != l) w += mean_(flat(j, i), flat(l, k));
          v = 0.5 * (v + w);
        }
        block(a, b) = v;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    if (!lu.isInvertible()) throw PreconditionerError("singular macroscopic stiffness block");
    macro_inverse_ = lu.inverse();
  }
}

Mat3 Preconditioner::block(std::size_t p) const {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = blocks_[9 * p + flat(i, k)];
  return m;
}

SolutionVector Preconditioner::apply(const SolutionVector& r) const {
  const FftEngine& fft = *fft_;
  SpectralField rhat = fft.forward(r.fluctuation);
  const std::size_t count = rhat.points();
  for (std::size_t p = 0; p < count; ++p) {
    const double* m = &blocks_[9 * p];
    const Complex a = rhat(0, p), b = rhat(1, p), c = rhat(2, p);
    rhat(0, p) = m[0] * a + m[1] * b + m[2] * c;
    rhat(1, p) = m[3] * a + m[4] * b + m[5] * c;
    rhat(2, p) = m[6] * a + m[7] * b + m[8] * c;
  }
  SolutionVector out{fft.inverse(rhat), {}};
  out.fluctuation.remove_mean();
  const auto& active = active_;
  for (std::size_t a = 0; a < active.size(); ++a) {
    double v = 0.0;
    for (std::size_t b = 0; b < active.size(); ++b)
      v += macro_inverse_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * r.macro[active[b]];
    out.macro[active[a]] = v;
  }
  return out;
}

namespace {

bool finite(const ResidualTriple& r) {
  return std::isfinite(r.equilibrium.value) && std::isfinite(r.compatibility.value) &&
         std::isfinite(r.loading.value);
}

}  // namespace

SolveReport pcg_solve(const LinearSystem& a, const Preconditioner* m, const SolutionVector& b, SolutionVector& x,
                      const ResidualMonitor& monitor, const SolverOptions& options) {
  SolveReport report;
  const auto done = [&](const ResidualTriple& r) {
    return meets(r, options.tol.equilibrium, options.tol.compatibility, options.tol.loading);
  };

  report.final_residuals = monitor(x);
  if (!finite(report.final_residuals)) throw NumericalBreakdown("non-finite residual at the initial iterate");
  if (done(report.final_residuals)) {
    report.status = SolveStatus::Converged;
    return report;
  }

  SolutionVector r = b;
  r.axpy(-1.0, a.apply(x));
  const double b_norm = a.norm(b);
  if (a.norm(r) == 0.0 || b_norm == 0.0) {
    report.status = SolveStatus::Stagnated;
    return report;
  }
  SolutionVector z = m ? m->apply(r) : r;
  SolutionVector p = z;
  double rz = a.dot(r, z);

  for (int it = 1; it <= options.max_iter; ++it) {
    const SolutionVector q = a.apply(p);
    const double curvature = a.dot(p, q);
    if (!std::isfinite(curvature)) throw NumericalBreakdown("non-finite value in conjugate gradient");
    if (curvature <= 0.0) throw NumericalBreakdown("operator is not positive definite along the search direction");
    const double alpha = rz / curvature;
    x.axpy(alpha, p);
    r.axpy(-alpha, q);

    report.iterations = it;
    report.final_residuals = monitor(x);
    report.trace.push_back({it, report.final_residuals});
    if (!finite(report.final_residuals)) throw NumericalBreakdown("non-finite residual in conjugate gradient");
    if (done(report.final_residuals)) {
      report.status = SolveStatus::Converged;
      return report;
    }
    if (a.norm(r) <= options.stagnation * b_norm) {
      report.status = SolveStatus::Stagnated;
      return report;
    }

    z = m ? m->apply(r) : r;
    const double rz_next = a.dot(r, z);
    p.scale(rz_next / rz);
    p += z;
    rz = rz_next;
  }
  report.status = SolveStatus::MaxIterations;
  return report;
}

LinearizedMonitor::LinearizedMonitor(const LinearSystem& system, RealField strain0, RealField stress0,
                                     MacroTarget target)
    : system_(&system), strain0_(std::move(strain0)), stress0_(std::move(stress0)), target_(std::move(target)) {}

ResidualTriple LinearizedMonitor::evaluate(const RealField& strain, const RealField& stress) const {
  const FftEngine& fft = system_->fft();
  ResidualTriple r;
  r.equilibrium = equilibrium_residual(fft, stress);
  r.compatibility = system_->kinematics() == Kinematics::Small ? compatibility_residual(fft, strain)
                                                                : finite_compatibility_residual(fft, strain);
  r.loading = loading_residual(strain.mean_tensor(), stress.mean_tensor(), target_);
  return r;
}

ResidualTriple LinearizedMonitor::operator()(const SolutionVector& x) const {
  const RealField d = system_->strain_of(x);
  RealField strain = strain0_;
  strain += d;
  RealField stress = stress0_;
  stress += contract_stiffness(system_->tangent(), d);
  return evaluate(strain, stress);
}

SmallStrainSolution solve_small_strain(const FftEngine& fft, const StiffnessField& stiffness,
                                       const MacroTarget& target, const SmallStrainOptions& options) {
  if (target.kinematics != Kinematics::Small) throw ContractError("solve_small_strain expects a small-strain target");
  LinearSystem system(fft, Kinematics::Small, stiffness, target.stress_controlled);
  const Mat3 eps_u = prescribed_gradient(target);
  RealField strain0 = constant_field(fft.grid_ptr(), Layout::SymTensor, eps_u);
  RealField stress0 = contract_stiffness(stiffness, strain0);
  const SolutionVector b = to_positive_form(residual_rhs(system, stress0, target));

  std::optional<Preconditioner> precond;
  if (options.preconditioner) precond.emplace(system, average_tangent(stiffness));

  LinearizedMonitor monitor(system, strain0, stress0, target);
  SolutionVector x = system.zero();
  SolveReport report =
      pcg_solve(system, precond ? &*precond : nullptr, b, x, std::cref(monitor), options.solver);

  const RealField d = system.strain_of(x);
  RealField strain = std::move(strain0);
  strain += d;
  RealField stress = std::move(stress0);
  stress += contract_stiffness(stiffness, d);
  SmallStrainSolution out{std::move(x.fluctuation), std::move(strain), std::move(stress),
                          eps_u + system.macro_tensor(x), Mat3::Zero(), Mat3::Zero(), std::move(report)};
  out.mean_strain = out.strain.mean_tensor();
  out.mean_stress = out.stress.mean_tensor();
  return out;
}

}  // namespace dbfft
