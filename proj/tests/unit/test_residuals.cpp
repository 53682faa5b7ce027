#include <doctest.h>

#include <numbers>

#include "dbfft/errors.hpp"
#include "dbfft/operators.hpp"
#include "dbfft/residuals.hpp"
#include "test_util.hpp"

using namespace dbfft;
using testutil::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
  GridPtr g;
  FftEngine fft;
  explicit Setup(std::array<std::size_t, 3> n, std::array<double, 3> l = {1, 1, 1})
      : g(make_grid(n, l)), fft(g) {}
};

double wave(const Grid& g, std::size_t v, int axis) { return std::sin(2 * kPi * g.voxel_center(v)[axis] / g.l(axis)); }

MacroTarget strain_target(const Mat3& e) {
  MacroTarget t;
  t.strain = e;
  return t;
}

}  // namespace

TEST_CASE("l2 norm") {
  Setup s({3, 5, 3});
  RealField f(s.g, Layout::SymTensor);
  for (std::size_t v = 0; v < s.g->voxel_count(); ++v) f.set_tensor(v, Mat3::Constant(2.0));
  CHECK(l2_norm(f) == doctest::Approx(6.0).epsilon(1e-15));
  RealField u(s.g, Layout::Vector);
  u.fill(1.0);
  CHECK(l2_norm(u) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("equilibrium residual") {
  Setup s({9, 7, 5}, {1.5, 1.0, 1.0});
  SUBCASE("uniform stress is in equilibrium") {
    RealField sig(s.g, Layout::SymTensor);
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) sig.set_tensor(v, Mat3::Constant(3.0) + Mat3::Identity());
    const ResidualValue r = equilibrium_residual(s.fft, sig);
    CHECK_FALSE(r.absolute);
    CHECK(r.value <= 1e-14);
  }
  SUBCASE("single non-equilibrated mode with unit mean") {
    // sigma = e1 (x) e1 + sin(2 pi x1/L1) (e1 (x) e2 + e2 (x) e1):
    // div sigma = (0, q cos(q x1), 0), L2 norm q / sqrt(2); |<sigma>| = 1.
    const double q = 2 * kPi / s.g->l(0);
    for (Layout layout : {Layout::SymTensor, Layout::Tensor}) {
      RealField sig(s.g, layout);
      for (std::size_t v = 0; v < s.g->voxel_count(); ++v) {
        Mat3 t = Mat3::Zero();
        t(0, 0) = 1.0;
        t(0, 1) = t(1, 0) = wave(*s.g, v, 0);
        sig.set_tensor(v, t);
      }
      const ResidualValue r = equilibrium_residual(s.fft, sig);
      CHECK_FALSE(r.absolute);
      CHECK(r.value == doctest::Approx(q / std::sqrt(2.0)).epsilon(1e-12));
    }
  }
  SUBCASE("scale invariance and purity") {
    RealField sig = random_field(s.g, Layout::SymTensor, 3);
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) sig(0, v) += 2.0;
    const ResidualValue r = equilibrium_residual(s.fft, sig);
    for (double a : {1e-6, 0.5, 7.0, 1e8}) {
      RealField scaled = sig;
      scaled *= a;
      CHECK(equilibrium_residual(s.fft, scaled).value == doctest::Approx(r.value).epsilon(1e-12));
    }
    CHECK(equilibrium_residual(s.fft, sig).value == r.value);
  }
  SUBCASE("zero mean stress switches to absolute mode") {
    RealField sig(s.g, Layout::Tensor);
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) sig(flat(1, 0), v) = wave(*s.g, v, 0);
    const ResidualValue r = equilibrium_residual(s.fft, sig);
    CHECK(r.absolute);
    CHECK(std::isfinite(r.value));
    CHECK(r.value == doctest::Approx(2 * kPi / s.g->l(0) / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("vector fields are rejected") {
    CHECK_THROWS_AS(equilibrium_residual(s.fft, RealField(s.g, Layout::Vector)), ContractError);
  }
}

TEST_CASE("compatibility residual") {
  Setup s({7, 9, 5}, {1.0, 1.3, 0.9});
  SUBCASE("symmetric gradients are compatible (100 random displacements)") {
    // The incompatibility takes two more derivatives of the strain, so its
    // roundoff floor is measured against |xi|_max^2 max|eps|.
    double xi2 = 0.0;
    for_each_frequency(*s.g, [&](std::size_t, const Vec3& xi) { xi2 = std::max(xi2, xi.squaredNorm()); });
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const RealField u = random_field(s.g, Layout::Vector, 1000 + t);
      RealField eps = s.fft.inverse(sym_grad(s.fft.forward(u)));
      const double fluct = eps.max_abs();
      const Mat3 mean = sym(testutil::random_matrix(rng));
      for (std::size_t v = 0; v < s.g->voxel_count(); ++v) eps.set_tensor(v, eps.tensor_at(v) + mean);
      const ResidualValue r = compatibility_residual(s.fft, eps);
      CHECK_FALSE(r.absolute);
      worst = std::max(worst, r.value * mean.norm() / (xi2 * fluct));
    }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("single incompatible mode eps_11 = sin(2 pi x2/L2)") {
    // Only eta_33 = d2 d2 eps_11 survives: -q^2 sin(q x2).
    const double q = 2 * kPi / s.g->l(1);
    RealField eps(s.g, Layout::SymTensor);
    double peak = 0.0;
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) {
      eps(0, v) = wave(*s.g, v, 1);
      peak = std::max(peak, q * q * std::abs(wave(*s.g, v, 1)));
    }
    const ResidualValue zero_mean = compatibility_residual(s.fft, eps);
    CHECK(zero_mean.absolute);
    CHECK(zero_mean.value == doctest::Approx(peak).epsilon(1e-12));
    // With a unit mean strain on another component the value is unchanged but relative.
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) eps(1, v) += 1.0;
    const ResidualValue unit_mean = compatibility_residual(s.fft, eps);
    CHECK_FALSE(unit_mean.absolute);
    CHECK(unit_mean.value == doctest::Approx(peak).epsilon(1e-12));
  }
  SUBCASE("finite strain: F = I + H + grad u is curl free") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
      const RealField u = random_field(s.g, Layout::Vector, 2000 + t);
      RealField f = s.fft.inverse(grad(s.fft.forward(u)));
      const Mat3 h = testutil::random_matrix(rng, 0.1);
      for (std::size_t v = 0; v < s.g->voxel_count(); ++v)
        f.set_tensor(v, f.tensor_at(v) + Mat3::Identity() + h);
      const ResidualValue r = finite_compatibility_residual(s.fft, f);
      CHECK_FALSE(r.absolute);
      CHECK(r.value * h.norm() <= 1e-12 * u.max_abs());
    }
  }
  SUBCASE("finite strain: identity gives absolute mode with zero value") {
    RealField f(s.g, Layout::Tensor);
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) f.set_tensor(v, Mat3::Identity());
    const ResidualValue r = finite_compatibility_residual(s.fft, f);
    CHECK(r.absolute);
    CHECK(r.value <= 1e-14);
    CHECK_THROWS_AS(finite_compatibility_residual(s.fft, RealField(s.g, Layout::SymTensor)), ContractError);
  }
}

TEST_CASE("loading residual") {
  Mat3 e = Mat3::Zero();
  e(0, 0) = 1e-3;
  e(1, 2) = e(2, 1) = -4e-4;
  const MacroTarget t = strain_target(e);
  SUBCASE("exact match") { CHECK(loading_residual(e, Mat3::Zero(), t).value == 0.0); }
  SUBCASE("1% overshoot") {
    const ResidualValue r = loading_residual(1.01 * e, Mat3::Random(), t);
    CHECK_FALSE(r.absolute);
    CHECK(r.value == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("pure stress control compares stresses") {
    MacroTarget st;
    st.stress_controlled.fill(true);
    st.stress(0, 0) = 2.0;
    CHECK(loading_residual(Mat3::Random(), st.stress, st).value == 0.0);
    Mat3 s = st.stress;
    s(1, 1) = 0.02;
    CHECK(loading_residual(Mat3::Zero(), s, st).value == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("mixed control: root-sum-square over both targets") {
    MacroTarget m;
    m.stress_controlled.fill(true);
    m.stress_controlled[flat(0, 0)] = false;
    m.strain(0, 0) = 3.0;  // |strain target| = 3
    m.stress(1, 1) = 4.0;  // |stress target| = 4
    Mat3 strain = Mat3::Zero(), stress = Mat3::Zero();
    strain(0, 0) = 3.0 + 0.3;
    stress(1, 1) = 4.0 - 0.4;
    stress(0, 0) = 100.0;  // ignored: strain controlled
    strain(1, 1) = -7.0;   // ignored: stress controlled
    CHECK(loading_residual(strain, stress, m).value == doctest::Approx(0.5 / 5.0).epsilon(1e-12));
  }
  SUBCASE("finite strain compares F - I") {
    MacroTarget f;
    f.kinematics = Kinematics::Finite;
    f.strain = Mat3::Identity();
    f.strain(0, 0) = 1.2;
    Mat3 measured = f.strain;
    measured(0, 0) = 1.202;
    CHECK(loading_residual(measured, Mat3::Zero(), f).value == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("all-zero target uses absolute mode") {
    Mat3 m = Mat3::Zero();
    m(0, 1) = 1e-3;
    const ResidualValue r = loading_residual(m, Mat3::Zero(), strain_target(Mat3::Zero()));
    CHECK(r.absolute);
    CHECK(r.value == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(loading_residual(Mat3::Zero(), Mat3::Zero(), strain_target(Mat3::Zero())).value == 0.0);
  }
}

TEST_CASE("field difference") {
  Setup s({5, 5, 7});
  RealField g(s.g, Layout::Vector);
  for (std::size_t v = 0; v < s.g->voxel_count(); ++v) g(0, v) = 10.0;  // ||g|| = 10
  SUBCASE("identical fields") { CHECK(field_diff(g, g).value == 0.0); }
  SUBCASE("doubled field") {
    RealField f = g;
    f *= 2.0;
    CHECK(field_diff(f, g).value == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("single unit mode added") {
    // L2 norm of a unit sine mode is 1/sqrt(2).
    RealField f = g;
    for (std::size_t v = 0; v < s.g->voxel_count(); ++v) f(2, v) += wave(*s.g, v, 1);
    CHECK(field_diff(f, g).value == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-13));
  }
  SUBCASE("zero reference") {
    const ResidualValue r = field_diff(g, RealField(s.g, Layout::Vector));
    CHECK(r.absolute);
    CHECK(r.value == doctest::Approx(10.0));
  }
  SUBCASE("shape mismatch") { CHECK_THROWS_AS(field_diff(g, RealField(s.g, Layout::Tensor)), ContractError); }
}

TEST_CASE("meets") {
  ResidualTriple r;
  r.equilibrium.value = 1e-9;
  r.compatibility.value = 1e-11;
  r.loading.value = 1e-11;
  CHECK(meets(r, 1e-8, 1e-10, 1e-10));
  r.loading.value = 2e-10;
  CHECK_FALSE(meets(r, 1e-8, 1e-10, 1e-10));
}
