#include "dbfft/residuals.hpp"

#include <cmath>

#include "dbfft/errors.hpp"
#include "dbfft/operators.hpp"

namespace dbfft {

namespace {

constexpr double kGuard = 1e-14;

ResidualValue guarded(double numerator, double denominator, double scale) {
  if (denominator == 0.0 || denominator < kGuard * scale) return {numerator, true};
  return {numerator / denominator, false};
}

double frobenius(const Mat3& a) { return a.norm(); }

}  // namespace

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const double w = frobenius_weight(f.layout(), c);
    for (double x : f.comp(c)) s += w * x * x;
  }
  return std::sqrt(s / static_cast<double>(f.points()));
}

ResidualValue equilibrium_residual(const FftEngine& fft, const RealField& stress) {
  if (stress.layout() == Layout::Vector) throw ContractError("equilibrium_residual expects a tensor field");
  const SpectralField d = div(fft.forward(stress));
  const double n = static_cast<double>(stress.points());
  // Parseval: sum_x |f|^2 = (1/N) sum_xi |f^|^2.
  const double numerator = std::sqrt(d.full_norm2() / (n * n));
  return guarded(numerator, frobenius(stress.mean_tensor()), stress.max_abs());
}

ResidualValue compatibility_residual(const FftEngine& fft, const RealField& strain) {
  if (strain.layout() == Layout::Vector) throw ContractError("compatibility_residual expects a tensor field");
  const RealField inc = fft.inverse(incompatibility(fft.forward(strain)));
  return guarded(inc.max_abs(), frobenius(strain.mean_tensor()), strain.max_abs());
}

ResidualValue finite_compatibility_residual(const FftEngine& fft, const RealField& deformation_gradient) {
  if (deformation_gradient.layout() != Layout::Tensor)
    throw ContractError("finite_compatibility_residual expects a full tensor field");
  const RealField c = fft.inverse(curl(fft.forward(deformation_gradient)));
  const Mat3 h = deformation_gradient.mean_tensor() - Mat3::Identity();
  double scale = 0.0;
  for (std::size_t v = 0; v < deformation_gradient.points(); ++v)
    scale = std::max(scale, (deformation_gradient.tensor_at(v) - Mat3::Identity()).cwiseAbs().maxCoeff());
  return guarded(c.max_abs(), frobenius(h), scale);
}

ResidualValue loading_residual(const Mat3& mean_strain, const Mat3& mean_stress, const MacroTarget& target) {
  const Mat3 target_gradient = target.strain_gradient();
  const Mat3 measured_gradient =
      target.kinematics == Kinematics::Finite ? Mat3(mean_strain - Mat3::Identity()) : mean_strain;
  double num2 = 0.0, den2 = 0.0, scale2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (target.stress_controlled[flat(i, j)]) {
        num2 += std::pow(mean_stress(i, j) - target.stress(i, j), 2);
        den2 += std::pow(target.stress(i, j), 2);
        scale2 += std::pow(mean_stress(i, j), 2);
      } else {
        num2 += std::pow(measured_gradient(i, j) - target_gradient(i, j), 2);
        den2 += std::pow(target_gradient(i, j), 2);
        scale2 += std::pow(measured_gradient(i, j), 2);
      }
    }
  return guarded(std::sqrt(num2), std::sqrt(den2), std::sqrt(scale2));
}

ResidualValue field_diff(const RealField& f, const RealField& g) {
  f.check_same_shape(g);
  RealField d = f;
  d -= g;
  const double den = l2_norm(g);
  const double num = l2_norm(d);
  if (den == 0.0) return {num, true};
  return {num / den, false};
}

bool meets(const ResidualTriple& r, double tol_equilibrium, double tol_compatibility, double tol_loading) {
  return r.equilibrium.value <= tol_equilibrium && r.compatibility.value <= tol_compatibility &&
         r.loading.value <= tol_loading;
}

}  // namespace dbfft
