#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dbfft/fft.hpp"
#include "dbfft/load.hpp"
#include "dbfft/materials.hpp"
#include "dbfft/operators.hpp"
#include "dbfft/residuals.hpp"

namespace dbfft {

/// Unknown of the equilibrium system: the zero-mean displacement
/// fluctuation plus the macroscopic strain (or displacement gradient)
/// entries of the stress-controlled components. `macro` is indexed by the
/// storage components of the strain layout and is zero on
/// strain-controlled components.
struct SolutionVector {
  RealField fluctuation;
  std::array<double, 9> macro{};

  SolutionVector& operator+=(const SolutionVector& o);
  void axpy(double a, const SolutionVector& o);
  void scale(double a);
};

/// Matrix-free equilibrium operator for one stiffness (or tangent) field.
///
/// Two forms are exposed. apply_operator() is the equilibrium image
///   fluct:  div(K : (grad u + e))           (mean removed)
///   macro:  <K : (grad u + e)>_IJ
/// whose fluctuation block is negative definite. apply() negates the
/// fluctuation block, which makes the operator self-adjoint and positive
/// definite for dot() below; it is the form handed to conjugate gradients.
class LinearSystem {
 public:
  LinearSystem(const FftEngine& fft, Kinematics kinematics, StiffnessField tangent, ComponentMask stress_controlled);

  const FftEngine& fft() const noexcept { return *fft_; }
  const Grid& grid() const noexcept { return *fft_->grid_ptr(); }
  Kinematics kinematics() const noexcept { return kinematics_; }
  /// SymTensor at small strain, Tensor at finite strain.
  Layout strain_layout() const noexcept { return strain_layout_; }
  const StiffnessField& tangent() const noexcept { return tangent_; }
  const ComponentMask& stress_controlled() const noexcept { return mask_; }
  /// Storage components of the strain layout that are stress controlled.
  const std::vector<int>& active_macro() const noexcept { return active_; }

  SolutionVector zero() const;
  SolutionVector apply(const SolutionVector& x) const;
  SolutionVector apply_operator(const SolutionVector& x) const;

  /// grad u (sym_grad at small strain) plus the macro entries, in real space.
  RealField strain_of(const SolutionVector& x) const;

  /// Inner product making apply() self-adjoint: voxel mean of u.v plus the
  /// Frobenius product of the macro blocks.
  double dot(const SolutionVector& x, const SolutionVector& y) const;
  double norm(const SolutionVector& x) const { return std::sqrt(dot(x, x)); }

  /// Macro block as a full tensor.
  Mat3 macro_tensor(const SolutionVector& x) const;

 private:
  const FftEngine* fft_;
  Kinematics kinematics_;
  Layout strain_layout_;
  StiffnessField tangent_;
  ComponentMask mask_;
  std::vector<int> active_;
};

/// Right-hand side of the equilibrium image equation for a current stress
/// field s:  fluct = -div(s),  macro = [target stress - <s>]_IJ.
SolutionVector residual_rhs(const LinearSystem& system, const RealField& stress, const MacroTarget& target);

/// Right-hand side for linear elasticity under `target`:
///   fluct = -div(C : eps_U),  macro = [sigma_f - <C : eps_U>]_IJ.
SolutionVector build_rhs(const LinearSystem& system, const MacroTarget& target);

/// Negates the fluctuation block; maps image-form vectors to the
/// positive definite form used by apply().
SolutionVector to_positive_form(SolutionVector v);

/// Fourier-space block-diagonal preconditioner built from a mean stiffness:
/// M(xi) = [xi . C . xi]^-1 for xi != 0, M(0) = [1 . C . 1]^-1 with 1 the
/// vector of ones, and the inverse of the stress-controlled block of C on
/// the macro entries.
class Preconditioner {
 public:
  Preconditioner(const FftEngine& fft, Layout strain_layout, const ComponentMask& stress_controlled,
                 const Tensor4& mean_stiffness);
  Preconditioner(const LinearSystem& system, const Tensor4& mean_stiffness)
      : Preconditioner(system.fft(), system.strain_layout(), system.stress_controlled(), mean_stiffness) {}

  SolutionVector apply(const SolutionVector& r) const;
  /// Per-frequency block at half-spectrum entry p.
  Mat3 block(std::size_t p) const;
  const Tensor4& mean_stiffness() const noexcept { return mean_; }

 private:
  const FftEngine* fft_;
  std::vector<int> active_;
  Tensor4 mean_;
  std::vector<double> blocks_;  // 9 per spectral entry, row-major
  Eigen::MatrixXd macro_inverse_;
};

/// Acoustic tensor xi . C . xi, entry (i, k) = C_ijkl xi_j xi_l.
Mat3 acoustic_tensor(const Tensor4& c, const Vec3& xi);

struct Tolerances {
  double equilibrium = 1e-8;
  double compatibility = 1e-10;
  double loading = 1e-10;
};

struct SolverOptions {
  Tolerances tol;
  int max_iter = 10000;
  /// Stop once the recursive algebraic residual falls below this fraction
  /// of the right-hand side.
  double stagnation = 1e-14;
};

enum class SolveStatus { Converged, Stagnated, MaxIterations };

struct IterationRecord {
  int iteration = 0;
  ResidualTriple residuals;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  ResidualTriple final_residuals;
  bool converged() const noexcept { return status == SolveStatus::Converged; }
  /// Converged, or stopped on a machine-precision algebraic residual.
  bool usable() const noexcept { return status != SolveStatus::MaxIterations; }
};

using ResidualMonitor = std::function<ResidualTriple(const SolutionVector&)>;

/// Preconditioned conjugate gradients on apply(x) = b, starting from x.
/// The monitor is evaluated on every iterate and the iteration stops when
/// all three residuals meet their tolerances. Passing no preconditioner
/// runs plain CG. Throws NumericalBreakdown on NaN or a non-positive
/// curvature p.Ap.
SolveReport pcg_solve(const LinearSystem& a, const Preconditioner* m, const SolutionVector& b, SolutionVector& x,
                      const ResidualMonitor& monitor, const SolverOptions& options);

/// Residual monitor of a linearized problem around (strain0, stress0):
/// for a correction x, strain = strain0 + strain_of(x) and
/// stress = stress0 + K : strain_of(x).
class LinearizedMonitor {
 public:
  LinearizedMonitor(const LinearSystem& system, RealField strain0, RealField stress0, MacroTarget target);
  ResidualTriple operator()(const SolutionVector& x) const;
  /// Residuals of explicit fields.
  ResidualTriple evaluate(const RealField& strain, const RealField& stress) const;

 private:
  const LinearSystem* system_;
  RealField strain0_;
  RealField stress0_;
  MacroTarget target_;
};

struct SmallStrainSolution {
  RealField fluctuation;  ///< u~
  RealField strain;       ///< eps = eps_U + eps_f + sym_grad u~
  RealField stress;       ///< sigma = C : eps
  Mat3 macro_strain;      ///< eps_U + eps_f
  Mat3 mean_strain;
  Mat3 mean_stress;
  SolveReport report;
};

struct SmallStrainOptions {
  SolverOptions solver;
  bool preconditioner = true;
};

/// Linear elastic homogenization at small strain under strain, stress or
/// mixed control.
SmallStrainSolution solve_small_strain(const FftEngine& fft, const StiffnessField& stiffness,
                                       const MacroTarget& target, const SmallStrainOptions& options = {});

}  // namespace dbfft
