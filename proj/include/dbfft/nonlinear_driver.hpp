#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dbfft/linear_solver.hpp"

namespace dbfft {

/// Everything the incremental solver needs about the RVE.
struct RveModel {
  const FftEngine* fft;
  MaterialTable materials;
  std::vector<std::uint16_t> phase_ids;

  const GridPtr& grid() const { return fft->grid_ptr(); }
  Kinematics kinematics() const { return materials.kinematics(); }
};

struct NewtonOptions {
  SolverOptions linear;
  double newton_tol = 1e-6;
  int max_newton = 25;
  bool preconditioner = true;
  /// Rebuild the preconditioner from the current mean tangent at every
  /// Newton iteration instead of once per increment.
  bool refresh_preconditioner = false;
  /// Retry a failed increment once as two half increments.
  bool bisection = true;
  /// Evaluate <A x, y> - <x, A y> on random vectors at every Newton step.
  bool symmetry_monitor = true;
};

/// Converged state at the end of an increment.
struct IncrementState {
  int increment = 0;
  RealField fluctuation;   ///< u~^k
  Mat3 macro_gradient;     ///< eps_U + eps_f, or F_U + F_f - I
  StateField material_state;
  MacroTarget target;      ///< prescribed state at increment k
  RealField strain;        ///< eps or F
  RealField stress;        ///< sigma or P
};

/// Unloaded initial state (u~ = 0, zero macro gradient, zero internal
/// variables).
IncrementState initial_state(const RveModel& model, const LoadSpec& load);

/// Strain measure from a fluctuation and a macro gradient G:
/// eps = G + sym_grad u~ (small) or F = I + G + grad u~ (finite).
RealField strain_measure(const RveModel& model, const RealField& fluctuation, const Mat3& macro_gradient);

struct NewtonStepResult {
  SolutionVector delta;
  SolveReport report;
  /// |<A x, y> - <x, A y>| / (|A x| |y|) on random vectors, or -1 if off.
  double symmetry_defect = -1.0;
};

/// One linearized solve around the current iterate: strain, stress and
/// tangent evaluated at (fluctuation, macro_gradient). Returns the update
/// (delta u~, delta G on the stress-controlled components).
NewtonStepResult newton_step(const RveModel& model, const RealField& strain, const ConstitutiveResponse& response,
                             const MacroTarget& target, const Preconditioner* preconditioner,
                             const NewtonOptions& options);

struct IncrementReport {
  int increment = 0;
  bool converged = false;
  bool bisected = false;
  int newton_iterations = 0;
  int cg_iterations = 0;
  /// max |grad delta u~ + delta G| per Newton iteration.
  std::vector<double> newton_norms;
  std::vector<SolveReport> solves;
  std::vector<double> symmetry_defects;
  ResidualTriple final_residuals;
  std::string failure;
  double wall_time = 0.0;
  Mat3 mean_strain = Mat3::Zero();
  Mat3 mean_stress = Mat3::Zero();
};

/// Newton iterations from `state` to `next`. On success `state` is
/// replaced by the converged increment (material state committed); on
/// failure it is left untouched.
IncrementReport run_increment(const RveModel& model, IncrementState& state, const MacroTarget& next,
                              const NewtonOptions& options = {});

struct LoadPathResult {
  std::vector<IncrementReport> history;
  IncrementState final_state;
  bool completed = false;
};

using IncrementCallback = std::function<void(const IncrementReport&, const IncrementState&)>;

/// Runs every increment of the load path in order, stopping at the first
/// failure (the partial history is returned).
LoadPathResult run_load_path(const RveModel& model, const LoadSpec& load, const NewtonOptions& options = {},
                             const IncrementCallback& on_increment = {});

}  // namespace dbfft
