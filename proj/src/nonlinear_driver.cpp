#include "dbfft/nonlinear_driver.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <random>

#include "dbfft/errors.hpp"

namespace dbfft {

namespace {

RealField constant_tensor_field(const GridPtr& grid, Layout layout, const Mat3& value) {
  RealField f(grid, layout);
  for (int c = 0; c < f.components(); ++c) {
    const auto [i, j] = tensor_index(layout, c);
    std::fill(f.comp(c).begin(), f.comp(c).end(), value(i, j));
  }
  return f;
}

SolutionVector random_vector(const LinearSystem& system, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SolutionVector x = system.zero();
  for (int c = 0; c < 3; ++c)
    for (double& v : x.fluctuation.comp(c)) v = normal(rng);
  x.fluctuation.remove_mean();
  for (int c : system.active_macro()) x.macro[c] = normal(rng);
  return x;
}

double symmetry_defect(const LinearSystem& system) {
  std::mt19937_64 rng(0x5eed);
  const SolutionVector x = random_vector(system, rng);
  const SolutionVector y = random_vector(system, rng);
  const SolutionVector ax = system.apply(x);
  const SolutionVector ay = system.apply(y);
  const double scale = system.norm(ax) * system.norm(y);
  if (scale == 0.0) return 0.0;
  return std::abs(system.dot(ax, y) - system.dot(x, ay)) / scale;
}

ResidualTriple field_residuals(const RveModel& model, const RealField& strain, const RealField& stress,
                               const MacroTarget& target) {
  ResidualTriple r;
  r.equilibrium = equilibrium_residual(*model.fft, stress);
  r.compatibility = model.kinematics() == Kinematics::Small ? compatibility_residual(*model.fft, strain)
                                                             : finite_compatibility_residual(*model.fft, strain);
  r.loading = loading_residual(strain.mean_tensor(), stress.mean_tensor(), target);
  return r;
}

Layout strain_layout(Kinematics k) { return k == Kinematics::Small ? Layout::SymTensor : Layout::Tensor; }

void merge(IncrementReport& into, IncrementReport&& part) {
  into.newton_iterations += part.newton_iterations;
  into.cg_iterations += part.cg_iterations;
  for (double v : part.newton_norms) into.newton_norms.push_back(v);
  for (auto& s : part.solves) into.solves.push_back(std::move(s));
  for (double v : part.symmetry_defects) into.symmetry_defects.push_back(v);
}

}  // namespace

RealField strain_measure(const RveModel& model, const RealField& fluctuation, const Mat3& macro_gradient) {
  const Kinematics kin = model.kinematics();
  const Mat3 base = kin == Kinematics::Small ? macro_gradient : Mat3(Mat3::Identity() + macro_gradient);
  RealField out = constant_tensor_field(model.grid(), strain_layout(kin), base);
  const SpectralField uhat = model.fft->forward(fluctuation);
  out += model.fft->inverse(kin == Kinematics::Small ? sym_grad(uhat) : grad(uhat));
  return out;
}

IncrementState initial_state(const RveModel& model, const LoadSpec& load) {
  if (load.kinematics() != model.kinematics())
    throw ContractError("load path kinematics do not match the material table");
  if (model.phase_ids.size() != model.grid()->voxel_count())
    throw ContractError("phase map size does not match the grid");
  IncrementState s{0,
                   RealField(model.grid(), Layout::Vector),
                   Mat3::Zero(),
                   StateField(model.grid()->voxel_count(), model.materials.state_size()),
                   load.target(0),
                   RealField(model.grid(), strain_layout(model.kinematics())),
                   RealField(model.grid(), strain_layout(model.kinematics()))};
  s.strain = strain_measure(model, s.fluctuation, s.macro_gradient);
  ConstitutiveResponse r = evaluate_materials(model.materials, model.phase_ids, s.strain, s.material_state);
  s.material_state.commit();
  s.stress = std::move(r.stress);
  return s;
}

NewtonStepResult newton_step(const RveModel& model, const RealField& strain, const ConstitutiveResponse& response,
                             const MacroTarget& target, const Preconditioner* preconditioner,
                             const NewtonOptions& options) {
  LinearSystem system(*model.fft, model.kinematics(), response.tangent, target.stress_controlled);
  const SolutionVector b = to_positive_form(residual_rhs(system, response.stress, target));
  LinearizedMonitor monitor(system, strain, response.stress, target);

  NewtonStepResult out{system.zero(), {}, -1.0};
  if (options.symmetry_monitor) out.symmetry_defect = symmetry_defect(system);
  out.report = pcg_solve(system, preconditioner, b, out.delta, std::cref(monitor), options.linear);
  return out;
}

IncrementReport run_increment(const RveModel& model, IncrementState& state, const MacroTarget& next,
                              const NewtonOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  IncrementReport report;
  report.increment = state.increment + 1;

  // Strain-controlled components jump to the new target; stress-controlled
  // ones start from the previous converged value.
  Mat3 g = state.macro_gradient;
  const Mat3 prescribed = next.strain_gradient();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!next.stress_controlled[flat(i, j)]) g(i, j) = prescribed(i, j);
  RealField u = state.fluctuation;
  StateField work = state.material_state;
  work.rollback();

  const Layout layout = strain_layout(model.kinematics());
  std::optional<Preconditioner> precond;
  bool converged = false;
  try {
    double previous = 0.0;
    for (int it = 1; it <= options.max_newton; ++it) {
      const RealField strain = strain_measure(model, u, g);
      const ConstitutiveResponse response = evaluate_materials(model.materials, model.phase_ids, strain, work);
      if (options.preconditioner && (!precond || options.refresh_preconditioner))
        precond.emplace(*model.fft, layout, next.stress_controlled, average_tangent(response.tangent));

      NewtonStepResult step = newton_step(model, strain, response, next, precond ? &*precond : nullptr, options);
      report.newton_iterations = it;
      report.cg_iterations += step.report.iterations;
      if (step.symmetry_defect >= 0.0) report.symmetry_defects.push_back(step.symmetry_defect);
      const bool usable = step.report.usable();
      report.solves.push_back(std::move(step.report));
      if (!usable) {
        report.failure = "linear solve hit the iteration limit in Newton iteration " + std::to_string(it);
        break;
      }

      LinearSystem shape(*model.fft, model.kinematics(), response.tangent, next.stress_controlled);
      const double norm = shape.strain_of(step.delta).max_abs();
      u += step.delta.fluctuation;
      g += shape.macro_tensor(step.delta);
      report.newton_norms.push_back(norm);
      if (!std::isfinite(norm)) {
        report.failure = "non-finite Newton update";
        break;
      }
      if (norm < options.newton_tol) {
        converged = true;
        break;
      }
      if (it > 1 && norm > 10.0 * previous) {
        report.failure = "Newton iterations diverge";
        break;
      }
      previous = norm;
    }
    if (!converged && report.failure.empty()) report.failure = "Newton iteration limit reached";
  } catch (const InvertedElement& e) {
    report.failure = e.what();
  } catch (const NumericalBreakdown& e) {
    report.failure = e.what();
  } catch (const PreconditionerError& e) {
    report.failure = e.what();
  }

  if (converged) {
    RealField strain = strain_measure(model, u, g);
    try {
      ConstitutiveResponse response = evaluate_materials(model.materials, model.phase_ids, strain, work);
      work.commit();
      report.final_residuals = field_residuals(model, strain, response.stress, next);
      report.mean_strain = strain.mean_tensor();
      report.mean_stress = response.stress.mean_tensor();
      state.increment += 1;
      state.fluctuation = std::move(u);
      state.macro_gradient = g;
      state.material_state = std::move(work);
      state.target = next;
      state.strain = std::move(strain);
      state.stress = std::move(response.stress);
      report.converged = true;
    } catch (const InvertedElement& e) {
      report.failure = e.what();
      converged = false;
    }
  }

  if (!report.converged && options.bisection) {
    NewtonOptions inner = options;
    inner.bisection = false;
    IncrementState trial = state;
    const int base = state.increment;
    IncrementReport first = run_increment(model, trial, interpolate(state.target, next, 0.5), inner);
    report.bisected = true;
    merge(report, std::move(first));
    if (first.converged) {
      IncrementReport second = run_increment(model, trial, next, inner);
      merge(report, std::move(second));
      if (second.converged) {
        trial.increment = base + 1;
        state = std::move(trial);
        report.converged = true;
        report.final_residuals = second.final_residuals;
        report.mean_strain = second.mean_strain;
        report.mean_stress = second.mean_stress;
        report.failure.clear();
      } else {
        report.failure += "; second half increment failed: " + second.failure;
      }
    } else {
      report.failure += "; first half increment failed: " + first.failure;
    }
  }

  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

LoadPathResult run_load_path(const RveModel& model, const LoadSpec& load, const NewtonOptions& options,
                             const IncrementCallback& on_increment) {
  LoadPathResult out{{}, initial_state(model, load), false};
  const int total = load.total_increments();
  for (int k = 1; k <= total; ++k) {
    IncrementReport r = run_increment(model, out.final_state, load.target(k), options);
    r.increment = k;
    const bool ok = r.converged;
    out.history.push_back(std::move(r));
    if (on_increment) on_increment(out.history.back(), out.final_state);
    if (!ok) return out;
  }
  out.completed = true;
  return out;
}

}  // namespace dbfft
