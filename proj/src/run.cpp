#include "dbfft/run.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "dbfft/errors.hpp"
#include "dbfft/vtk.hpp"

namespace dbfft {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

namespace {

class Artifacts {
 public:
  Artifacts(const RunConfig& config, RunResult& result) : config_(config), result_(result) {
    std::filesystem::create_directories(config.output.directory);
    if (config.output.history) {
      const auto path = config.output.directory / "history.csv";
      history_.open(path);
      if (!history_) throw FormatError("cannot open " + path.string());
      result_.files.push_back(path);
      const bool small = config.kinematics == Kinematics::Small;
      history_ << "# config sha256 " << config.digest << '\n' << "increment";
      for (const char* what : {small ? "sigma" : "P", small ? "eps" : "F"})
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) history_ << ",mean_" << what << '_' << component_name(i, j);
      history_ << ",converged,newton_iterations,cg_iterations,equilibrium,compatibility,loading,wall_time\n";
    }
  }

  void history_row(int increment, const Mat3& stress, const Mat3& strain, bool converged, int newton, int cg,
                   const ResidualTriple& r, double wall) {
    if (!history_) return;
    history_ << increment;
    for (const Mat3* m : {&stress, &strain})
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) history_ << ',' << format_number((*m)(i, j));
    history_ << ',' << (converged ? 1 : 0) << ',' << newton << ',' << cg << ',' << format_number(r.equilibrium.value)
             << ',' << format_number(r.compatibility.value) << ',' << format_number(r.loading.value) << ','
             << format_number(wall) << '\n';
    history_.flush();
  }

  void trace(int increment, std::size_t solve, const SolveReport& report) {
    if (!config_.output.traces) return;
    char name[64];
    std::snprintf(name, sizeof name, "trace_%04d_%02zu.csv", increment, solve);
    const auto path = config_.output.directory / name;
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open " + path.string());
    os << "# config sha256 " << config_.digest << '\n' << "iteration,equilibrium,compatibility,loading\n";
    for (const auto& rec : report.trace)
      os << rec.iteration << ',' << format_number(rec.residuals.equilibrium.value) << ','
         << format_number(rec.residuals.compatibility.value) << ',' << format_number(rec.residuals.loading.value)
         << '\n';
    result_.files.push_back(path);
  }

  bool wants_vtk(int increment, bool last) const {
    switch (config_.output.vtk) {
      case VtkSelection::None: return false;
      case VtkSelection::Last: return last;
      case VtkSelection::All: return true;
      case VtkSelection::List:
        for (int k : config_.output.vtk_increments)
          if (k == increment) return true;
        return false;
    }
    return false;
  }

  void vtk(int increment, const RealField& fluctuation, const Mat3& macro_gradient, const RealField& strain,
           const RealField& stress) {
    char name[64];
    std::snprintf(name, sizeof name, "increment_%04d.vtk", increment);
    const auto path = config_.output.directory / name;
    const bool small = config_.kinematics == Kinematics::Small;
    const RealField u = total_displacement(fluctuation, macro_gradient, config_.output.magnification);
    export_vtk(path, "dbfft increment " + std::to_string(increment) + " config sha256 " + config_.digest, u,
               {{small ? "strain" : "deformation_gradient", &strain}, {"stress", &stress}});
    result_.files.push_back(path);
  }

 private:
  const RunConfig& config_;
  RunResult& result_;
  std::ofstream history_;
};

void log_increment(std::ostream& log, int k, bool converged, int newton, int cg, const ResidualTriple& r) {
  log << "increment " << k << (converged ? " converged" : " FAILED") << ": newton " << newton << ", cg " << cg
      << ", residuals " << format_number(r.equilibrium.value) << ' ' << format_number(r.compatibility.value) << ' '
      << format_number(r.loading.value) << '\n';
}

void run_linear(const RunConfig& config, const FftEngine& fft, const StiffnessField& stiffness, Artifacts& out,
                RunResult& result, std::ostream& log) {
  const LoadSpec& load = *config.load;
  const int total = load.total_increments();
  SmallStrainOptions options{config.solver.linear, config.solver.preconditioner};
  for (int k = 1; k <= total; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const SmallStrainSolution s = solve_small_strain(fft, stiffness, load.target(k), options);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = s.report.converged();
    out.trace(k, 1, s.report);
    out.history_row(k, s.mean_stress, s.mean_strain, ok, 0, s.report.iterations, s.report.final_residuals, wall);
    log_increment(log, k, ok, 0, s.report.iterations, s.report.final_residuals);
    if (out.wants_vtk(k, k == total || !ok)) out.vtk(k, s.fluctuation, s.macro_strain, s.strain, s.stress);
    if (!ok) {
      result.exit_code = kExitNotConverged;
      return;
    }
    result.increments_completed = k;
  }
}

void run_nonlinear(const RunConfig& config, const FftEngine& fft, const PhaseMap& map, Artifacts& out,
                   RunResult& result, std::ostream& log) {
  const LoadSpec& load = *config.load;
  const RveModel model{&fft, build_material_table(config), map.phase_id()};
  const int total = load.total_increments();
  const auto on_increment = [&](const IncrementReport& r, const IncrementState& state) {
    for (std::size_t s = 0; s < r.solves.size(); ++s) out.trace(r.increment, s + 1, r.solves[s]);
    out.history_row(r.increment, r.mean_stress, r.mean_strain, r.converged, r.newton_iterations, r.cg_iterations,
                    r.final_residuals, r.wall_time);
    log_increment(log, r.increment, r.converged, r.newton_iterations, r.cg_iterations, r.final_residuals);
    if (!r.converged) log << "  " << r.failure << '\n';
    if (r.bisected) log << "  (increment was bisected)\n";
    // On failure `state` still holds the last converged increment.
    if (out.wants_vtk(state.increment, r.increment == total || !r.converged) &&
        (r.converged || state.increment > 0))
      out.vtk(state.increment, state.fluctuation, state.macro_gradient, state.strain, state.stress);
  };
  const LoadPathResult path = run_load_path(model, load, config.solver, on_increment);
  result.increments_completed = path.final_state.increment;
  if (!path.completed) result.exit_code = kExitNotConverged;
}

}  // namespace

RunResult run(const RunConfig& config, std::ostream& log) {
  if (!config.load) throw ConfigError("config.load: missing");
  RunResult result;
  const PhaseMap map = build_phase_map(config);
  const FftEngine fft(map.grid_ptr(), config.threads);
  Artifacts out(config, result);
  log << "dbfft: grid " << map.grid().n(0) << 'x' << map.grid().n(1) << 'x' << map.grid().n(2) << ", "
      << map.phase_count() << " phase(s), config sha256 " << config.digest << '\n';

  const MaterialTable table = build_material_table(config);
  if (config.kinematics == Kinematics::Small && table.all_linear())
    run_linear(config, fft, table.linear_stiffness(map.grid_ptr(), map.phase_id()), out, result, log);
  else
    run_nonlinear(config, fft, map, out, result, log);
  return result;
}

}  // namespace dbfft
