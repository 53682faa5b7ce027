// Command line front end: run, gen, diff.
#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "dbfft/config.hpp"
#include "dbfft/errors.hpp"
#include "dbfft/microstructure.hpp"
#include "dbfft/residuals.hpp"
#include "dbfft/run.hpp"
#include "dbfft/vtk.hpp"

namespace {

using namespace dbfft;

std::map<std::string, std::string> parse_params(const std::vector<std::string>& args) {
  std::map<std::string, std::string> out;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + a + "'");
    out[a.substr(0, eq)] = a.substr(eq + 1);
  }
  return out;
}

class Params {
 public:
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  double number(const std::string& key, double fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + it->second + "'");
    }
  }

  std::array<double, 3> triple(const std::string& key, double fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return {fallback, fallback, fallback};
    used_.insert(key);
    std::vector<double> v;
    std::stringstream ss(it->second);
    std::string part;
    try {
      while (std::getline(ss, part, ',')) v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected one number or three comma-separated numbers");
    }
    if (v.size() == 1) return {v[0], v[0], v[0]};
    if (v.size() != 3) throw ConfigError(key + ": expected one number or three comma-separated numbers");
    return {v[0], v[1], v[2]};
  }

  void check_all_used() const {
    for (const auto& [k, _] : values_)
      if (!used_.contains(k)) throw ConfigError("unknown parameter '" + k + "'");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

std::size_t as_count(double v, const std::string& key) {
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

int cmd_gen(const std::string& generator, const std::vector<std::string>& args, const std::string& output) {
  Params p(parse_params(args));
  const auto nn = p.triple("n", 31);
  const auto l = p.triple("l", 1.0);
  const GridPtr grid =
      make_grid({as_count(nn[0], "n"), as_count(nn[1], "n"), as_count(nn[2], "n")}, l);
  std::optional<PhaseMap> map;
  if (generator == "homogeneous") {
    map = homogeneous(grid);
  } else if (generator == "sphere_inclusion") {
    map = sphere_inclusion(grid, p.number("vf", 0.2));
  } else if (generator == "random_spheres") {
    const double count = p.number("count", 5);
    const double porosity = p.number("porosity", 0.2);
    const double seed = p.number("seed", 0);
    map = random_spheres(grid, static_cast<int>(as_count(count, "count")), porosity, as_count(seed, "seed"));
  } else if (generator == "laminate") {
    const double axis = p.number("axis", 0);
    map = laminate(grid, static_cast<int>(as_count(axis, "axis")),
                   as_count(p.number("phase0_slabs", static_cast<double>(grid->n(0) / 2)), "phase0_slabs"));
  } else {
    throw ConfigError("unknown generator '" + generator +
                      "' (homogeneous, sphere_inclusion, random_spheres, laminate)");
  }
  p.check_all_used();
  save_phase_map(*map, output);
  std::cout << "wrote " << output << ": " << grid->n(0) << 'x' << grid->n(1) << 'x' << grid->n(2) << ", fractions";
  for (double f : map->volume_fractions()) std::cout << ' ' << format_number(f);
  std::cout << '\n';
  return kExitConverged;
}

int cmd_diff(const std::string& a, const std::string& b) {
  const VtkSnapshot fa = read_vtk(a);
  const VtkSnapshot fb = read_vtk(b);
  if (!(*fa.grid == *fb.grid)) throw FormatError("the two files use different grids");
  bool any = false;
  for (const auto& [name, f] : fa.fields) {
    const auto it = fb.fields.find(name);
    if (it == fb.fields.end() || it->second.layout() != f.layout()) {
      std::cout << name << " missing-in-second\n";
      continue;
    }
    const ResidualValue d = field_diff(f, it->second);
    std::cout << name << ' ' << format_number(d.value) << (d.absolute ? " (absolute)" : "") << '\n';
    any = true;
  }
  for (const auto& [name, _] : fb.fields)
    if (!fa.fields.contains(name)) std::cout << name << " missing-in-first\n";
  return any ? kExitConverged : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displacement-based FFT homogenization of periodic microstructures"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "solve a configured problem and write its artifacts");
  std::string config_path;
  run_cmd->add_option("config", config_path, "JSON run configuration")->required();

  auto* gen_cmd = app.add_subcommand("gen", "generate a microstructure file");
  std::string generator, output;
  std::vector<std::string> params;
  gen_cmd->add_option("generator", generator, "homogeneous | sphere_inclusion | random_spheres | laminate")
      ->required();
  gen_cmd->add_option("params", params, "key=value parameters (n, l, vf, count, porosity, seed, axis, phase0_slabs)");
  gen_cmd->add_option("-o,--output", output, "output file")->required();

  auto* diff_cmd = app.add_subcommand("diff", "relative L2 difference of the fields of two VTK files");
  std::string vtk_a, vtk_b;
  diff_cmd->add_option("a", vtk_a, "first file")->required();
  diff_cmd->add_option("b", vtk_b, "reference file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return run(parse_config(config_path), std::cout).exit_code;
    if (*gen_cmd) return cmd_gen(generator, params, output);
    if (*diff_cmd) return cmd_diff(vtk_a, vtk_b);
  } catch (const dbfft::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
