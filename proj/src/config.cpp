#include "dbfft/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dbfft/errors.hpp"

namespace dbfft {

using nlohmann::json;

namespace {

/// Softest phase relative to the stiffest one that the solver is tuned for.
constexpr double kMinimumContrast = 1e-5;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + "." + key + ": unknown key");
  }
}

template <class T>
T read(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing");
  return read<T>(obj, key, where, T{});
}

double positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive");
  return v;
}

std::pair<int, int> parse_component(const std::string& name, const std::string& where) {
  if (name.size() != 2 || name[0] < '1' || name[0] > '3' || name[1] < '1' || name[1] > '3')
    throw ConfigError(where + "." + name + ": component must be one of 11, 12, ..., 33");
  return {name[0] - '1', name[1] - '1'};
}

struct ComponentTable {
  std::array<std::optional<double>, 9> values;
};

/// Reads {"11": v, ...}. At small strain (i,j) and (j,i) name one
/// component and must agree when both are given.
ComponentTable read_components(const json& obj, const std::string& where, Kinematics kin) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object of components");
  ComponentTable t;
  for (const auto& [key, value] : obj.items()) {
    const auto [i, j] = parse_component(key, where);
    if (!value.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double v = value.get<double>();
    for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
      if (kin == Kinematics::Finite && (a != i || b != j)) continue;
      auto& slot = t.values[flat(a, b)];
      if (slot && *slot != v) throw ConfigError(where + "." + key + ": conflicts with its symmetric partner");
      slot = v;
    }
  }
  return t;
}

struct SegmentSpec {
  LoadSegment segment;
  ComponentMask mask{};
};

SegmentSpec read_segment(const json& obj, const std::string& where, Kinematics kin, bool allow_time) {
  if (allow_time)
    check_keys(obj, where, {"strain", "stress", "increments", "time_per_increment", "segments"});
  else
    check_keys(obj, where, {"strain", "stress", "increments"});
  const ComponentTable strain =
      obj.contains("strain") ? read_components(obj.at("strain"), where + ".strain", kin) : ComponentTable{};
  const ComponentTable stress =
      obj.contains("stress") ? read_components(obj.at("stress"), where + ".stress", kin) : ComponentTable{};
  SegmentSpec s;
  s.segment.strain = kin == Kinematics::Finite ? Mat3(Mat3::Identity()) : Mat3(Mat3::Zero());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int c = flat(i, j);
      if (strain.values[c] && stress.values[c])
        throw ConfigError(where + ".stress." + component_name(i, j) +
                          ": component is given both a strain and a stress target");
      if (strain.values[c]) s.segment.strain(i, j) = *strain.values[c];
      if (stress.values[c]) {
        s.segment.stress(i, j) = *stress.values[c];
        s.mask[c] = true;
      }
    }
  s.segment.increments = read<int>(obj, "increments", where, 1);
  if (s.segment.increments < 1) throw ConfigError(where + ".increments: must be at least 1");
  return s;
}

LoadSpec read_load(const json& obj, Kinematics kin) {
  const std::string where = "load";
  if (!obj.is_object()) throw ConfigError("load: expected an object");
  const double dt = positive(read<double>(obj, "time_per_increment", where, 1.0), "load.time_per_increment");
  std::vector<LoadSegment> segments;
  ComponentMask mask{};
  if (obj.contains("segments")) {
    check_keys(obj, where, {"segments", "time_per_increment"});
    const json& list = obj.at("segments");
    if (!list.is_array() || list.empty()) throw ConfigError("load.segments: expected a non-empty array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string w = "load.segments[" + std::to_string(k) + "]";
      SegmentSpec s = read_segment(list[k], w, kin, false);
      if (k == 0) mask = s.mask;
      else if (s.mask != mask)
        throw ConfigError(w + ".stress: every segment must control the same stress components");
      segments.push_back(s.segment);
    }
  } else {
    SegmentSpec s = read_segment(obj, where, kin, true);
    mask = s.mask;
    segments.push_back(s.segment);
  }
  try {
    return LoadSpec(kin, mask, std::move(segments), dt);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("load: ") + e.what());
  }
}

MicrostructureSource read_microstructure(const json& obj, const std::filesystem::path& base) {
  const std::string where = "microstructure";
  MicrostructureSource m;
  if (!obj.is_object()) throw ConfigError("microstructure: expected an object");
  if (obj.contains("file")) {
    check_keys(obj, where, {"file"});
    m.file = read<std::string>(obj, "file", where, "");
    if (m.file.is_relative()) m.file = base / m.file;
    return m;
  }
  m.generator = require<std::string>(obj, "generator", where);
  if (m.generator == "homogeneous") {
    check_keys(obj, where, {"generator"});
  } else if (m.generator == "sphere_inclusion") {
    check_keys(obj, where, {"generator", "volume_fraction"});
    m.volume_fraction = read<double>(obj, "volume_fraction", where, m.volume_fraction);
  } else if (m.generator == "random_spheres") {
    check_keys(obj, where, {"generator", "count", "porosity", "seed"});
    m.count = read<int>(obj, "count", where, m.count);
    m.porosity = read<double>(obj, "porosity", where, m.porosity);
    m.seed = read<std::uint64_t>(obj, "seed", where, m.seed);
  } else if (m.generator == "laminate") {
    check_keys(obj, where, {"generator", "axis", "phase0_slabs"});
    m.axis = read<int>(obj, "axis", where, m.axis);
    m.phase0_slabs = require<std::size_t>(obj, "phase0_slabs", where);
  } else {
    throw ConfigError("microstructure.generator: unknown generator '" + m.generator + "'");
  }
  return m;
}

MaterialSpec read_material(const json& obj, const std::string& where, Kinematics kin) {
  MaterialSpec s;
  const auto kind = require<std::string>(obj, "kind", where);
  if (kind == "linear_elastic") {
    check_keys(obj, where, {"phase", "kind", "young", "poisson"});
    s.kind = MaterialKind::LinearElastic;
  } else if (kind == "svk_hyperelastic") {
    check_keys(obj, where, {"phase", "kind", "young", "poisson"});
    s.kind = MaterialKind::SvkHyperelastic;
  } else if (kind == "j2_plastic") {
    check_keys(obj, where, {"phase", "kind", "young", "poisson", "yield_stress", "hardening"});
    s.kind = MaterialKind::J2Plastic;
  } else {
    throw ConfigError(where + ".kind: unknown material kind '" + kind + "'");
  }
  s.young = read<double>(obj, "young", where, s.young);
  s.poisson = read<double>(obj, "poisson", where, s.poisson);
  s.yield_stress = read<double>(obj, "yield_stress", where, s.yield_stress);
  s.hardening = read<double>(obj, "hardening", where, s.young / 20.0);
  try {
    lame_from_young(s.young, s.poisson);
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (s.kind == MaterialKind::J2Plastic) {
    positive(s.yield_stress, where + ".yield_stress");
    if (!(s.hardening >= 0.0)) throw ConfigError(where + ".hardening: must be non-negative");
  }
  const bool finite = s.kind == MaterialKind::SvkHyperelastic;
  if (finite != (kin == Kinematics::Finite))
    throw ConfigError(where + ".kind: '" + kind + "' is not available with " +
                      (kin == Kinematics::Finite ? "finite" : "small") + " kinematics");
  return s;
}

std::array<std::size_t, 3> read_n(const json& grid) {
  const json& n = grid.at("n");
  std::array<std::size_t, 3> out{};
  try {
    if (n.is_number_integer()) {
      out.fill(n.get<std::size_t>());
    } else {
      const auto v = n.get<std::vector<std::size_t>>();
      if (v.size() != 3) throw ConfigError("grid.n: expected 3 entries");
      std::copy(v.begin(), v.end(), out.begin());
    }
  } catch (const json::exception&) {
    throw ConfigError("grid.n: expected a positive integer or 3 integers");
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config", {"grid", "microstructure", "kinematics", "materials", "load", "solver", "output"});
  RunConfig c;
  c.digest = sha256_hex(root.dump());

  if (!root.contains("grid")) throw ConfigError("config.grid: missing");
  const json& grid = root.at("grid");
  check_keys(grid, "grid", {"n", "l"});
  if (!grid.contains("n")) throw ConfigError("grid.n: missing");
  c.n = read_n(grid);
  if (grid.contains("l")) {
    const json& l = grid.at("l");
    try {
      if (l.is_number()) {
        c.l.fill(l.get<double>());
      } else {
        const auto v = l.get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("grid.l: expected 3 entries");
        std::copy(v.begin(), v.end(), c.l.begin());
      }
    } catch (const json::exception&) {
      throw ConfigError("grid.l: expected a number or 3 numbers");
    }
  }
  try {
    Grid(c.n, c.l);
  } catch (const InvalidGrid& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  const auto kin = read<std::string>(root, "kinematics", "config", "small");
  if (kin == "small") c.kinematics = Kinematics::Small;
  else if (kin == "finite") c.kinematics = Kinematics::Finite;
  else throw ConfigError("config.kinematics: expected 'small' or 'finite'");

  if (!root.contains("microstructure")) throw ConfigError("config.microstructure: missing");
  c.microstructure = read_microstructure(root.at("microstructure"), base_dir);

  if (!root.contains("materials")) throw ConfigError("config.materials: missing");
  const json& mats = root.at("materials");
  if (!mats.is_array() || mats.empty()) throw ConfigError("materials: expected a non-empty array");
  std::vector<std::optional<MaterialSpec>> table(mats.size());
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const std::string where = "materials[" + std::to_string(k) + "]";
    if (!mats[k].is_object()) throw ConfigError(where + ": expected an object");
    const auto phase = read<std::size_t>(mats[k], "phase", where, k);
    if (phase >= mats.size())
      throw ConfigError(where + ".phase: phase ids must be 0.." + std::to_string(mats.size() - 1));
    if (table[phase]) throw ConfigError(where + ".phase: phase " + std::to_string(phase) + " defined twice");
    table[phase] = read_material(mats[k], where, c.kinematics);
  }
  for (auto& m : table) c.materials.push_back(*m);
  {
    double lo = c.materials.front().young, hi = lo;
    for (const auto& m : c.materials) {
      lo = std::min(lo, m.young);
      hi = std::max(hi, m.young);
    }
    if (lo < kMinimumContrast * hi * (1.0 - 1e-12))
      throw ConfigError("materials: stiffness contrast " + std::to_string(lo / hi) +
                        " is below the supported minimum of 1e-5");
  }

  if (!root.contains("load")) throw ConfigError("config.load: missing");
  c.load = read_load(root.at("load"), c.kinematics);

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    const std::string w = "solver";
    check_keys(s, w,
               {"equilibrium_tol", "compatibility_tol", "loading_tol", "newton_tol", "max_iter", "max_newton",
                "preconditioner", "refresh_preconditioner", "bisection", "symmetry_monitor", "threads"});
    auto& o = c.solver;
    o.linear.tol.equilibrium = positive(read(s, "equilibrium_tol", w, o.linear.tol.equilibrium), "solver.equilibrium_tol");
    o.linear.tol.compatibility =
        positive(read(s, "compatibility_tol", w, o.linear.tol.compatibility), "solver.compatibility_tol");
    o.linear.tol.loading = positive(read(s, "loading_tol", w, o.linear.tol.loading), "solver.loading_tol");
    o.newton_tol = positive(read(s, "newton_tol", w, o.newton_tol), "solver.newton_tol");
    o.linear.max_iter = read(s, "max_iter", w, o.linear.max_iter);
    if (o.linear.max_iter < 1) throw ConfigError("solver.max_iter: must be at least 1");
    o.max_newton = read(s, "max_newton", w, o.max_newton);
    if (o.max_newton < 1) throw ConfigError("solver.max_newton: must be at least 1");
    o.preconditioner = read(s, "preconditioner", w, o.preconditioner);
    o.refresh_preconditioner = read(s, "refresh_preconditioner", w, o.refresh_preconditioner);
    o.bisection = read(s, "bisection", w, o.bisection);
    o.symmetry_monitor = read(s, "symmetry_monitor", w, o.symmetry_monitor);
    c.threads = read(s, "threads", w, c.threads);
    if (c.threads < 1) throw ConfigError("solver.threads: must be at least 1");
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    const std::string w = "output";
    check_keys(o, w, {"directory", "vtk", "magnification", "history", "traces"});
    c.output.directory = read<std::string>(o, "directory", w, c.output.directory.string());
    c.output.magnification = read(o, "magnification", w, c.output.magnification);
    c.output.history = read(o, "history", w, c.output.history);
    c.output.traces = read(o, "traces", w, c.output.traces);
    if (o.contains("vtk")) {
      const json& v = o.at("vtk");
      if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "none") c.output.vtk = VtkSelection::None;
        else if (s == "last") c.output.vtk = VtkSelection::Last;
        else if (s == "all") c.output.vtk = VtkSelection::All;
        else throw ConfigError("output.vtk: expected none, last, all or a list of increments");
      } else if (v.is_array()) {
        c.output.vtk = VtkSelection::List;
        try {
          c.output.vtk_increments = v.get<std::vector<int>>();
        } catch (const json::exception&) {
          throw ConfigError("output.vtk: expected a list of integers");
        }
      } else {
        throw ConfigError("output.vtk: expected none, last, all or a list of increments");
      }
    }
  }
  if (c.output.directory.is_relative()) c.output.directory = base_dir / c.output.directory;

  // Phase coverage is checked against the actual map.
  PhaseMap map = [&] {
    try {
      return build_phase_map(c);
    } catch (const GenerationError& e) {
      throw ConfigError(std::string("microstructure: ") + e.what());
    } catch (const FormatError& e) {
      throw ConfigError(std::string("microstructure.file: ") + e.what());
    }
  }();
  if (map.phase_count() > c.materials.size()) {
    const auto& ids = map.phase_id();
    const auto worst = *std::max_element(ids.begin(), ids.end());
    if (worst >= c.materials.size())
      throw ConfigError("materials: no material for phase " + std::to_string(worst) +
                        " used by the microstructure");
  }
  if (!c.microstructure.file.empty() && !(map.grid() == Grid(c.n, c.l)))
    throw ConfigError("microstructure.file: grid does not match config.grid");
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

PhaseMap build_phase_map(const RunConfig& c) {
  const GridPtr grid = make_grid(c.n, c.l);
  const auto& m = c.microstructure;
  if (!m.file.empty()) return load_phase_map(m.file);
  if (m.generator == "homogeneous") return homogeneous(grid);
  if (m.generator == "sphere_inclusion") return sphere_inclusion(grid, m.volume_fraction);
  if (m.generator == "random_spheres") return random_spheres(grid, m.count, m.porosity, m.seed);
  if (m.generator == "laminate") return laminate(grid, m.axis, m.phase0_slabs);
  throw ConfigError("microstructure.generator: unknown generator '" + m.generator + "'");
}

MaterialTable build_material_table(const RunConfig& c) {
  std::vector<std::shared_ptr<const MaterialModel>> phases;
  for (const auto& s : c.materials) {
    switch (s.kind) {
      case MaterialKind::LinearElastic: phases.push_back(std::make_shared<LinearElastic>(s.young, s.poisson)); break;
      case MaterialKind::SvkHyperelastic:
        phases.push_back(std::make_shared<SaintVenantKirchhoff>(s.young, s.poisson));
        break;
      case MaterialKind::J2Plastic:
        phases.push_back(std::make_shared<J2Plasticity>(J2Parameters{s.young, s.poisson, s.yield_stress, s.hardening}));
        break;
    }
  }
  return MaterialTable(std::move(phases));
}

}  // namespace dbfft
