#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dbfft/load.hpp"
#include "dbfft/materials.hpp"
#include "dbfft/microstructure.hpp"
#include "dbfft/nonlinear_driver.hpp"

namespace dbfft {

struct MicrostructureSource {
  /// homogeneous | sphere_inclusion | random_spheres | laminate; empty
  /// when the map is read from `file`.
  std::string generator;
  std::filesystem::path file;
  double volume_fraction = 0.2;
  int count = 5;
  double porosity = 0.2;
  std::uint64_t seed = 0;
  int axis = 0;
  std::size_t phase0_slabs = 1;
};

struct MaterialSpec {
  MaterialKind kind = MaterialKind::LinearElastic;
  double young = 70.0;
  double poisson = 0.3;
  double yield_stress = 0.1;
  double hardening = 70.0 / 20.0;
};

enum class VtkSelection { None, Last, All, List };

struct OutputOptions {
  std::filesystem::path directory = "output";
  VtkSelection vtk = VtkSelection::Last;
  std::vector<int> vtk_increments;  ///< with VtkSelection::List
  double magnification = 1.0;
  bool history = true;
  bool traces = true;
};

struct RunConfig {
  std::array<std::size_t, 3> n{};
  std::array<double, 3> l{1.0, 1.0, 1.0};
  MicrostructureSource microstructure;
  Kinematics kinematics = Kinematics::Small;
  std::vector<MaterialSpec> materials;
  std::optional<LoadSpec> load;
  NewtonOptions solver;
  int threads = 1;
  OutputOptions output;
  /// SHA-256 of the canonical JSON text of the configuration.
  std::string digest;
};

/// Parses and validates a JSON run configuration. Unknown keys and every
/// invariant violation raise ConfigError naming the offending key. Relative
/// paths are resolved against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

PhaseMap build_phase_map(const RunConfig& config);
MaterialTable build_material_table(const RunConfig& config);

/// Lowercase hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

}  // namespace dbfft
