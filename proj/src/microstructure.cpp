#include "dbfft/microstructure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "dbfft/errors.hpp"

namespace dbfft {

PhaseMap::PhaseMap(GridPtr grid, std::vector<std::uint16_t> phase_id, std::size_t phase_count)
    : grid_(std::move(grid)), ids_(std::move(phase_id)), count_(phase_count) {
  if (!grid_) throw ContractError("PhaseMap: null grid");
  if (ids_.size() != grid_->voxel_count()) throw ContractError("PhaseMap: phase id count does not match the grid");
  if (count_ == 0) throw ContractError("PhaseMap: phase_count must be positive");
  std::vector<std::size_t> hits(count_, 0);
  for (std::size_t v = 0; v < ids_.size(); ++v) {
    if (ids_[v] >= count_)
      throw FormatError("phase id " + std::to_string(ids_[v]) + " at voxel " + std::to_string(v) +
                        " exceeds phase_count " + std::to_string(count_));
    ++hits[ids_[v]];
  }
  fractions_.resize(count_);
  for (std::size_t p = 0; p < count_; ++p)
    fractions_[p] = static_cast<double>(hits[p]) / static_cast<double>(ids_.size());
}

PhaseMap homogeneous(const GridPtr& grid) {
  return PhaseMap(grid, std::vector<std::uint16_t>(grid->voxel_count(), 0), 1);
}

namespace {

bool isotropic_spacing(const Grid& g) { return g.spacing(0) == g.spacing(1) && g.spacing(1) == g.spacing(2); }

/// Squared distance between voxels given per-axis integer offsets. Uses an
/// integer sum on isotropic grids so the result is exactly symmetric
/// under axis permutations.
double distance2(const Grid& g, const std::array<long, 3>& d) {
  if (isotropic_spacing(g)) {
    const double h = g.spacing(0);
    return h * h * static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  }
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double x = static_cast<double>(d[a]) * g.spacing(a);
    s += x * x;
  }
  return s;
}

long periodic_offset(long a, long b, long n) {
  long d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

double sphere_radius(const Grid& g, double fraction) {
  return std::cbrt(3.0 * fraction * g.volume() / (4.0 * std::numbers::pi));
}

}  // namespace

PhaseMap sphere_inclusion(const GridPtr& grid, double vf) {
  if (!(vf > 0.0 && vf < std::numbers::pi / 6.0))
    throw GenerationError("sphere_inclusion: volume fraction must lie in (0, pi/6), got " + std::to_string(vf));
  const Grid& g = *grid;
  const double r = sphere_radius(g, vf);
  std::array<long, 3> mid{};
  for (int a = 0; a < 3; ++a) mid[a] = static_cast<long>(g.n(a) - 1) / 2;
  std::vector<std::uint16_t> ids(g.voxel_count(), 0);
  for (std::size_t v = 0; v < ids.size(); ++v) {
    const auto c = g.voxel_coords(v);
    const std::array<long, 3> d{static_cast<long>(c[0]) - mid[0], static_cast<long>(c[1]) - mid[1],
                                static_cast<long>(c[2]) - mid[2]};
    if (distance2(g, d) <= r * r) ids[v] = 1;
  }
  return PhaseMap(grid, std::move(ids), 2);
}

SpherePacking place_random_spheres(const Grid& g, int count, double porosity, std::uint64_t seed) {
  if (count < 1) throw GenerationError("random_spheres: count must be positive");
  if (!(porosity > 0.0 && porosity < 1.0)) throw GenerationError("random_spheres: porosity must lie in (0, 1)");
  constexpr long kBudget = 1'000'000;
  SpherePacking out;
  out.radius = sphere_radius(g, porosity / count);
  const double min_d2 = 4.0 * out.radius * out.radius;

  std::mt19937_64 rng(seed);
  std::array<std::uniform_int_distribution<long>, 3> pick{
      std::uniform_int_distribution<long>(0, static_cast<long>(g.n(0)) - 1),
      std::uniform_int_distribution<long>(0, static_cast<long>(g.n(1)) - 1),
      std::uniform_int_distribution<long>(0, static_cast<long>(g.n(2)) - 1)};
  std::vector<std::array<long, 3>> placed;
  long attempts = 0;
  while (static_cast<int>(placed.size()) < count) {
    if (++attempts > kBudget)
      throw GenerationError("random_spheres: placed only " + std::to_string(placed.size()) + " of " +
                            std::to_string(count) + " spheres after " + std::to_string(kBudget) +
                            " attempts; use fewer or smaller spheres");
    const std::array<long, 3> c{pick[0](rng), pick[1](rng), pick[2](rng)};
    bool ok = true;
    for (const auto& q : placed) {
      std::array<long, 3> d{};
      for (int a = 0; a < 3; ++a) d[a] = periodic_offset(c[a], q[a], static_cast<long>(g.n(a)));
      if (distance2(g, d) < min_d2) {
        ok = false;
        break;
      }
    }
    if (ok) placed.push_back(c);
  }
  for (const auto& c : placed)
    out.centers.push_back(Vec3((static_cast<double>(c[0]) + 0.5) * g.spacing(0),
                               (static_cast<double>(c[1]) + 0.5) * g.spacing(1),
                               (static_cast<double>(c[2]) + 0.5) * g.spacing(2)));
  return out;
}

PhaseMap random_spheres(const GridPtr& grid, int count, double porosity, std::uint64_t seed) {
  const Grid& g = *grid;
  const SpherePacking packing = place_random_spheres(g, count, porosity, seed);
  const double r2 = packing.radius * packing.radius;
  std::vector<std::array<long, 3>> centers;
  for (const Vec3& c : packing.centers) {
    std::array<long, 3> k{};
    for (int a = 0; a < 3; ++a) k[a] = std::lround(c[a] / g.spacing(a) - 0.5);
    centers.push_back(k);
  }
  std::vector<std::uint16_t> ids(g.voxel_count(), 0);
  for (std::size_t v = 0; v < ids.size(); ++v) {
    const auto x = g.voxel_coords(v);
    for (const auto& c : centers) {
      std::array<long, 3> d{};
      for (int a = 0; a < 3; ++a) d[a] = periodic_offset(static_cast<long>(x[a]), c[a], static_cast<long>(g.n(a)));
      if (distance2(g, d) <= r2) {
        ids[v] = 1;
        break;
      }
    }
  }
  return PhaseMap(grid, std::move(ids), 2);
}

PhaseMap laminate(const GridPtr& grid, int axis, std::size_t phase0_slabs) {
  if (axis < 0 || axis > 2) throw GenerationError("laminate: axis must be 0, 1 or 2");
  const Grid& g = *grid;
  if (phase0_slabs == 0 || phase0_slabs >= g.n(axis))
    throw GenerationError("laminate: phase 0 must occupy between 1 and n-1 slabs");
  std::vector<std::uint16_t> ids(g.voxel_count(), 0);
  for (std::size_t v = 0; v < ids.size(); ++v) ids[v] = g.voxel_coords(v)[axis] < phase0_slabs ? 0 : 1;
  return PhaseMap(grid, std::move(ids), 2);
}

// ---------------------------------------------------------------------------
// DBFM files: "DBFM", u16 version, 3 x u32 n, 3 x f64 l, u16 phase_count,
// n0 n1 n2 x u16 ids (x fastest). All little endian.

namespace {

constexpr std::uint16_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
  } else {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get(std::istream& is, const char* what) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), sizeof(T))) throw FormatError(std::string("DBFM: truncated header (") + what + ")");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void save_phase_map(const PhaseMap& map, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write("DBFM", 4);
  put<std::uint16_t>(os, kVersion);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(map.grid().n(a)));
  for (int a = 0; a < 3; ++a) put<double>(os, map.grid().l(a));
  put<std::uint16_t>(os, static_cast<std::uint16_t>(map.phase_count()));
  for (std::uint16_t id : map.phase_id()) put<std::uint16_t>(os, id);
  if (!os) throw FormatError("write failed: " + path.string());
}

PhaseMap load_phase_map(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DBFM", 4) != 0) throw FormatError("DBFM: bad magic bytes");
  const auto version = get<std::uint16_t>(is, "version");
  if (version != kVersion) throw FormatError("DBFM: unsupported version " + std::to_string(version));
  std::array<std::size_t, 3> n{};
  std::array<double, 3> l{};
  for (int a = 0; a < 3; ++a) n[a] = get<std::uint32_t>(is, "n");
  for (int a = 0; a < 3; ++a) l[a] = get<double>(is, "l");
  const auto count = get<std::uint16_t>(is, "phase_count");
  GridPtr grid;
  try {
    grid = make_grid(n, l);
  } catch (const InvalidGrid& e) {
    throw FormatError(std::string("DBFM: invalid grid in header: ") + e.what());
  }

  const std::size_t voxels = grid->voxel_count();
  const auto start = is.tellg();
  is.seekg(0, std::ios::end);
  const auto payload = static_cast<std::size_t>(is.tellg() - start);
  is.seekg(start);
  if (payload != 2 * voxels)
    throw FormatError("DBFM: size mismatch, header declares " + std::to_string(voxels) + " voxels but payload has " +
                      std::to_string(payload) + " bytes");
  std::vector<std::uint16_t> ids(voxels);
  for (auto& id : ids) id = get<std::uint16_t>(is, "ids");
  return PhaseMap(grid, std::move(ids), count);
}

}  // namespace dbfft
