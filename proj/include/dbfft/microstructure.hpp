#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dbfft/grid.hpp"
#include "dbfft/tensor.hpp"

namespace dbfft {

/// Voxel phase assignment on a grid.
class PhaseMap {
 public:
  PhaseMap(GridPtr grid, std::vector<std::uint16_t> phase_id, std::size_t phase_count);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  const std::vector<std::uint16_t>& phase_id() const noexcept { return ids_; }
  std::size_t phase_count() const noexcept { return count_; }
  const std::vector<double>& volume_fractions() const noexcept { return fractions_; }

  bool operator==(const PhaseMap& o) const { return *grid_ == *o.grid_ && count_ == o.count_ && ids_ == o.ids_; }

 private:
  GridPtr grid_;
  std::vector<std::uint16_t> ids_;
  std::size_t count_;
  std::vector<double> fractions_;
};

/// Single phase everywhere.
PhaseMap homogeneous(const GridPtr& grid);

/// Centered sphere (phase 1) of target volume fraction vf in a matrix
/// (phase 0). A voxel belongs to the sphere when its center does.
PhaseMap sphere_inclusion(const GridPtr& grid, double vf);

/// `count` equal, non-overlapping spheres (phase 1) placed at random with
/// periodic wrap-around; total volume fraction `porosity`.
PhaseMap random_spheres(const GridPtr& grid, int count, double porosity, std::uint64_t seed);

/// Sphere centers (voxel centers, physical units) and radius used by
/// random_spheres.
struct SpherePacking {
  std::vector<Vec3> centers;
  double radius = 0.0;
};
SpherePacking place_random_spheres(const Grid& grid, int count, double porosity, std::uint64_t seed);

/// Two-phase laminate with layers normal to `axis`: the first
/// `phase0_slabs` voxel slabs along the axis are phase 0, the rest phase 1.
PhaseMap laminate(const GridPtr& grid, int axis, std::size_t phase0_slabs);

void save_phase_map(const PhaseMap& map, const std::filesystem::path& path);
PhaseMap load_phase_map(const std::filesystem::path& path);

}  // namespace dbfft
