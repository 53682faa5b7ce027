#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace dbfft {

/// Regular periodic voxel grid with an odd number of voxels per axis.
///
/// Voxels are numbered x-fastest: v = i0 + n0 * (i1 + n1 * i2). The
/// frequency lists are stored in the transform's native order (zero,
/// positive, then negative frequencies), so that freq(a)[k] is the
/// frequency of spectral index k along axis a.
class Grid {
 public:
  Grid(std::array<std::size_t, 3> n, std::array<double, 3> l);

  const std::array<std::size_t, 3>& n() const noexcept { return n_; }
  const std::array<double, 3>& l() const noexcept { return l_; }
  std::size_t n(int axis) const noexcept { return n_[axis]; }
  double l(int axis) const noexcept { return l_[axis]; }
  double spacing(int axis) const noexcept { return l_[axis] / static_cast<double>(n_[axis]); }

  std::size_t voxel_count() const noexcept { return n_[0] * n_[1] * n_[2]; }
  double volume() const noexcept { return l_[0] * l_[1] * l_[2]; }

  /// Number of stored complex entries per component of a half spectrum.
  std::size_t half_n0() const noexcept { return n_[0] / 2 + 1; }
  std::size_t spectral_count() const noexcept { return half_n0() * n_[1] * n_[2]; }

  /// Frequencies (rad/length) of axis `axis` in native transform order.
  const std::vector<double>& freq(int axis) const noexcept { return freq_[axis]; }

  /// Frequencies of axis `axis` in centered order -(n-1)/2 .. (n-1)/2.
  std::vector<double> centered_freq(int axis) const;

  /// Signed integer wavenumber of native index k along `axis`.
  long wavenumber(int axis, std::size_t k) const noexcept {
    const auto n = static_cast<long>(n_[axis]);
    const auto kk = static_cast<long>(k);
    return kk <= (n - 1) / 2 ? kk : kk - n;
  }

  std::size_t voxel_index(std::size_t i0, std::size_t i1, std::size_t i2) const noexcept {
    return i0 + n_[0] * (i1 + n_[1] * i2);
  }
  std::array<std::size_t, 3> voxel_coords(std::size_t v) const noexcept {
    return {v % n_[0], (v / n_[0]) % n_[1], v / (n_[0] * n_[1])};
  }
  /// Position of the voxel center.
  std::array<double, 3> voxel_center(std::size_t v) const noexcept;

  bool operator==(const Grid& other) const noexcept { return n_ == other.n_ && l_ == other.l_; }

 private:
  std::array<std::size_t, 3> n_;
  std::array<double, 3> l_;
  std::array<std::vector<double>, 3> freq_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates the grid (odd n >= 3, positive lengths) and builds its
/// frequency lattice. Throws InvalidGrid.
GridPtr make_grid(std::array<std::size_t, 3> n, std::array<double, 3> l = {1.0, 1.0, 1.0});

}  // namespace dbfft
