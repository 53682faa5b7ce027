#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dbfft/grid.hpp"
#include "dbfft/tensor.hpp"

namespace dbfft {

using Complex = std::complex<double>;

/// Per-voxel shape of a field.
enum class Layout {
  Vector,     ///< 3 components
  Tensor,     ///< 9 components, (i, j) -> 3i + j
  SymTensor,  ///< 6 components in the order of kSymPairs
};

constexpr int component_count(Layout layout) {
  switch (layout) {
    case Layout::Vector: return 3;
    case Layout::Tensor: return 9;
    case Layout::SymTensor: return 6;
  }
  return 0;
}

/// Tensor indices (i, j) of storage component c of a tensor layout.
inline std::array<int, 2> tensor_index(Layout layout, int c) {
  if (layout == Layout::SymTensor) return kSymPairs[c];
  return {c / 3, c % 3};
}

/// Weight of component c in the Frobenius product of two tensors stored
/// with this layout (off-diagonal symmetric slots count twice).
constexpr double frobenius_weight(Layout layout, int c) {
  return layout == Layout::SymTensor && c >= 3 ? 2.0 : 1.0;
}

/// Dense field stored component-major: all voxels (or frequencies) of
/// component 0, then component 1, ... Real fields hold one value per
/// voxel; spectral fields hold the half spectrum of the real transform
/// (see Grid::half_n0), with the full spectrum recoverable through
/// SpectralField::full_at.
template <typename T>
class BasicField {
 public:
  BasicField(GridPtr grid, Layout layout, std::size_t points)
      : grid_(std::move(grid)), layout_(layout), points_(points),
        data_(points * component_count(layout), T{}) {}

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  Layout layout() const noexcept { return layout_; }
  int components() const noexcept { return component_count(layout_); }
  /// Entries per component.
  std::size_t points() const noexcept { return points_; }

  std::span<T> comp(int c) noexcept { return {data_.data() + c * points_, points_}; }
  std::span<const T> comp(int c) const noexcept { return {data_.data() + c * points_, points_}; }
  T& operator()(int c, std::size_t p) noexcept { return data_[c * points_ + p]; }
  const T& operator()(int c, std::size_t p) const noexcept { return data_[c * points_ + p]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  BasicField& operator+=(const BasicField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  BasicField& operator-=(const BasicField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  BasicField& operator*=(double a) {
    for (auto& x : data_) x *= a;
    return *this;
  }
  /// this += a * o
  void axpy(double a, const BasicField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
  }

  bool same_shape(const BasicField& o) const noexcept {
    return layout_ == o.layout_ && points_ == o.points_ && *grid_ == *o.grid_;
  }
  void check_same_shape(const BasicField& o) const;

 protected:
  GridPtr grid_;
  Layout layout_;
  std::size_t points_;
  std::vector<T> data_;
};

/// Real-domain field: one value per voxel and component.
class RealField : public BasicField<double> {
 public:
  RealField(GridPtr grid, Layout layout)
      : BasicField(grid, layout, grid ? grid->voxel_count() : 0) {}

  /// Tensor at voxel v (symmetric layouts are expanded).
  Mat3 tensor_at(std::size_t v) const;
  void set_tensor(std::size_t v, const Mat3& t);
  Vec3 vector_at(std::size_t v) const;
  void set_vector(std::size_t v, const Vec3& u);

  double mean(int c) const;
  /// Volume average as a full tensor (tensor layouts only).
  Mat3 mean_tensor() const;
  Vec3 mean_vector() const;
  /// Subtract the per-component mean.
  void remove_mean();

  double max_abs() const;
};

/// Spectral-domain field: half spectrum along axis 0, native order.
class SpectralField : public BasicField<Complex> {
 public:
  SpectralField(GridPtr grid, Layout layout)
      : BasicField(grid, layout, grid ? grid->spectral_count() : 0) {}

  std::size_t index(std::size_t k0, std::size_t k1, std::size_t k2) const noexcept {
    return k0 + grid_->half_n0() * (k1 + grid_->n(1) * k2);
  }
  /// Value of component c at full-spectrum native index (k0, k1, k2),
  /// reconstructed by conjugate symmetry when k0 lies in the omitted half.
  Complex full_at(int c, std::size_t k0, std::size_t k1, std::size_t k2) const;

  /// Multiplicity of a stored entry in the full spectrum (1 on the
  /// self-conjugate plane k0 = 0, 2 elsewhere).
  double multiplicity(std::size_t p) const noexcept { return p % grid_->half_n0() == 0 ? 1.0 : 2.0; }

  /// Sum over the full spectrum of |value|^2 for all components.
  double full_norm2() const;
};

}  // namespace dbfft
