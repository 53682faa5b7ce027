#pragma once

#include <cstdint>
#include <vector>

#include "dbfft/field.hpp"

namespace dbfft {

/// Calls fn(p, xi) for every stored entry p of a half spectrum on `grid`,
/// with xi the frequency vector of that entry.
template <typename Fn>
void for_each_frequency(const Grid& grid, Fn&& fn) {
  const auto& f0 = grid.freq(0);
  const auto& f1 = grid.freq(1);
  const auto& f2 = grid.freq(2);
  const std::size_t h0 = grid.half_n0();
  std::size_t p = 0;
  for (std::size_t k2 = 0; k2 < grid.n(2); ++k2)
    for (std::size_t k1 = 0; k1 < grid.n(1); ++k1)
      for (std::size_t k0 = 0; k0 < h0; ++k0, ++p) fn(p, Vec3{f0[k0], f1[k1], f2[k2]});
}

// Spectral differential operators. All act per frequency from grid.freq,
// and all return exactly zero at the null frequency.

/// Symmetric gradient: out_ij = i/2 (xi_j u_i + xi_i u_j).
SpectralField sym_grad(const SpectralField& u);

/// Full gradient: out_ij = i xi_j u_i.
SpectralField grad(const SpectralField& u);

/// Divergence on the second index: out_i = i xi_j s_ij. Accepts Tensor
/// and SymTensor layouts.
SpectralField div(const SpectralField& s);

/// Row-wise curl on the second index: out_ij = i e_jkl xi_k a_il.
SpectralField curl(const SpectralField& a);

/// Curl applied to both indices, curl(transpose(curl(a))). Annihilates
/// symmetric gradients; this is the incompatibility of a strain field.
SpectralField incompatibility(const SpectralField& a);

/// Fourth-order tensor field stored either once per phase (with a voxel
/// phase map) or once per voxel.
class StiffnessField {
 public:
  /// Per-phase storage.
  StiffnessField(GridPtr grid, std::vector<Tensor4> phase_tensors, std::vector<std::uint16_t> phase_ids);
  /// Per-voxel storage.
  StiffnessField(GridPtr grid, std::vector<Tensor4> voxel_tensors);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  bool per_voxel() const noexcept { return phase_ids_.empty(); }
  const Tensor4& at(std::size_t voxel) const noexcept {
    return per_voxel() ? tensors_[voxel] : tensors_[phase_ids_[voxel]];
  }
  const std::vector<Tensor4>& tensors() const noexcept { return tensors_; }
  const std::vector<std::uint16_t>& phase_ids() const noexcept { return phase_ids_; }

 private:
  GridPtr grid_;
  std::vector<Tensor4> tensors_;
  std::vector<std::uint16_t> phase_ids_;
};

/// sigma(x) = C(x) : eps(x), voxelwise. The output has the layout of the
/// input (SymTensor or Tensor).
RealField contract_stiffness(const StiffnessField& c, const RealField& eps);

/// out(x) = C(x) : (eps(x) + offset); offset is a constant tensor.
RealField contract_stiffness(const StiffnessField& c, const RealField& eps, const Mat3& offset);

/// Layout conversions between full and symmetric tensor storage.
RealField to_full(const RealField& sym_field);
SpectralField transpose(const SpectralField& a);

}  // namespace dbfft
