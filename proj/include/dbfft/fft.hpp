#pragma once

#include <memory>

#include "dbfft/field.hpp"

namespace dbfft {

/// Forward and inverse discrete Fourier transforms of multi-component
/// fields on one grid, backed by FFTW real-to-complex plans.
///
/// Normalization: forward is unnormalized (the zero-frequency entry equals
/// the voxel sum); inverse divides by the voxel count.
class FftEngine {
 public:
  explicit FftEngine(GridPtr grid, int threads = 1);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;
  FftEngine(FftEngine&&) noexcept;
  FftEngine& operator=(FftEngine&&) noexcept;

  const GridPtr& grid_ptr() const noexcept;

  SpectralField forward(const RealField& field) const;
  /// Throws ConjugateSymmetryError when the input is not the transform of a
  /// real field (residue above 1e-12 relative on the self-conjugate plane).
  RealField inverse(const SpectralField& field) const;

  /// Single-component transforms on raw storage.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Largest deviation from conjugate symmetry on the self-conjugate plane,
/// relative to the largest magnitude of the field.
double conjugate_symmetry_residue(const SpectralField& field);

}  // namespace dbfft
