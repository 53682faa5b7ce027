#pragma once

#include "dbfft/fft.hpp"
#include "dbfft/load.hpp"

namespace dbfft {

/// A residual value. `absolute` is set when the normalizing denominator
/// vanished (below 1e-14 of the field scale) and the raw numerator is
/// reported instead.
struct ResidualValue {
  double value = 0.0;
  bool absolute = false;
};

struct ResidualTriple {
  ResidualValue equilibrium;
  ResidualValue compatibility;
  ResidualValue loading;
};

/// Root of the voxel mean of squared Frobenius (or Euclidean) norms.
double l2_norm(const RealField& f);

/// ||div s||_L2 / ||<s>||, with the divergence taken spectrally. Works for
/// Cauchy stress (SymTensor) and first Piola-Kirchhoff stress (Tensor).
ResidualValue equilibrium_residual(const FftEngine& fft, const RealField& stress);

/// Small strain: max |curl curl eps| / ||<eps>||.
ResidualValue compatibility_residual(const FftEngine& fft, const RealField& strain);

/// Finite strain: max |curl F| / ||<F> - I||.
ResidualValue finite_compatibility_residual(const FftEngine& fft, const RealField& deformation_gradient);

/// Mismatch between volume averages and the prescribed macroscopic state:
/// strain-controlled components are compared against the strain target
/// (eps, or F through F - I), stress-controlled ones against the stress
/// target, combined as
///   sqrt(|d_strain|^2 + |d_stress|^2) / sqrt(|strain target|^2 + |stress target|^2).
ResidualValue loading_residual(const Mat3& mean_strain, const Mat3& mean_stress, const MacroTarget& target);

/// ||f - g||_L2 / ||g||_L2.
ResidualValue field_diff(const RealField& f, const RealField& g);

bool meets(const ResidualTriple& r, double tol_equilibrium, double tol_compatibility, double tol_loading);

}  // namespace dbfft
