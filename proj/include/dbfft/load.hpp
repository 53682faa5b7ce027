#pragma once

#include <array>
#include <string>
#include <vector>

#include "dbfft/field.hpp"
#include "dbfft/materials.hpp"

namespace dbfft {

/// Per-component control flag over the full 3x3 index set, entry 3i+j.
/// true = stress controlled (IJ), false = strain controlled (ij).
using ComponentMask = std::array<bool, 9>;

/// Macroscopic state prescribed at one load step. `strain` holds eps (small
/// strain) or F (finite strain) and is meaningful on the strain-controlled
/// components; `stress` holds sigma or P and is meaningful on the
/// stress-controlled ones.
struct MacroTarget {
  Kinematics kinematics = Kinematics::Small;
  ComponentMask stress_controlled{};
  Mat3 strain = Mat3::Zero();
  Mat3 stress = Mat3::Zero();

  bool any_stress_controlled() const noexcept;
  /// Displacement-gradient part of the strain target: eps, or F - I.
  Mat3 strain_gradient() const;
};

/// Linear blend a + t (b - a) of two targets with the same mask.
MacroTarget interpolate(const MacroTarget& a, const MacroTarget& b, double t);

struct LoadSegment {
  Mat3 strain = Mat3::Zero();  ///< end-of-segment eps or F
  Mat3 stress = Mat3::Zero();  ///< end-of-segment sigma or P
  int increments = 1;
};

/// Macroscopic load path: a component mask fixed for the whole path and a
/// list of segments, each split into equal increments. Step 0 is the
/// unloaded state (zero strain or F = I, zero stress).
class LoadSpec {
 public:
  LoadSpec(Kinematics kinematics, ComponentMask stress_controlled, std::vector<LoadSegment> segments,
           double time_per_increment = 1.0);

  Kinematics kinematics() const noexcept { return kinematics_; }
  const ComponentMask& stress_controlled() const noexcept { return mask_; }
  const std::vector<LoadSegment>& segments() const noexcept { return segments_; }
  double time_per_increment() const noexcept { return time_per_increment_; }
  int total_increments() const noexcept;

  MacroTarget target(int step) const;

  /// Single segment under pure strain control.
  static LoadSpec strain_controlled(Kinematics kinematics, const Mat3& strain, int increments = 1);
  /// Single segment with every component stress controlled (small strain).
  static LoadSpec stress_controlled(const Mat3& stress, int increments = 1);

 private:
  Kinematics kinematics_;
  ComponentMask mask_;
  std::vector<LoadSegment> segments_;
  double time_per_increment_;
};

/// "11", "23", ... (1-based indices).
std::string component_name(int i, int j);

}  // namespace dbfft
