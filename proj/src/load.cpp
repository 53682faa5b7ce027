#include "dbfft/load.hpp"

#include "dbfft/errors.hpp"

namespace dbfft {

bool MacroTarget::any_stress_controlled() const noexcept {
  for (bool b : stress_controlled)
    if (b) return true;
  return false;
}

Mat3 MacroTarget::strain_gradient() const {
  return kinematics == Kinematics::Finite ? Mat3(strain - Mat3::Identity()) : strain;
}

MacroTarget interpolate(const MacroTarget& a, const MacroTarget& b, double t) {
  MacroTarget out = b;
  out.strain = a.strain + t * (b.strain - a.strain);
  out.stress = a.stress + t * (b.stress - a.stress);
  return out;
}

LoadSpec::LoadSpec(Kinematics kinematics, ComponentMask stress_controlled, std::vector<LoadSegment> segments,
                   double time_per_increment)
    : kinematics_(kinematics), mask_(stress_controlled), segments_(std::move(segments)),
      time_per_increment_(time_per_increment) {
  if (segments_.empty()) throw ParameterError("load path has no segments");
  for (const auto& s : segments_)
    if (s.increments < 1) throw ParameterError("load segment increments must be positive");
  if (!(time_per_increment_ > 0.0)) throw ParameterError("time_per_increment must be positive");
  if (kinematics_ == Kinematics::Small) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (mask_[flat(i, j)] != mask_[flat(j, i)])
          throw ParameterError("small-strain control mask must be symmetric (component " + component_name(i, j) +
                               ")");
  }
}

int LoadSpec::total_increments() const noexcept {
  int n = 0;
  for (const auto& s : segments_) n += s.increments;
  return n;
}

MacroTarget LoadSpec::target(int step) const {
  MacroTarget t;
  t.kinematics = kinematics_;
  t.stress_controlled = mask_;
  const Mat3 strain0 = kinematics_ == Kinematics::Finite ? Mat3(Mat3::Identity()) : Mat3(Mat3::Zero());
  if (step <= 0) {
    t.strain = strain0;
    return t;
  }
  Mat3 start_strain = strain0;
  Mat3 start_stress = Mat3::Zero();
  int remaining = step;
  for (const auto& s : segments_) {
    if (remaining <= s.increments) {
      const double f = static_cast<double>(remaining) / s.increments;
      t.strain = start_strain + f * (s.strain - start_strain);
      t.stress = start_stress + f * (s.stress - start_stress);
      return t;
    }
    remaining -= s.increments;
    start_strain = s.strain;
    start_stress = s.stress;
  }
  t.strain = start_strain;
  t.stress = start_stress;
  return t;
}

LoadSpec LoadSpec::strain_controlled(Kinematics kinematics, const Mat3& strain, int increments) {
  return LoadSpec(kinematics, ComponentMask{}, {LoadSegment{strain, Mat3::Zero(), increments}});
}

LoadSpec LoadSpec::stress_controlled(const Mat3& stress, int increments) {
  ComponentMask all;
  all.fill(true);
  return LoadSpec(Kinematics::Small, all, {LoadSegment{Mat3::Zero(), stress, increments}});
}

std::string component_name(int i, int j) { return std::to_string(i + 1) + std::to_string(j + 1); }

}  // namespace dbfft
