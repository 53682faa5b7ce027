#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dbfft/field.hpp"
#include "dbfft/operators.hpp"

namespace dbfft {

/// Strain measure used by a model: small strain (eps, sigma) or finite
/// strain (F, first Piola-Kirchhoff P).
enum class Kinematics { Small, Finite };

enum class MaterialKind { LinearElastic, SvkHyperelastic, J2Plastic };

std::string to_string(MaterialKind kind);

struct Lame {
  double lambda;
  double mu;
};

/// Lame constants from Young's modulus and Poisson's ratio. Throws
/// ParameterError unless E > 0 and -1 < nu < 0.5.
Lame lame_from_young(double young, double poisson);

/// C = lambda I(x)I + 2 mu I_sym.
Tensor4 isotropic_stiffness(double young, double poisson);

/// Arithmetic voxel mean of a fourth-order tensor field.
Tensor4 average_tangent(const StiffnessField& k);

struct StressTangent {
  Mat3 stress;
  Tensor4 tangent;
};

/// Saint Venant-Kirchhoff: E = (F^T F - I)/2, S = C:E, P = F S and the
/// first elasticity tensor K_ijkl = d_ik S_jl + F_im C_mjnl F_kn.
/// Throws InvertedElement (voxel index `voxel`) when det F <= 0.
StressTangent svk_stress_tangent(const Mat3& f, const Lame& lame, std::size_t voxel = 0);

/// Parameters of small-strain J2 plasticity with linear isotropic hardening.
struct J2Parameters {
  double young = 70.0;
  double poisson = 0.3;
  double yield_stress = 0.1;
  double hardening = 70.0 / 20.0;
};

/// Internal variables of one J2 material point: plastic strain (symmetric
/// slots in kSymPairs order) and accumulated equivalent plastic strain.
inline constexpr std::size_t kJ2StateSize = 7;

struct J2Update {
  Mat3 stress;
  Tensor4 tangent;
  std::array<double, kJ2StateSize> state;
};

/// Radial-return update from the committed state, with the consistent
/// algorithmic tangent.
J2Update j2_update(const Mat3& strain, std::span<const double> committed, const J2Parameters& params);

/// Constitutive closure of one phase.
class MaterialModel {
 public:
  virtual ~MaterialModel() = default;
  virtual MaterialKind kind() const noexcept = 0;
  virtual Kinematics kinematics() const noexcept = 0;
  /// Internal variables per voxel (0 for elastic models).
  virtual std::size_t state_size() const noexcept { return 0; }
  /// Constant tangent, independent of the strain (linear elasticity).
  virtual bool is_linear() const noexcept { return false; }
  /// Stress and tangent at `strain` (eps or F) starting from `committed`;
  /// the updated internal variables are written to `trial`.
  virtual StressTangent update(const Mat3& strain, std::span<const double> committed, std::span<double> trial,
                               std::size_t voxel) const = 0;
  /// Reference (zero strain) tangent.
  virtual Tensor4 initial_tangent() const = 0;
};

class LinearElastic final : public MaterialModel {
 public:
  LinearElastic(double young, double poisson);
  MaterialKind kind() const noexcept override { return MaterialKind::LinearElastic; }
  Kinematics kinematics() const noexcept override { return Kinematics::Small; }
  bool is_linear() const noexcept override { return true; }
  StressTangent update(const Mat3& strain, std::span<const double>, std::span<double>, std::size_t) const override;
  Tensor4 initial_tangent() const override { return stiffness_; }
  const Tensor4& stiffness() const noexcept { return stiffness_; }

 private:
  Tensor4 stiffness_;
};

class SaintVenantKirchhoff final : public MaterialModel {
 public:
  SaintVenantKirchhoff(double young, double poisson);
  MaterialKind kind() const noexcept override { return MaterialKind::SvkHyperelastic; }
  Kinematics kinematics() const noexcept override { return Kinematics::Finite; }
  StressTangent update(const Mat3& f, std::span<const double>, std::span<double>, std::size_t voxel) const override;
  Tensor4 initial_tangent() const override;

 private:
  Lame lame_;
};

class J2Plasticity final : public MaterialModel {
 public:
  explicit J2Plasticity(const J2Parameters& params);
  MaterialKind kind() const noexcept override { return MaterialKind::J2Plastic; }
  Kinematics kinematics() const noexcept override { return Kinematics::Small; }
  std::size_t state_size() const noexcept override { return kJ2StateSize; }
  StressTangent update(const Mat3& strain, std::span<const double> committed, std::span<double> trial,
                       std::size_t voxel) const override;
  Tensor4 initial_tangent() const override;
  const J2Parameters& parameters() const noexcept { return params_; }

 private:
  J2Parameters params_;
};

/// Per-voxel internal variables with a committed copy and a trial copy.
/// The trial copy is what Newton iterations write; commit() accepts it,
/// rollback() discards it.
class StateField {
 public:
  StateField() = default;
  StateField(std::size_t voxels, std::size_t state_size)
      : size_(state_size), committed_(voxels * state_size, 0.0), trial_(voxels * state_size, 0.0) {}

  std::size_t state_size() const noexcept { return size_; }
  std::span<const double> committed(std::size_t v) const noexcept { return {committed_.data() + v * size_, size_}; }
  std::span<double> trial(std::size_t v) noexcept { return {trial_.data() + v * size_, size_}; }
  std::span<const double> trial(std::size_t v) const noexcept { return {trial_.data() + v * size_, size_}; }

  void commit() { committed_ = trial_; }
  void rollback() { trial_ = committed_; }

  const std::vector<double>& committed_data() const noexcept { return committed_; }

 private:
  std::size_t size_ = 0;
  std::vector<double> committed_;
  std::vector<double> trial_;
};

/// Phase-indexed set of constitutive models sharing one kinematics.
class MaterialTable {
 public:
  explicit MaterialTable(std::vector<std::shared_ptr<const MaterialModel>> phases);

  std::size_t size() const noexcept { return phases_.size(); }
  const MaterialModel& operator[](std::size_t phase) const noexcept { return *phases_[phase]; }
  Kinematics kinematics() const noexcept { return kinematics_; }
  bool all_linear() const noexcept;
  std::size_t state_size() const noexcept;

  /// Per-phase stiffness field of a linear table.
  StiffnessField linear_stiffness(const GridPtr& grid, const std::vector<std::uint16_t>& phase_ids) const;

 private:
  std::vector<std::shared_ptr<const MaterialModel>> phases_;
  Kinematics kinematics_;
};

struct ConstitutiveResponse {
  RealField stress;
  StiffnessField tangent;
};

/// Evaluates every voxel from the committed state; trial internal variables
/// are written into `state`. `strain` holds eps (SymTensor) or F (Tensor).
ConstitutiveResponse evaluate_materials(const MaterialTable& table, const std::vector<std::uint16_t>& phase_ids,
                                        const RealField& strain, StateField& state);

}  // namespace dbfft
