#include "dbfft/materials.hpp"

#include <cmath>

#include "dbfft/errors.hpp"

namespace dbfft {

std::string to_string(MaterialKind kind) {
  switch (kind) {
    case MaterialKind::LinearElastic: return "linear_elastic";
    case MaterialKind::SvkHyperelastic: return "svk_hyperelastic";
    case MaterialKind::J2Plastic: return "j2_plastic";
  }
  return "unknown";
}

Lame lame_from_young(double young, double poisson) {
  if (!(young > 0.0) || !std::isfinite(young)) throw ParameterError("Young's modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5)) throw ParameterError("Poisson's ratio must lie in (-1, 0.5)");
  return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)), young / (2.0 * (1.0 + poisson))};
}

namespace {

Tensor4 isotropic(const Lame& lame) {
  Tensor4 c = Tensor4::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          if (i == j && k == l) v += lame.lambda;
          if (i == k && j == l) v += lame.mu;
          if (i == l && j == k) v += lame.mu;
          c(flat(i, j), flat(k, l)) = v;
        }
  return c;
}

}  // namespace

Tensor4 isotropic_stiffness(double young, double poisson) { return isotropic(lame_from_young(young, poisson)); }

Tensor4 average_tangent(const StiffnessField& k) {
  Tensor4 sum = Tensor4::Zero();
  const std::size_t n = k.grid().voxel_count();
  if (k.per_voxel()) {
    for (const auto& t : k.tensors()) sum += t;
  } else {
    std::vector<std::size_t> counts(k.tensors().size(), 0);
    for (auto id : k.phase_ids()) ++counts[id];
    for (std::size_t p = 0; p < counts.size(); ++p) sum += static_cast<double>(counts[p]) * k.tensors()[p];
  }
  return sum / static_cast<double>(n);
}

StressTangent svk_stress_tangent(const Mat3& f, const Lame& lame, std::size_t voxel) {
  const double det = f.determinant();
  if (!(det > 0.0)) throw InvertedElement(voxel, det);
  const Mat3 green = 0.5 * (f.transpose() * f - Mat3::Identity());
  const Mat3 s = lame.lambda * green.trace() * Mat3::Identity() + 2.0 * lame.mu * green;
  StressTangent out;
  out.stress = f * s;
  // K_ijkl = d_ik S_jl + F_im C_mjnl F_kn, expanded for the isotropic C:
  // F_im C_mjnl F_kn = lambda F_ij F_kl + mu (F_in F_kn d_jl + F_il F_kj).
  const Mat3 b = f * f.transpose();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = lame.lambda * f(i, j) * f(k, l) + lame.mu * f(i, l) * f(k, j);
          if (j == l) v += lame.mu * b(i, k);
          if (i == k) v += s(j, l);
          out.tangent(flat(i, j), flat(k, l)) = v;
        }
  return out;
}

J2Update j2_update(const Mat3& strain, std::span<const double> committed, const J2Parameters& params) {
  if (!(params.yield_stress > 0.0)) throw ParameterError("J2 yield stress must be positive");
  if (params.hardening < 0.0) throw ParameterError("J2 hardening modulus must be non-negative");
  const Lame lame = lame_from_young(params.young, params.poisson);
  const double mu = lame.mu;
  const double bulk = lame.lambda + 2.0 * mu / 3.0;

  Mat3 plastic = Mat3::Zero();
  for (int c = 0; c < 6; ++c) {
    const auto [i, j] = kSymPairs[c];
    plastic(i, j) = plastic(j, i) = committed[c];
  }
  const double accumulated = committed[6];

  const Mat3 elastic = sym(strain) - plastic;
  const double vol = elastic.trace();
  const Mat3 dev_trial = 2.0 * mu * (elastic - vol / 3.0 * Mat3::Identity());
  const double norm_trial = dev_trial.norm();
  const double q_trial = std::sqrt(1.5) * norm_trial;
  const double yield = params.yield_stress + params.hardening * accumulated;

  J2Update out;
  std::copy(committed.begin(), committed.begin() + kJ2StateSize, out.state.begin());
  const Tensor4 c = isotropic(lame);

  if (q_trial - yield <= 0.0) {
    out.stress = bulk * vol * Mat3::Identity() + dev_trial;
    out.tangent = c;
    return out;
  }

  const double dp = (q_trial - yield) / (3.0 * mu + params.hardening);
  const Mat3 n = dev_trial / norm_trial;
  out.stress = bulk * vol * Mat3::Identity() + dev_trial - 2.0 * mu * std::sqrt(1.5) * dp * n;
  const Mat3 new_plastic = plastic + std::sqrt(1.5) * dp * n;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kSymPairs[k];
    out.state[k] = new_plastic(i, j);
  }
  out.state[6] = accumulated + dp;

  // C_alg = K I(x)I + 2 mu theta I_dev - 2 mu theta_bar n(x)n
  const double theta = 1.0 - 3.0 * mu * dp / q_trial;
  const double theta_bar = 3.0 * mu / (3.0 * mu + params.hardening) - (1.0 - theta);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double isym = 0.5 * ((i == k && j == l ? 1.0 : 0.0) + (i == l && j == k ? 1.0 : 0.0));
          const double ii = (i == j && k == l) ? 1.0 : 0.0;
          out.tangent(flat(i, j), flat(k, l)) = bulk * ii + 2.0 * mu * theta * (isym - ii / 3.0) -
                                                2.0 * mu * theta_bar * n(i, j) * n(k, l);
        }
  return out;
}

LinearElastic::LinearElastic(double young, double poisson) : stiffness_(isotropic_stiffness(young, poisson)) {}

StressTangent LinearElastic::update(const Mat3& strain, std::span<const double>, std::span<double>,
                                    std::size_t) const {
  return {contract(stiffness_, sym(strain)), stiffness_};
}

SaintVenantKirchhoff::SaintVenantKirchhoff(double young, double poisson) : lame_(lame_from_young(young, poisson)) {}

StressTangent SaintVenantKirchhoff::update(const Mat3& f, std::span<const double>, std::span<double>,
                                           std::size_t voxel) const {
  return svk_stress_tangent(f, lame_, voxel);
}

Tensor4 SaintVenantKirchhoff::initial_tangent() const { return isotropic(lame_); }

J2Plasticity::J2Plasticity(const J2Parameters& params) : params_(params) {
  if (!(params_.yield_stress > 0.0)) throw ParameterError("J2 yield stress must be positive");
  if (params_.hardening < 0.0) throw ParameterError("J2 hardening modulus must be non-negative");
  lame_from_young(params_.young, params_.poisson);
}

StressTangent J2Plasticity::update(const Mat3& strain, std::span<const double> committed, std::span<double> trial,
                                   std::size_t) const {
  const J2Update r = j2_update(strain, committed, params_);
  std::copy(r.state.begin(), r.state.end(), trial.begin());
  return {r.stress, r.tangent};
}

Tensor4 J2Plasticity::initial_tangent() const { return isotropic_stiffness(params_.young, params_.poisson); }

MaterialTable::MaterialTable(std::vector<std::shared_ptr<const MaterialModel>> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw ParameterError("material table is empty");
  kinematics_ = phases_.front()->kinematics();
  for (const auto& m : phases_)
    if (m->kinematics() != kinematics_)
      throw ParameterError("material table mixes small-strain and finite-strain models");
}

bool MaterialTable::all_linear() const noexcept {
  for (const auto& m : phases_)
    if (!m->is_linear()) return false;
  return true;
}

std::size_t MaterialTable::state_size() const noexcept {
  std::size_t s = 0;
  for (const auto& m : phases_) s = std::max(s, m->state_size());
  return s;
}

StiffnessField MaterialTable::linear_stiffness(const GridPtr& grid, const std::vector<std::uint16_t>& phase_ids) const {
  if (!all_linear()) throw ContractError("linear_stiffness requires linear materials");
  std::vector<Tensor4> table;
  for (const auto& m : phases_) table.push_back(m->initial_tangent());
  return StiffnessField(grid, std::move(table), phase_ids);
}

ConstitutiveResponse evaluate_materials(const MaterialTable& table, const std::vector<std::uint16_t>& phase_ids,
                                        const RealField& strain, StateField& state) {
  const GridPtr& grid = strain.grid_ptr();
  const std::size_t n = grid->voxel_count();
  if (phase_ids.size() != n) throw ContractError("phase map size does not match the grid");
  const Layout expected = table.kinematics() == Kinematics::Small ? Layout::SymTensor : Layout::Tensor;
  if (strain.layout() != expected) throw ContractError("strain layout does not match the material kinematics");

  RealField stress(grid, expected);
  if (table.all_linear()) {
    StiffnessField c = table.linear_stiffness(grid, phase_ids);
    stress = contract_stiffness(c, strain);
    return {std::move(stress), std::move(c)};
  }
  std::vector<Tensor4> tangents(n);
  for (std::size_t v = 0; v < n; ++v) {
    const MaterialModel& m = table[phase_ids[v]];
    const std::size_t s = m.state_size();
    const auto committed = state.committed(v).first(s);
    const auto trial = state.trial(v).first(s);
    StressTangent r = m.update(strain.tensor_at(v), committed, trial, v);
    stress.set_tensor(v, r.stress);
    tangents[v] = r.tangent;
  }
  return {std::move(stress), StiffnessField(grid, std::move(tangents))};
}

}  // namespace dbfft
