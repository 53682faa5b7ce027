#include "dbfft/operators.hpp"

#include "dbfft/errors.hpp"

namespace dbfft {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(what);
}

bool is_tensor(Layout l) { return l == Layout::Tensor || l == Layout::SymTensor; }

/// Full 3x3 complex tensor at spectral entry p.
Eigen::Matrix3cd tensor_at(const SpectralField& a, std::size_t p) {
  Eigen::Matrix3cd t;
  for (int c = 0; c < a.components(); ++c) {
    const auto [i, j] = tensor_index(a.layout(), c);
    t(i, j) = a(c, p);
    if (a.layout() == Layout::SymTensor) t(j, i) = a(c, p);
  }
  return t;
}

// Levi-Civita symbol.
constexpr int levi(int i, int j, int k) { return (i - j) * (j - k) * (k - i) / 2; }

}  // namespace

SpectralField sym_grad(const SpectralField& u) {
  require(u.layout() == Layout::Vector, "sym_grad expects a vector field");
  SpectralField out(u.grid_ptr(), Layout::SymTensor);
  for_each_frequency(u.grid(), [&](std::size_t p, const Vec3& xi) {
    for (int c = 0; c < 6; ++c) {
      const auto [i, j] = kSymPairs[c];
      out(c, p) = 0.5 * kI * (xi(j) * u(i, p) + xi(i) * u(j, p));
    }
  });
  return out;
}

SpectralField grad(const SpectralField& u) {
  require(u.layout() == Layout::Vector, "grad expects a vector field");
  SpectralField out(u.grid_ptr(), Layout::Tensor);
  for_each_frequency(u.grid(), [&](std::size_t p, const Vec3& xi) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(flat(i, j), p) = kI * xi(j) * u(i, p);
  });
  return out;
}

SpectralField div(const SpectralField& s) {
  require(is_tensor(s.layout()), "div expects a tensor field");
  SpectralField out(s.grid_ptr(), Layout::Vector);
  const bool symmetric = s.layout() == Layout::SymTensor;
  for_each_frequency(s.grid(), [&](std::size_t p, const Vec3& xi) {
    for (int i = 0; i < 3; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += xi(j) * s(symmetric ? sym_slot(i, j) : flat(i, j), p);
      out(i, p) = kI * acc;
    }
  });
  return out;
}

SpectralField curl(const SpectralField& a) {
  require(is_tensor(a.layout()), "curl expects a tensor field");
  SpectralField out(a.grid_ptr(), Layout::Tensor);
  for_each_frequency(a.grid(), [&](std::size_t p, const Vec3& xi) {
    const Eigen::Matrix3cd t = tensor_at(a, p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            if (const int e = levi(j, k, l)) acc += static_cast<double>(e) * xi(k) * t(i, l);
        out(flat(i, j), p) = kI * acc;
      }
  });
  return out;
}

SpectralField transpose(const SpectralField& a) {
  require(is_tensor(a.layout()), "transpose expects a tensor field");
  if (a.layout() == Layout::SymTensor) return a;
  SpectralField out(a.grid_ptr(), Layout::Tensor);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto src = a.comp(flat(j, i));
      std::copy(src.begin(), src.end(), out.comp(flat(i, j)).begin());
    }
  return out;
}

SpectralField incompatibility(const SpectralField& a) { return curl(transpose(curl(a))); }

StiffnessField::StiffnessField(GridPtr grid, std::vector<Tensor4> phase_tensors, std::vector<std::uint16_t> phase_ids)
    : grid_(std::move(grid)), tensors_(std::move(phase_tensors)), phase_ids_(std::move(phase_ids)) {
  if (phase_ids_.size() != grid_->voxel_count()) throw ContractError("phase map size does not match the grid");
  for (auto id : phase_ids_)
    if (id >= tensors_.size())
      throw ContractError("phase id " + std::to_string(id) + " out of stiffness table range");
}

StiffnessField::StiffnessField(GridPtr grid, std::vector<Tensor4> voxel_tensors)
    : grid_(std::move(grid)), tensors_(std::move(voxel_tensors)) {
  if (tensors_.size() != grid_->voxel_count()) throw ContractError("per-voxel stiffness size does not match the grid");
}

RealField contract_stiffness(const StiffnessField& c, const RealField& eps) {
  return contract_stiffness(c, eps, Mat3::Zero());
}

RealField contract_stiffness(const StiffnessField& c, const RealField& eps, const Mat3& offset) {
  require(is_tensor(eps.layout()), "contract_stiffness expects a tensor field");
  require(c.grid() == eps.grid(), "contract_stiffness: grid mismatch");
  RealField out(eps.grid_ptr(), eps.layout());
  const std::size_t n = eps.points();
  const int nc = eps.components();
  const bool symmetric = eps.layout() == Layout::SymTensor;
  const Vec9 off = to_vec9(offset);
  for (std::size_t v = 0; v < n; ++v) {
    Vec9 e = off;
    for (int k = 0; k < nc; ++k) {
      const auto [i, j] = tensor_index(eps.layout(), k);
      e(flat(i, j)) += eps(k, v);
      if (symmetric && i != j) e(flat(j, i)) += eps(k, v);
    }
    const Vec9 s = c.at(v) * e;
    for (int k = 0; k < nc; ++k) {
      const auto [i, j] = tensor_index(eps.layout(), k);
      out(k, v) = symmetric && i != j ? 0.5 * (s(flat(i, j)) + s(flat(j, i))) : s(flat(i, j));
    }
  }
  return out;
}

RealField to_full(const RealField& sym_field) {
  require(sym_field.layout() == Layout::SymTensor, "to_full expects a symmetric tensor field");
  RealField out(sym_field.grid_ptr(), Layout::Tensor);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto src = sym_field.comp(sym_slot(i, j));
      std::copy(src.begin(), src.end(), out.comp(flat(i, j)).begin());
    }
  return out;
}

}  // namespace dbfft
