#include "dbfft/field.hpp"

#include <algorithm>
#include <cmath>

#include "dbfft/errors.hpp"

namespace dbfft {

template <typename T>
void BasicField<T>::check_same_shape(const BasicField& o) const {
  if (!same_shape(o)) throw ContractError("field shapes differ");
}

template class BasicField<double>;
template class BasicField<Complex>;

Mat3 RealField::tensor_at(std::size_t v) const {
  Mat3 t;
  switch (layout_) {
    case Layout::Tensor:
      for (int c = 0; c < 9; ++c) t(c / 3, c % 3) = (*this)(c, v);
      break;
    case Layout::SymTensor:
      for (int c = 0; c < 6; ++c) {
        const auto [i, j] = kSymPairs[c];
        t(i, j) = t(j, i) = (*this)(c, v);
      }
      break;
    case Layout::Vector:
      throw ContractError("tensor_at on a vector field");
  }
  return t;
}

void RealField::set_tensor(std::size_t v, const Mat3& t) {
  switch (layout_) {
    case Layout::Tensor:
      for (int c = 0; c < 9; ++c) (*this)(c, v) = t(c / 3, c % 3);
      break;
    case Layout::SymTensor:
      for (int c = 0; c < 6; ++c) {
        const auto [i, j] = kSymPairs[c];
        (*this)(c, v) = 0.5 * (t(i, j) + t(j, i));
      }
      break;
    case Layout::Vector:
      throw ContractError("set_tensor on a vector field");
  }
}

Vec3 RealField::vector_at(std::size_t v) const {
  if (layout_ != Layout::Vector) throw ContractError("vector_at on a tensor field");
  return {(*this)(0, v), (*this)(1, v), (*this)(2, v)};
}

void RealField::set_vector(std::size_t v, const Vec3& u) {
  if (layout_ != Layout::Vector) throw ContractError("set_vector on a tensor field");
  for (int c = 0; c < 3; ++c) (*this)(c, v) = u(c);
}

double RealField::mean(int c) const {
  double s = 0.0;
  for (double x : comp(c)) s += x;
  return s / static_cast<double>(points_);
}

Mat3 RealField::mean_tensor() const {
  if (layout_ == Layout::Vector) throw ContractError("mean_tensor on a vector field");
  Mat3 m = Mat3::Zero();
  for (int c = 0; c < components(); ++c) {
    const auto [i, j] = tensor_index(layout_, c);
    const double avg = mean(c);
    m(i, j) = avg;
    if (layout_ == Layout::SymTensor) m(j, i) = avg;
  }
  return m;
}

Vec3 RealField::mean_vector() const {
  if (layout_ != Layout::Vector) throw ContractError("mean_vector on a tensor field");
  return {mean(0), mean(1), mean(2)};
}

void RealField::remove_mean() {
  for (int c = 0; c < components(); ++c) {
    const double m = mean(c);
    for (double& x : comp(c)) x -= m;
  }
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Complex SpectralField::full_at(int c, std::size_t k0, std::size_t k1, std::size_t k2) const {
  const Grid& g = *grid_;
  if (k0 < g.half_n0()) return (*this)(c, index(k0, k1, k2));
  const std::size_t m0 = g.n(0) - k0;
  const std::size_t m1 = (g.n(1) - k1) % g.n(1);
  const std::size_t m2 = (g.n(2) - k2) % g.n(2);
  return std::conj((*this)(c, index(m0, m1, m2)));
}

double SpectralField::full_norm2() const {
  double s = 0.0;
  for (int c = 0; c < components(); ++c) {
    const auto values = comp(c);
    for (std::size_t p = 0; p < points_; ++p) s += multiplicity(p) * std::norm(values[p]);
  }
  return s;
}

}  // namespace dbfft
