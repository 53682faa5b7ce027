#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>

namespace dbfft {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Fourth-order tensor stored as a 9x9 matrix acting on second-order
/// tensors flattened row-wise: entry (3i+j, 3k+l) holds T_ijkl.
using Tensor4 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

constexpr int flat(int i, int j) { return 3 * i + j; }

inline Vec9 to_vec9(const Mat3& a) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(flat(i, j)) = a(i, j);
  return v;
}

inline Mat3 from_vec9(const Vec9& v) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = v(flat(i, j));
  return a;
}

/// T : a
inline Mat3 contract(const Tensor4& t, const Mat3& a) {
  return from_vec9(t * to_vec9(a));
}

/// Frobenius product a : b.
inline double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

inline Mat3 sym(const Mat3& a) { return 0.5 * (a + a.transpose()); }

/// Index pairs of the six stored components of a symmetric tensor:
/// 11, 22, 33, 23, 13, 12 (tensor components, no engineering factor).
inline constexpr std::array<std::array<int, 2>, 6> kSymPairs{
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

/// Map from (i, j) to the symmetric storage slot.
constexpr int sym_slot(int i, int j) {
  constexpr int table[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return table[i][j];
}

inline Tensor4 identity4() { return Tensor4::Identity(); }

/// Transpose on the first and last index pairs: (T^T)_ijkl = T_klij.
inline bool has_major_symmetry(const Tensor4& t, double tol) {
  return (t - t.transpose()).cwiseAbs().maxCoeff() <= tol * t.cwiseAbs().maxCoeff();
}

inline bool has_minor_symmetry(const Tensor4& t, double tol) {
  const double scale = t.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double v = t(flat(i, j), flat(k, l));
          if (std::abs(v - t(flat(j, i), flat(k, l))) > tol * scale) return false;
          if (std::abs(v - t(flat(i, j), flat(l, k))) > tol * scale) return false;
        }
  return true;
}

}  // namespace dbfft
