#include "dbfft/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dbfft/errors.hpp"

namespace dbfft {

Grid::Grid(std::array<std::size_t, 3> n, std::array<double, 3> l) : n_(n), l_(l) {
  for (int a = 0; a < 3; ++a) {
    if (n_[a] < 3 || n_[a] % 2 == 0)
      throw InvalidGrid("axis " + std::to_string(a) + ": voxel count " + std::to_string(n_[a]) +
                        " must be odd and >= 3");
    if (!(l_[a] > 0.0) || !std::isfinite(l_[a]))
      throw InvalidGrid("axis " + std::to_string(a) + ": length must be positive");
    freq_[a].resize(n_[a]);
    for (std::size_t k = 0; k < n_[a]; ++k)
      freq_[a][k] = 2.0 * std::numbers::pi * static_cast<double>(wavenumber(a, k)) / l_[a];
  }
}

std::vector<double> Grid::centered_freq(int axis) const {
  const std::size_t n = n_[axis];
  std::vector<double> out(n);
  // xi = 2 pi (k - (n + 1) / 2) / L for k = 1..n
  for (std::size_t k = 1; k <= n; ++k) {
    const double m = static_cast<double>(static_cast<long>(k) - static_cast<long>((n + 1) / 2));
    out[k - 1] = 2.0 * std::numbers::pi * m / l_[axis];
  }
  return out;
}

std::array<double, 3> Grid::voxel_center(std::size_t v) const noexcept {
  const auto c = voxel_coords(v);
  return {(static_cast<double>(c[0]) + 0.5) * spacing(0), (static_cast<double>(c[1]) + 0.5) * spacing(1),
          (static_cast<double>(c[2]) + 0.5) * spacing(2)};
}

GridPtr make_grid(std::array<std::size_t, 3> n, std::array<double, 3> l) {
  return std::make_shared<const Grid>(n, l);
}

}  // namespace dbfft
