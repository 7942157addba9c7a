#pragma once

// Characteristic polynomial of a 4×4 matrix from the permutation expansion of
// det(λI − A), sampled at λ = 0..3 and interpolated.

#include <algorithm>
#include <array>

namespace oracle {

using Mat = std::array<std::array<double, 4>, 4>;

inline double leibniz_det(const Mat& m) {
  std::array<int, 4> p{0, 1, 2, 3};
  double det = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (p[i] > p[j]) ++inversions;
    double term = inversions % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < 4; ++i) term *= m[i][p[i]];
    det += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return det;
}

/// {1, a1, a2, a3, a4} with det(λI − A) = λ⁴ + a1λ³ + a2λ² + a3λ + a4.
inline std::array<double, 5> charpoly_by_expansion(const Mat& a) {
  // q(λ) = det(λI − A) − λ⁴ is cubic; Newton forward differences on λ = 0..3.
  std::array<double, 4> q{};
  for (int k = 0; k < 4; ++k) {
    Mat m{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = (i == j ? k : 0.0) - a[i][j];
    q[k] = leibniz_det(m) - static_cast<double>(k * k * k * k);
  }
  const double d1 = q[1] - q[0], d2 = q[2] - 2 * q[1] + q[0], d3 = q[3] - 3 * q[2] + 3 * q[1] - q[0];
  // q(λ) = q0 + d1 λ + d2 λ(λ−1)/2 + d3 λ(λ−1)(λ−2)/6, expanded in powers of λ.
  const double c3 = d3 / 6.0;
  const double c2 = d2 / 2.0 - d3 / 2.0;
  const double c1 = d1 - d2 / 2.0 + d3 / 3.0;
  return {1.0, c3, c2, c1, q[0]};
}

}  // namespace oracle
