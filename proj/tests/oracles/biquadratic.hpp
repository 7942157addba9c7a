#pragma once

// Roots of λ⁴ + bλ² + c through the quadratic in μ = λ².

#include <algorithm>
#include <array>
#include <complex>

namespace oracle {

inline std::array<std::complex<double>, 4> biquadratic_roots(double b, double c) {
  using C = std::complex<double>;
  const C disc = std::sqrt(C(b * b - 4.0 * c, 0.0));
  const C mu1 = (-b + disc) / 2.0;
  const C mu2 = (-b - disc) / 2.0;
  const C r1 = std::sqrt(mu1), r2 = std::sqrt(mu2);
  std::array<C, 4> out{r1, -r1, r2, -r2};
  std::sort(out.begin(), out.end(), [](const C& x, const C& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

}  // namespace oracle
