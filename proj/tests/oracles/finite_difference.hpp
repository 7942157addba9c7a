#pragma once

// Central-difference derivatives of a scalar function of four variables.

#include <array>
#include <functional>

namespace oracle {

using Vec = std::array<double, 4>;
using Fn = std::function<double(const Vec&)>;

inline Vec central_gradient(const Fn& f, Vec x, double h) {
  Vec g{};
  for (int i = 0; i < 4; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline std::array<Vec, 4> central_hessian(const Fn& f, const Vec& x, double h) {
  std::array<Vec, 4> out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      auto at = [&](double si, double sj) {
        Vec y = x;
        y[i] += si * h;
        y[j] += sj * h;
        return f(y);
      };
      out[i][j] = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  }
  return out;
}

}  // namespace oracle
