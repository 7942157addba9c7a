#pragma once

// Momentum maps transcribed directly in cylindrical coordinates, independent
// of the library's ambient-quadratic representation.
//   S²×R²: (θ, z, u, v);  S²×S²: (θ₁, z₁, θ₂, z₂).

#include <cmath>
#include <string>
#include <utility>

namespace oracle {

struct Params {
  double rho1 = 1.0, rho2 = 1.0, R1 = 1.0, R2 = 2.0, t = 0.5;
};

inline std::pair<double, double> momentum(const std::string& system, const Params& p, double a, double b,
                                          double c, double d) {
  if (system == "cso" || system == "bcso" || system == "bcsorev") {
    const double theta = a, z = b, u = c, v = d;
    const double N2 = u * u + v * v;
    double L = p.rho2 * N2 / 2.0;
    if (system == "cso") L += p.rho1 * z;
    if (system == "bcso") L += p.rho1 * std::log(std::abs(z));
    if (system == "bcsorev") L -= p.rho1 * std::log(std::abs(z));
    const double H = std::sqrt(1.0 - z * z) / 2.0 * (u * std::cos(theta) + v * std::sin(theta));
    return {L, H};
  }
  const double th1 = a, z1 = b, th2 = c, z2 = d, t = p.t;
  const double coupling = std::sqrt((1.0 - z1 * z1) * (1.0 - z2 * z2)) * std::cos(th1 - th2) + z1 * z2;
  double L = p.R1 * z1 + p.R2 * z2;
  double H = (1.0 - t) * z1 + t * coupling;
  if (system == "cam1" || system == "cam2") L = p.R1 * std::log(std::abs(z1)) + p.R2 * z2;
  if (system == "cam3") L = p.R1 * z1 + p.R2 * std::log(std::abs(z2));
  if (system == "cam2" || system == "cambroken") H = (1.0 - t) * std::log(std::abs(z1)) + t * coupling;
  return {L, H};
}

}  // namespace oracle
