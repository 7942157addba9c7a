#pragma once

#include <cstdint>
#include <random>

#include "bsemitoric/geometry.hpp"

namespace bsemitoric {

/// Seeded generator whose doubles are built from the top 53 bits of each
/// mt19937_64 draw, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int sign() { return (engine_() >> 63) != 0 ? -1 : 1; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Per-shard seed: splitmix64 applied to master + index · golden-ratio increment.
std::uint64_t shard_seed(std::uint64_t master, std::uint64_t index);

struct SampleBox {
  double margin = 1e-3;           // distance kept from chart boundaries
  double plane_half_width = 4.0;  // (u, v) drawn from [-w, w]²
};

/// Chart-uniform random point: cylindrical angles in [0, 2π), heights in
/// (-1 + m, 1 - m), Cartesian (x, y) uniform on the disc x² + y² < 1 - m.
Point random_point(Rng& rng, const ChartId& chart, const SampleBox& box = {});

/// Random point with the given sphere factor pinned to the equator z = 0
/// (cylindrical chart on that factor).
Point random_point_on_equator(Rng& rng, Manifold manifold, int factor, const SampleBox& box = {});

}  // namespace bsemitoric
