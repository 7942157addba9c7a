#include "bsemitoric/sampling.hpp"

#include <numbers>

namespace bsemitoric {

std::uint64_t shard_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void fill_factor(Rng& rng, const FactorChart& f, double margin, double& a, double& b) {
  if (f.kind == ChartKind::Cylindrical) {
    a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    b = rng.uniform(-1.0 + margin, 1.0 - margin);
    return;
  }
  do {
    a = rng.uniform(-1.0, 1.0);
    b = rng.uniform(-1.0, 1.0);
  } while (a * a + b * b >= 1.0 - margin);
}

}  // namespace

Point random_point(Rng& rng, const ChartId& chart, const SampleBox& box) {
  Vec4 q;
  fill_factor(rng, chart.first, box.margin, q[0], q[1]);
  if (chart.manifold == Manifold::SphereTimesSphere) {
    fill_factor(rng, chart.second, box.margin, q[2], q[3]);
  } else {
    q[2] = rng.uniform(-box.plane_half_width, box.plane_half_width);
    q[3] = rng.uniform(-box.plane_half_width, box.plane_half_width);
  }
  return make_point(chart, q);
}

Point random_point_on_equator(Rng& rng, Manifold manifold, int factor, const SampleBox& box) {
  Point p = random_point(rng, ChartId::cylindrical(manifold), box);
  p.coords[2 * factor + 1] = 0.0;
  return p;
}

}  // namespace bsemitoric
