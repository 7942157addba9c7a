#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "bsemitoric/classify.hpp"
#include "bsemitoric/error.hpp"
#include "bsemitoric/imaging.hpp"
#include "bsemitoric/loci.hpp"
#include "bsemitoric/sampling.hpp"

using namespace bsemitoric;

namespace {
const ChartId kCylPlane = ChartId::cylindrical(Manifold::SphereTimesPlane);
}

TEST_CASE("rank of the b-coupled spin-oscillator") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  CHECK(rank_at(sys, pole(Manifold::SphereTimesPlane, 1)).rank == 0);
  CHECK(rank_at(sys, pole(Manifold::SphereTimesPlane, -1)).rank == 0);
  Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    const Point p = random_point(rng, kCylPlane);
    CHECK(rank_at(sys, p).rank == 2);
  }
}

TEST_CASE("rank is at least one on Z") {
  Rng rng(32);
  for (SystemId id : {SystemId::bCSO, SystemId::bCSOReversed, SystemId::CAM1, SystemId::CAM2, SystemId::CAM3}) {
    const SystemDef sys = make_system(id, {});
    for (int k = 0; k < 2000; ++k) {
      const Point p = random_point_on_equator(rng, sys.manifold(), sys.form.singular_factor);
      REQUIRE(z_value(sys, p) == 0.0);
      CHECK(rank_at(sys, p).rank >= 1);
    }
  }
}

TEST_CASE("analytic rank-one points of the reversed system") {
  const SystemParams unit{};
  const Point p = reversed_rank1_analytic(unit, 0.0, 1.0 / std::sqrt(2.0), 1);
  CHECK(p.coords[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(p.coords[3]) <= 1e-15);
  const RankResult r = rank_at(make_system(SystemId::bCSOReversed, unit), p);
  CHECK(r.rank == 1);
  REQUIRE(r.mu.has_value());

  SystemParams four = unit;
  four.rho1 = 4.0;
  const Point q = reversed_rank1_analytic(four, std::numbers::pi / 2.0, 1.0 / std::sqrt(2.0), -1);
  CHECK(std::abs(q.coords[2]) <= 1e-14);
  CHECK(q.coords[3] == doctest::Approx(-2.0).epsilon(1e-14));

  const Point near_pole = reversed_rank1_analytic(unit, 1.0, 1.0 - 1e-8, 1);
  CHECK(std::hypot(near_pole.coords[2], near_pole.coords[3]) < 2e-4);

  CHECK_THROWS_AS(reversed_rank1_analytic(unit, 0.0, 0.0, 1), Error);
  CHECK_THROWS_AS(reversed_rank1_analytic(unit, 0.0, 1.0, 1), Error);
}

TEST_CASE("reversed locus families and their images") {
  const SystemParams params{};
  const SystemDef sys = make_system(SystemId::bCSOReversed, params);
  Rng rng(33);
  std::set<int> families;
  for (int k = 0; k < 100; ++k) {
    const double z = rng.sign() * rng.uniform(0.05, 0.99);
    const int branch = rng.sign();
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Point p = reversed_rank1_analytic(params, theta, z, branch);
    const RankResult r = rank_at(sys, p);
    CHECK(r.rank == 1);
    REQUIRE(r.mu.has_value());
    const Mat24 dF = eval_dF(sys, p);
    CHECK((*r.mu * dF.row(0) + dF.row(1)).norm() <= 1e-8 * dF.row(1).norm());
    families.insert(reversed_family(p));

    // The image does not depend on θ.
    const MomentumValue a = eval_F(sys, p);
    const MomentumValue b = eval_F(sys, reversed_rank1_analytic(params, theta + 1.3, z, branch));
    CHECK(std::abs(a.L - b.L) <= 1e-12);
    CHECK(std::abs(a.H - b.H) <= 1e-12);
    if (z > 0.0) {
      const MomentumValue c = reversed_boundary(params, z, branch);
      CHECK(std::abs(a.L - c.L) <= 1e-12);
      CHECK(std::abs(a.H - c.H) <= 1e-12);
    }
  }
  CHECK(families == std::set<int>{1, 2, 3, 4});
}

TEST_CASE("rank-one scan of the reversed system") {
  const SystemParams params{};
  const SystemDef sys = make_system(SystemId::bCSOReversed, params);
  const Rank1Locus locus = scan_rank1(sys);
  CHECK(locus.components == 4);
  REQUIRE(locus.samples.size() >= 100);
  std::set<int> families;
  double worst = 0.0;
  const std::size_t stride = locus.samples.size() / 100;
  for (std::size_t i = 0; i < 100; ++i) {
    const Rank1Sample& s = locus.samples[i * stride];
    worst = std::max(worst, reversed_locus_deviation(params, s.point));
  }
  for (const auto& s : locus.samples) {
    families.insert(s.family);
    const Mat24 dF = eval_dF(sys, s.point);
    CHECK((s.mu * dF.row(0) + dF.row(1)).norm() <= 1e-8 * std::max(1.0, dF.row(1).norm()));
  }
  CHECK(worst <= 1e-8);
  CHECK(families == std::set<int>{1, 2, 3, 4});
}

TEST_CASE("rank-one scan of the b-coupled spin-oscillator is empty") {
  const Rank1Locus locus = scan_rank1(make_system(SystemId::bCSO, {}));
  CHECK(locus.samples.empty());
  CHECK(locus.components == 0);
  Rank1Grid coarse;
  coarse.resolution = 8;
  CHECK_THROWS_AS(scan_rank1(make_system(SystemId::bCSO, {}), coarse), Error);
}

TEST_CASE("rank-one points of the first b-angular system are aligned") {
  const SystemDef sys = make_system(SystemId::CAM1, {});
  Rank1Grid grid;
  grid.resolution = 24;
  const Rank1Locus locus = scan_rank1(sys, grid);
  REQUIRE_FALSE(locus.samples.empty());
  for (const auto& s : locus.samples) {
    const Point c = to_chart(s.point, ChartId::cylindrical(Manifold::SphereTimesSphere));
    CHECK(std::abs(std::sin(c.coords[0] - c.coords[2])) <= 1e-8);
    CHECK(rank_at(sys, s.point).rank == 1);
  }
}
