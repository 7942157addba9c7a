#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsemitoric/classify.hpp"
#include "bsemitoric/error.hpp"
#include "bsemitoric/imaging.hpp"
#include "bsemitoric/sampling.hpp"

using namespace bsemitoric;

TEST_CASE("shard seeds are distinct and reproducible") {
  CHECK(shard_seed(1, 0) == shard_seed(1, 0));
  CHECK(shard_seed(1, 0) != shard_seed(1, 1));
  CHECK(shard_seed(1, 0) != shard_seed(2, 0));
}

TEST_CASE("sampling is deterministic per seed") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  const ImageWindow w;
  const auto a = sample_image(sys, 5000, 9, w, Subset::Whole);
  const auto b = sample_image(sys, 5000, 9, w, Subset::Whole);
  const auto c = sample_image(sys, 5000, 10, w, Subset::Whole);
  REQUIRE(a.size() == 5000);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].L == b[i].L && a[i].H == b[i].H && a[i].chart == b[i].chart;
    differs = differs || a[i].L != c[i].L;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("samples are clamped into the window and tagged") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  const ImageWindow w;
  long clamped = 0;
  for (const auto& s : sample_image(sys, 20000, 3, w, Subset::FirstLower)) {
    CHECK(s.L >= w.L_min);
    CHECK(s.L <= w.L_max);
    CHECK(s.H >= w.H_min);
    CHECK(s.H <= w.H_max);
    CHECK(s.subset == Subset::FirstLower);
    clamped += s.clamped;
  }
  CHECK(clamped > 0);
}

TEST_CASE("sampling errors") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  CHECK_THROWS_AS(sample_image(sys, 0, 1, {}, Subset::Whole), Error);
  try {
    sample_image(sys, 10, 1, {}, Subset::SecondUpper);
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotApplicable);
  }
  ImageSampling bad;
  bad.log_fraction = 1.5;
  CHECK_THROWS_AS(sample_image(sys, 10, 1, {}, Subset::Whole, bad), Error);
  for (Subset s : {Subset::Whole, Subset::FirstUpper, Subset::FirstLower, Subset::SecondUpper, Subset::SecondLower}) {
    CHECK(parse_subset(subset_name(s)) == s);
  }
}

TEST_CASE("hemisphere subsets stay in their hemisphere") {
  const SystemDef sys = make_system(SystemId::CAM1, {});
  const auto up = sample_image(sys, 2000, 4, {}, Subset::FirstUpper);
  const auto down = sample_image(sys, 2000, 4, {}, Subset::SecondLower);
  // On z₂ < 0 both terms of L are nonpositive.
  for (const auto& s : down) CHECK(s.L <= 0.0 + 1e-12);
  CHECK(up.size() == 2000);
}

TEST_CASE("coverage counts unclamped samples") {
  ImageWindow w;
  w.resolution = 2;
  std::vector<MomentumSample> s(3);
  s[0].L = -1.0;
  s[0].H = -1.0;
  s[1].L = 1.0;
  s[1].H = 1.0;
  s[2].L = 3.0;
  s[2].H = -3.0;
  s[2].clamped = true;
  const Coverage c = coverage(s, w);
  CHECK(c.cells_total == 4);
  CHECK(c.cells_hit == 2);
  CHECK(c.counts == std::vector<long>{1, 0, 0, 1});
}

TEST_CASE("reversed image boundary") {
  const SystemParams unit{};
  const MomentumValue top = reversed_boundary(unit, 1.0, 1);
  CHECK(top.L == 0.0);
  CHECK(top.H == 0.0);
  const MomentumValue half = reversed_boundary(unit, 0.5, 1);
  CHECK(half.L == doctest::Approx(2.1931471805599454).epsilon(1e-14));
  CHECK(half.H == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(reversed_boundary(unit, 0.5, -1).H == doctest::Approx(-0.75));
  CHECK_THROWS_AS(reversed_boundary(unit, 0.0, 1), Error);
  CHECK_THROWS_AS(reversed_boundary(unit, 1.5, 1), Error);
  CHECK(reversed_hmax(unit, half.L) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("reversed image stays inside its boundary") {
  const SystemParams unit{};
  const SystemDef sys = make_system(SystemId::bCSOReversed, unit);
  ImageSampling sampling;
  sampling.plane_half_width = 3.0;
  double worst = -1e300;
  for (const auto& s : sample_image(sys, 200000, 5, {}, Subset::Whole, sampling)) {
    if (s.clamped) continue;
    CHECK(s.L >= -1e-12);
    worst = std::max(worst, std::abs(s.H) - reversed_hmax(unit, s.L));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("fixed points land at the origin of the image") {
  for (SystemId id : {SystemId::bCSO, SystemId::bCSOReversed}) {
    const SystemDef sys = make_system(id, {});
    for (int e : {1, -1}) {
      const MomentumValue v = eval_F(sys, pole(Manifold::SphereTimesPlane, e));
      CHECK(v.L == 0.0);
      CHECK(v.H == 0.0);
    }
  }
}

TEST_CASE("explicit preimages of the b-coupled spin-oscillator") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  const Point origin = probe_preimage(sys, {0.0, 0.0});
  CHECK(std::abs(z_value(sys, origin)) == doctest::Approx(1.0));

  const Point p = probe_preimage(sys, {1.0, 0.0});
  const Ambient x = embed(p);
  CHECK(std::abs(x[2]) == doctest::Approx(1.0));
  CHECK(x[3] * x[3] + x[4] * x[4] == doctest::Approx(2.0).epsilon(1e-9));

  const Point q = probe_preimage(sys, {-1.0, 2.0});
  const MomentumValue v = eval_F(sys, q);
  CHECK(std::abs(v.L + 1.0) <= 1e-9);
  CHECK(std::abs(v.H - 2.0) <= 1e-9);
  CHECK(std::abs(z_value(sys, q)) <= std::exp(-1.0) + 1e-12);

  Rng rng(41);
  for (int k = 0; k < 200; ++k) {
    const MomentumValue target{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
    const MomentumValue got = eval_F(sys, probe_preimage(sys, target));
    CHECK(std::abs(got.L - target.L) <= 1e-9);
    CHECK(std::abs(got.H - target.H) <= 1e-9);
  }
  CHECK_THROWS_AS(probe_preimage(make_system(SystemId::CSO, {}), {0.0, 0.0}), Error);
}

TEST_CASE("fibers of the b-coupled spin-oscillator are unbounded in H") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  ImageWindow w{-1000.0, 1000.0, -1000.0, 1000.0, 30};
  ImageSampling s;
  s.log_fraction = 1.0;
  s.z_floor = 1e-300;
  s.plane_half_width = 40.0;
  const auto samples = sample_image(sys, 1000000, 1, w, Subset::Whole, s);
  for (double ell : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    double lo = 0.0, hi = 0.0;
    for (const auto& m : samples) {
      if (m.clamped || std::abs(m.L - ell) >= 0.01) continue;
      lo = std::min(lo, m.H);
      hi = std::max(hi, m.H);
    }
    INFO("slice L = " << ell);
    CHECK(hi > 10.0);
    CHECK(lo < -10.0);
  }
}

TEST_CASE("image of the first b-angular system is symmetric under H -> -H") {
  const SystemDef sys = make_system(SystemId::CAM1, {});
  const ImageWindow w;
  const Coverage c = coverage(sample_image(sys, 1000000, 1, w, Subset::Whole), w);
  const int n = w.resolution;
  int compared = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const long a = c.counts[i * n + j];
      const long b = c.counts[(n - 1 - i) * n + j];
      if (a < 50 || b < 50) continue;
      ++compared;
      const double ratio = static_cast<double>(a) / static_cast<double>(b);
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.25);
    }
  }
  CHECK(compared > 20);
}
