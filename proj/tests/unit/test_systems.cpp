#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "biquadratic.hpp"
#include "closed_forms.hpp"
#include "finite_difference.hpp"
#include "bsemitoric/error.hpp"
#include "bsemitoric/sampling.hpp"
#include "bsemitoric/systems.hpp"

using namespace bsemitoric;

namespace {

const ChartId kCylPlane = ChartId::cylindrical(Manifold::SphereTimesPlane);
const ChartId kCylSphere = ChartId::cylindrical(Manifold::SphereTimesSphere);

oracle::Params to_oracle(const SystemParams& p) { return {p.rho1, p.rho2, p.R1, p.R2, p.t}; }

const SystemId kAll[] = {SystemId::CSO,  SystemId::bCSO, SystemId::bCSOReversed, SystemId::CAM,
                         SystemId::CAM1, SystemId::CAM2, SystemId::CAM3,         SystemId::CAMBroken};

ChartId cyl_chart(const SystemDef& sys) {
  return sys.manifold() == Manifold::SphereTimesPlane ? kCylPlane : kCylSphere;
}

}  // namespace

TEST_CASE("system names round trip") {
  for (SystemId id : kAll) {
    const auto parsed = parse_system(system_name(id));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == id);
  }
  CHECK_FALSE(parse_system("cam4").has_value());
  CHECK(integrable_systems().size() == 7);
}

TEST_CASE("parameter validation") {
  auto kind = [](SystemId id, SystemParams p) {
    try {
      make_system(id, p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  CHECK(kind(SystemId::CSO, {0.0, 1.0}) == ErrorKind::BadParams);
  CHECK(kind(SystemId::bCSO, {1.0, -1.0}) == ErrorKind::BadParams);
  CHECK(kind(SystemId::CAM, {1, 1, 2.0, 1.0, 0.5}) == ErrorKind::BadParams);
  CHECK(kind(SystemId::CAM1, {1, 1, 1.0, 2.0, 1.5}) == ErrorKind::BadParams);
  CHECK_NOTHROW(make_system(SystemId::CAM1, {1, 1, 1.0, 2.0, 1.0}));
  CHECK_NOTHROW(make_system(SystemId::CAM1, {1, 1, 1.0, 2.0, 0.0}));
}

TEST_CASE("momentum maps agree with the closed forms") {
  Rng rng(101);
  for (SystemId id : kAll) {
    SystemParams params;
    params.rho1 = 0.7;
    params.rho2 = 1.3;
    params.R1 = 0.8;
    params.R2 = 1.9;
    params.t = 0.35;
    const SystemDef sys = make_system(id, params);
    const std::string name(system_name(id));
    for (int k = 0; k < 500; ++k) {
      const Point p = random_point(rng, cyl_chart(sys));
      if (std::abs(z_value(sys, p)) < 1e-6) continue;
      const auto [L, H] = oracle::momentum(name, to_oracle(params), p.coords[0], p.coords[1], p.coords[2],
                                           p.coords[3]);
      const MomentumValue v = eval_F(sys, p);
      CHECK(std::abs(v.L - L) <= 1e-12 * (1.0 + std::abs(L)));
      CHECK(std::abs(v.H - H) <= 1e-12 * (1.0 + std::abs(H)));
    }
  }
}

TEST_CASE("evaluation examples") {
  const SystemDef rev = make_system(SystemId::bCSOReversed, {});
  const MomentumValue v = eval_F(rev, make_point(kCylPlane, Vec4(0.0, 0.5, 1.0, 0.0)));
  CHECK(v.L == doctest::Approx(1.1931471805599454).epsilon(1e-14));
  CHECK(v.H == doctest::Approx(0.4330127018922193).epsilon(1e-14));

  const SystemDef cso = make_system(SystemId::CSO, {});
  const MomentumValue n = eval_F(cso, make_point(ChartId::cartesian(Manifold::SphereTimesPlane, 1), Vec4::Zero()));
  CHECK(n.L == 1.0);
  CHECK(n.H == 0.0);

  const SystemDef b = make_system(SystemId::bCSO, {});
  try {
    eval_F(b, make_point(kCylPlane, Vec4(0.0, 0.0, 1.0, 0.0)));
    FAIL("expected OnSingularHypersurface");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OnSingularHypersurface);
  }
}

TEST_CASE("b-frame differentials match finite differences of the closed forms") {
  Rng rng(202);
  for (SystemId id : kAll) {
    const SystemDef sys = make_system(id, {});
    const std::string name(system_name(id));
    const auto params = to_oracle(sys.params);
    const auto slots = frame_slots(sys.form, cyl_chart(sys));
    for (int k = 0; k < 200; ++k) {
      const Point p = random_point(rng, cyl_chart(sys));
      if (std::abs(z_value(sys, p)) < 0.05) continue;
      const oracle::Vec x{p.coords[0], p.coords[1], p.coords[2], p.coords[3]};
      const Mat24 dF = eval_dF(sys, p);
      for (int row = 0; row < 2; ++row) {
        const auto g = oracle::central_gradient(
            [&](const oracle::Vec& y) {
              const auto [L, H] = oracle::momentum(name, params, y[0], y[1], y[2], y[3]);
              return row == 0 ? L : H;
            },
            x, 1e-6);
        for (int i = 0; i < 4; ++i) {
          const int c = slots[i].coord;
          const double expected = slots[i].logarithmic ? g[c] * p.coords[c] : g[c];
          CHECK(std::abs(dF(row, i) - expected) <= 1e-7 * std::max(1.0, std::abs(expected)));
        }
      }
    }
  }
}

TEST_CASE("b-frame differentials stay finite on Z") {
  Rng rng(303);
  for (SystemId id : {SystemId::bCSO, SystemId::bCSOReversed, SystemId::CAM1, SystemId::CAM2, SystemId::CAM3}) {
    const SystemDef sys = make_system(id, {});
    for (int k = 0; k < 100; ++k) {
      const Point p = random_point_on_equator(rng, sys.manifold(), sys.form.singular_factor);
      CHECK(eval_dF(sys, p).allFinite());
      CHECK(std::isfinite(poisson_bracket(sys, p)));
    }
  }
}

TEST_CASE("X_L of the b-coupled spin-oscillator rotates both factors") {
  const SystemDef sys = make_system(SystemId::bCSO, {});
  const Point p = make_point(kCylPlane, Vec4(0.4, 0.3, 1.5, -0.5));
  const Vec4 X = hamiltonian_field(sys, p, Which::L);
  CHECK(X[0] == doctest::Approx(0.0));
  CHECK(X[1] == doctest::Approx(1.0));
  CHECK(X[2] == doctest::Approx(0.5));
  CHECK(X[3] == doctest::Approx(1.5));
}

TEST_CASE("symplectic gradient convention") {
  // X_f = Ω⁻¹ df, equivalently ι_{X_f} ω = −df.
  Rng rng(404);
  for (SystemId id : kAll) {
    const SystemDef sys = make_system(id, {});
    for (const ChartId& c : sys.charts()) {
      const Point p = random_point(rng, c);
      const Mat4 om = omega_bframe(sys, p).entries;
      const Vec4 X = hamiltonian_field(sys, p, Which::H);
      const Vec4 dH = eval_dF(sys, p).row(1).transpose();
      CHECK((om * X - dH).norm() <= 1e-12 * (1.0 + dH.norm()));
      CHECK((omega_inverse(om) * om - Mat4::Identity()).norm() <= 1e-13);
    }
  }
}

TEST_CASE("broken system bracket has the closed-form magnitude") {
  const SystemDef sys = make_system(SystemId::CAMBroken, {1, 1, 1.0, 2.0, 0.5});
  const double z1 = 0.5, th1 = 1.0, z2 = 0.3, th2 = 0.0, t = 0.5;
  const Point p = make_point(kCylSphere, Vec4(th1, z1, th2, z2));
  const double closed = t * (z1 - 1.0) * std::sqrt((1.0 - z1 * z1) * (1.0 - z2 * z2)) * std::sin(th1 - th2);
  const double bracket = poisson_bracket(sys, p);
  CHECK(std::abs(std::abs(bracket) - std::abs(closed)) <= 1e-12);
  // The orientation convention fixed by the other systems gives the opposite sign.
  CHECK(bracket == doctest::Approx(0.17379228046214257).epsilon(1e-13));
  CHECK(bracket == doctest::Approx(-closed).epsilon(1e-13));

  Rng rng(505);
  for (int k = 0; k < 200; ++k) {
    const Point q = random_point(rng, kCylSphere);
    const double a1 = q.coords[0], b1 = q.coords[1], a2 = q.coords[2], b2 = q.coords[3];
    const double ref = -t * (b1 - 1.0) * std::sqrt((1.0 - b1 * b1) * (1.0 - b2 * b2)) * std::sin(a1 - a2);
    CHECK(std::abs(poisson_bracket(sys, q) - ref) <= 1e-12);
  }
}

TEST_CASE("brackets vanish for the integrable systems") {
  Rng rng(606);
  for (SystemId id : integrable_systems()) {
    const SystemDef sys = make_system(id, {});
    for (const ChartId& c : sys.charts()) {
      for (int k = 0; k < 100; ++k) {
        const Point p = random_point(rng, c);
        const Mat24 dF = eval_dF(sys, p);
        CHECK(std::abs(poisson_bracket(sys, p)) <= 1e-9 * (1.0 + dF.row(0).norm() * dF.row(1).norm()));
      }
    }
  }
}

TEST_CASE("momentum symmetries") {
  Rng rng(707);
  const SystemDef cam1 = make_system(SystemId::CAM1, {});
  const SystemDef bcso = make_system(SystemId::bCSO, {});
  for (int k = 0; k < 300; ++k) {
    const Point p = random_point(rng, kCylSphere);
    const Point q = make_point(kCylSphere, Vec4(p.coords[0] + std::numbers::pi, -p.coords[1], p.coords[2], p.coords[3]));
    const MomentumValue a = eval_F(cam1, p), b = eval_F(cam1, q);
    CHECK(b.L == doctest::Approx(a.L).epsilon(1e-12));
    CHECK(std::abs(b.H + a.H) <= 1e-12);

    const Point r = random_point(rng, kCylPlane);
    const Point s = make_point(kCylPlane, Vec4(r.coords[0] + std::numbers::pi, -r.coords[1], r.coords[2], r.coords[3]));
    const MomentumValue c = eval_F(bcso, r), d = eval_F(bcso, s);
    CHECK(d.L == doctest::Approx(c.L).epsilon(1e-12));
    CHECK(std::abs(d.H + c.H) <= 1e-12);
  }
}

TEST_CASE("Hessians at poles match second differences") {
  const SystemDef cam = make_system(SystemId::CAM, {});
  const Point p = make_point(ChartId::cartesian(Manifold::SphereTimesSphere, 1, -1), Vec4::Zero());
  const Hessians h = eval_hessians(cam, p);
  auto f = [&](const oracle::Vec& y, int which) {
    const Point q{p.chart, Vec4(y[0], y[1], y[2], y[3])};
    const MomentumValue v = eval_F(cam, q);
    return which == 0 ? v.L : v.H;
  };
  for (int which = 0; which < 2; ++which) {
    const auto fd = oracle::central_hessian([&](const oracle::Vec& y) { return f(y, which); }, {0, 0, 0, 0}, 1e-4);
    const Mat4& m = which == 0 ? h.L : h.H;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(m(i, j) - fd[i][j]) <= 1e-6);
  }
  try {
    eval_hessians(cam, make_point(kCylSphere, Vec4(0.0, 0.2, 0.0, 0.1)));
    FAIL("expected NotFixedPoint");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFixedPoint);
  }
}
