#include "bsemitoric/verify.hpp"

#include <algorithm>
#include <cmath>

#include "bsemitoric/classify.hpp"
#include "bsemitoric/error.hpp"
#include "bsemitoric/loci.hpp"
#include "bsemitoric/sampling.hpp"

namespace bsemitoric {

namespace {

enum SuiteIndex : std::uint64_t { kInvolution, kGradient, kOverlap, kZRank };

void tally(SuiteResult& r, double err) {
  ++r.points;
  r.worst = std::max(r.worst, err);
  if (!(err <= r.threshold)) ++r.failures;
}

void finish(SuiteResult& r) { r.passed = r.failures == 0 && r.points > 0; }

// Frame components of a function's central-difference coordinate gradient.
Vec4 fd_frame_gradient(const SystemDef& sys, const BFunction& f, const Point& p, double h) {
  const auto slots = frame_slots(sys.form, p.chart);
  Vec4 coord;
  for (int j = 0; j < 4; ++j) {
    Point a = p, b = p;
    a.coords[j] += h;
    b.coords[j] -= h;
    coord[j] = (eval_function(f, a) - eval_function(f, b)) / (2.0 * h);
  }
  Vec4 out;
  for (int i = 0; i < 4; ++i) {
    const int c = slots[i].coord;
    out[i] = slots[i].logarithmic ? coord[c] * p.coords[c] : coord[c];
  }
  return out;
}

Mat4 fd_hessian(const BFunction& f, const Point& p, double h) {
  Mat4 out;
  auto at = [&](int j, double sj, int k, double sk) {
    Point q = p;
    q.coords[j] += sj * h;
    q.coords[k] += sk * h;
    return eval_function(f, q);
  };
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      out(j, k) = (at(j, 1, k, 1) - at(j, 1, k, -1) - at(j, -1, k, 1) + at(j, -1, k, -1)) / (4.0 * h * h);
    }
  }
  return out;
}

bool disjoint(const FactorChart& a, const FactorChart& b) {
  return a.kind == ChartKind::Cartesian && b.kind == ChartKind::Cartesian && a.sign != b.sign;
}

// Keeps the 1e-3 sampling margin on the target side of a transition too.
bool inside_margin(const Point& q, double margin) {
  auto ok = [&](const FactorChart& f, int off) {
    if (f.kind == ChartKind::Cylindrical) return std::abs(q.coords[off + 1]) < 1.0 - margin;
    return q.coords[off] * q.coords[off] + q.coords[off + 1] * q.coords[off + 1] < 1.0 - margin;
  };
  if (!ok(q.chart.first, 0)) return false;
  return q.chart.manifold == Manifold::SphereTimesPlane || ok(q.chart.second, 2);
}

}  // namespace

SuiteResult involution_suite(const SystemDef& sys, const VerifyConfig& cfg) {
  SuiteResult r{.name = "involution", .threshold = 1e-9};
  Rng rng(shard_seed(cfg.seed, kInvolution));
  long large = 0;
  for (const ChartId& chart : sys.charts()) {
    for (long k = 0; k < cfg.points_per_chart; ++k) {
      const Point p = random_point(rng, chart);
      const Mat24 dF = eval_dF(sys, p);
      const double bracket = poisson_bracket(sys, p);
      if (std::abs(bracket) > 1e-3) ++large;
      tally(r, std::abs(bracket) / (1.0 + dF.row(0).norm() * dF.row(1).norm()));
    }
  }
  r.fraction_large_bracket = r.points > 0 ? static_cast<double>(large) / r.points : 0.0;
  finish(r);
  return r;
}

SuiteResult gradient_suite(const SystemDef& sys, const VerifyConfig& cfg) {
  SuiteResult r{.name = "gradient", .threshold = 1e-6};
  Rng rng(shard_seed(cfg.seed, kGradient));
  for (const ChartId& chart : sys.charts()) {
    for (long k = 0; k < cfg.points_per_chart; ++k) {
      Point p = random_point(rng, chart);
      // Finite differences of log|z| need |z| well above the step.
      while (std::abs(z_value(sys, p)) < 0.05) p = random_point(rng, chart);
      const Mat24 dF = eval_dF(sys, p);
      const Vec4 fdL = fd_frame_gradient(sys, sys.L, p, cfg.fd_step);
      const Vec4 fdH = fd_frame_gradient(sys, sys.H, p, cfg.fd_step);
      const double eL = (fdL - dF.row(0).transpose()).norm() / std::max(1.0, dF.row(0).norm());
      const double eH = (fdH - dF.row(1).transpose()).norm() / std::max(1.0, dF.row(1).norm());
      tally(r, std::max(eL, eH));
    }
  }
  finish(r);
  return r;
}

SuiteResult hessian_suite(const SystemDef& sys, const VerifyConfig&) {
  SuiteResult r{.name = "hessian", .threshold = 1e-5};
  const bool two = sys.manifold() == Manifold::SphereTimesSphere;
  for (int e1 : {1, -1}) {
    for (int e2 : two ? std::vector<int>{1, -1} : std::vector<int>{1}) {
      const Point p = pole(sys.manifold(), e1, e2);
      double err = 1.0;
      try {
        const Hessians h = eval_hessians(sys, p);
        err = std::max((h.L - fd_hessian(sys.L, p, 1e-4)).norm() / std::max(1.0, h.L.norm()),
                       (h.H - fd_hessian(sys.H, p, 1e-4)).norm() / std::max(1.0, h.H.norm()));
      } catch (const Error&) {
        // A pole that is not a fixed point counts as a failure.
      }
      tally(r, err);
    }
  }
  finish(r);
  return r;
}

SuiteResult overlap_suite(const SystemDef& sys, const VerifyConfig& cfg) {
  SuiteResult r{.name = "overlap", .threshold = 1e-11};
  Rng rng(shard_seed(cfg.seed, kOverlap));
  const auto charts = sys.charts();
  const long max_attempts = 50 * cfg.points_per_chart;
  for (std::size_t a = 0; a < charts.size(); ++a) {
    for (std::size_t b = a + 1; b < charts.size(); ++b) {
      if (disjoint(charts[a].first, charts[b].first) || disjoint(charts[a].second, charts[b].second)) continue;
      long accepted = 0;
      for (long k = 0; k < max_attempts && accepted < cfg.points_per_chart; ++k) {
        const Point p = random_point(rng, charts[a]);
        const auto q = try_to_chart(p, charts[b]);
        if (!q || !inside_margin(*q, SampleBox{}.margin)) continue;
        ++accepted;
        const MomentumValue Fp = eval_F(sys, p), Fq = eval_F(sys, *q);
        tally(r, std::max(std::abs(Fp.L - Fq.L), std::abs(Fp.H - Fq.H)));
      }
    }
  }
  finish(r);
  return r;
}

SuiteResult z_rank_suite(const SystemDef& sys, const VerifyConfig& cfg) {
  SuiteResult r{.name = "z-rank", .threshold = 0.5};
  const int f = sys.form.singular_factor;
  if (f < 0) throw Error(ErrorKind::NotApplicable, "the system has no singular hypersurface");
  Rng rng(shard_seed(cfg.seed, kZRank));
  for (long k = 0; k < cfg.z_points; ++k) {
    const Point p = random_point_on_equator(rng, sys.manifold(), f);
    // Error is 1 where the rank drops to 0.
    tally(r, rank_at(sys, p).rank >= 1 ? 0.0 : 1.0);
  }
  finish(r);
  return r;
}

VerifyReport verify_system(const SystemDef& sys, const VerifyConfig& cfg) {
  VerifyReport rep{sys.id, sys.params, cfg, {}, true};
  rep.suites.push_back(involution_suite(sys, cfg));
  rep.suites.push_back(gradient_suite(sys, cfg));
  rep.suites.push_back(hessian_suite(sys, cfg));
  rep.suites.push_back(overlap_suite(sys, cfg));
  if (sys.form.singular_factor >= 0) rep.suites.push_back(z_rank_suite(sys, cfg));
  rep.passed = std::all_of(rep.suites.begin(), rep.suites.end(), [](const SuiteResult& s) { return s.passed; });
  return rep;
}

}  // namespace bsemitoric
