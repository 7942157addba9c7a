#include "bsemitoric/loci.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/SVD>

#include "bsemitoric/error.hpp"

namespace bsemitoric {

RankResult rank_at(const SystemDef& sys, const Point& p) {
  const Mat24 dF = eval_dF(sys, p);
  Eigen::JacobiSVD<Mat24> svd(dF);
  const auto sv = svd.singularValues();
  RankResult out;
  out.singular_values = {sv[0], sv[1]};
  const double tol = kRankTolerance * (sv[0] + 1.0);
  out.rank = (sv[0] > tol ? 1 : 0) + (sv[1] > tol ? 1 : 0);
  if (out.rank == 1) {
    const Vec4 dL = dF.row(0).transpose();
    const Vec4 dH = dF.row(1).transpose();
    const double nL = dL.squaredNorm();
    if (nL > tol * tol) out.mu = -dL.dot(dH) / nL;
  }
  return out;
}

Point reversed_rank1_analytic(const SystemParams& params, double theta, double z, int branch) {
  if (!(z != 0.0 && std::abs(z) < 1.0) || !std::isfinite(theta)) {
    throw Error(ErrorKind::BadParams, "the reversed rank-1 locus needs 0 < |z| < 1");
  }
  if (!(params.rho1 > 0.0) || !(params.rho2 > 0.0)) throw Error(ErrorKind::BadParams, "rho must be positive");
  const double k = (branch >= 0 ? 1.0 : -1.0) * std::sqrt(params.rho1 / params.rho2) *
                   std::sqrt(1.0 - z * z) / z;
  return make_point(ChartId::cylindrical(Manifold::SphereTimesPlane),
                    Vec4(theta, z, k * std::cos(theta), k * std::sin(theta)));
}

namespace {

int reversed_branch(const Point& p) {
  const double th = p.coords[0], z = p.coords[1];
  const double radial = p.coords[2] * std::cos(th) + p.coords[3] * std::sin(th);
  return radial / z >= 0.0 ? 1 : -1;
}

}  // namespace

int reversed_family(const Point& p) {
  const Point q = to_chart(p, ChartId::cylindrical(Manifold::SphereTimesPlane));
  const int b = reversed_branch(q);
  if (q.coords[1] > 0.0) return b > 0 ? 1 : 2;
  return b > 0 ? 3 : 4;
}

double reversed_locus_deviation(const SystemParams& params, const Point& p) {
  const Point q = to_chart(p, ChartId::cylindrical(Manifold::SphereTimesPlane));
  const Point a = reversed_rank1_analytic(params, q.coords[0], q.coords[1], reversed_branch(q));
  return chart_distance(q, a);
}

namespace {

struct FiberSolution {
  Vec4 coords;
  double mu = 0.0;
};

using Mat43 = Eigen::Matrix<double, 4, 3>;

double residual_tolerance(const Vec4& dH) { return 1e-12 * std::max(1.0, dH.norm()); }

// Gauss-Newton in (fiber coordinates, μ) with the first-factor (θ, z) held fixed.
std::optional<FiberSolution> solve_fiber(const SystemDef& sys, const ChartId& chart, Vec4 q, double mu) {
  if (!in_domain(chart, q)) return std::nullopt;
  auto residual = [&](const Vec4& c, double m, Vec4& dH) {
    const Mat24 dF = eval_dF(sys, Point{chart, c});
    dH = dF.row(1).transpose();
    return Vec4(m * dF.row(0).transpose() + dH);
  };
  Vec4 dH;
  Vec4 r = residual(q, mu, dH);
  for (int it = 0; it < 40; ++it) {
    if (r.norm() <= residual_tolerance(dH)) {
      return FiberSolution{q, mu};
    }
    const Point p{chart, q};
    const Mat4 DL = frame_gradient_jacobian(sys, sys.L, p);
    const Mat4 DH = frame_gradient_jacobian(sys, sys.H, p);
    const Vec4 dL = frame_gradient(sys, sys.L, p);
    Mat43 J;
    J.col(0) = mu * DL.col(2) + DH.col(2);
    J.col(1) = mu * DL.col(3) + DH.col(3);
    J.col(2) = dL;
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double scale = 1.0;
    bool moved = false;
    for (int k = 0; k < 12; ++k, scale *= 0.5) {
      Vec4 qt = q;
      qt[2] += scale * step[0];
      qt[3] += scale * step[1];
      if (!in_domain(chart, qt)) continue;
      const double mt = mu + scale * step[2];
      Vec4 dHt;
      const Vec4 rt = residual(qt, mt, dHt);
      if (rt.norm() < r.norm()) {
        q = qt;
        mu = mt;
        r = rt;
        dH = dHt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (r.norm() <= residual_tolerance(dH)) return FiberSolution{q, mu};
  return std::nullopt;
}

std::vector<ChartId> fiber_charts(Manifold m) {
  if (m == Manifold::SphereTimesPlane) return {ChartId::cylindrical(m)};
  const FactorChart cyl{ChartKind::Cylindrical, 1};
  return {ChartId::mixed(cyl, cyl), ChartId::mixed(cyl, {ChartKind::Cartesian, 1}),
          ChartId::mixed(cyl, {ChartKind::Cartesian, -1})};
}

std::vector<std::array<double, 2>> fiber_seeds(const ChartId& chart, double theta, const Rank1Grid& g) {
  std::vector<std::array<double, 2>> seeds;
  const int k = std::max(2, g.seeds_per_axis);
  auto lin = [k](double lo, double hi, int i) { return lo + (hi - lo) * i / (k - 1); };
  if (chart.manifold == Manifold::SphereTimesPlane) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) seeds.push_back({lin(-g.plane_half_width, g.plane_half_width, i),
                                                   lin(-g.plane_half_width, g.plane_half_width, j)});
    }
  } else if (chart.second.kind == ChartKind::Cylindrical) {
    for (int a = 0; a < 4; ++a) {
      for (int j = 0; j < k; ++j) seeds.push_back({theta + a * std::numbers::pi / 2.0, lin(-0.9, 0.9, j)});
    }
  } else {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) seeds.push_back({lin(-0.7, 0.7, i), lin(-0.7, 0.7, j)});
    }
  }
  return seeds;
}

struct Node {
  int i = 0;  // θ index
  int j = 0;  // z index
  Point point;
  double mu = 0.0;
};

// A continuation link is kept only when the solution at the midpoint of the
// base step lies near the chord between the two ends; this rejects jumps over
// stretches where the locus escapes to infinity (e.g. across Z).
bool midpoint_consistent(const SystemDef& sys, const Node& a, const FiberSolution& b, double dtheta,
                         double dz) {
  dtheta = std::remainder(dtheta, 2.0 * std::numbers::pi);
  Vec4 q = 0.5 * (a.point.coords + b.coords);
  q[0] = a.point.coords[0] + 0.5 * dtheta;
  q[1] = a.point.coords[1] + 0.5 * dz;
  if (a.point.chart.second.kind == ChartKind::Cylindrical &&
      a.point.chart.manifold == Manifold::SphereTimesSphere) {
    q[2] = a.point.coords[2] + 0.5 * std::remainder(b.coords[2] - a.point.coords[2], 2.0 * std::numbers::pi);
  }
  auto m = solve_fiber(sys, a.point.chart, q, 0.5 * (a.mu + b.mu));
  if (!m) return false;
  const Ambient xa = embed(a.point);
  const Ambient xb = embed(Point{a.point.chart, b.coords});
  const Ambient xm = embed(Point{a.point.chart, m->coords});
  return (xm - 0.5 * (xa + xb)).norm() <= 0.5 * (xa - xb).norm() + 1e-8;
}

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

}  // namespace

Rank1Locus scan_rank1(const SystemDef& sys, const Rank1Grid& grid) {
  if (grid.resolution < 16) throw Error(ErrorKind::BadParams, "rank-1 scan resolution must be at least 16");
  const int n = grid.resolution;
  std::vector<double> thetas(n), zs(n);
  for (int i = 0; i < n; ++i) thetas[i] = 2.0 * std::numbers::pi * i / n;
  for (int j = 0; j < n; ++j) zs[j] = -1.0 + grid.margin + (2.0 - 2.0 * grid.margin) * j / (n - 1);

  std::vector<Node> nodes;
  std::map<std::pair<int, int>, std::vector<int>> by_cell;
  auto accept = [&](int i, int j, const ChartId& chart, const FiberSolution& s) {
    const Point p = make_point(chart, s.coords);
    if (sys.form.singular_factor >= 0 && z_value(sys, p) == 0.0) return;
    if (rank_at(sys, p).rank != 1) return;
    const Ambient x = embed(p);
    auto& cell = by_cell[{i, j}];
    for (int idx : cell) {
      if ((embed(nodes[idx].point) - x).norm() < 1e-7) return;
    }
    cell.push_back(static_cast<int>(nodes.size()));
    nodes.push_back(Node{i, j, p, s.mu});
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (const ChartId& chart : fiber_charts(sys.manifold())) {
        for (const auto& seed : fiber_seeds(chart, thetas[i], grid)) {
          Vec4 q(thetas[i], zs[j], seed[0], seed[1]);
          if (!in_domain(chart, q)) continue;
          const Point p{chart, q};
          if (sys.form.singular_factor >= 0 && z_value(sys, p) == 0.0) continue;
          const Mat24 dF = eval_dF(sys, p);
          const double nL = dF.row(0).squaredNorm();
          const double mu0 = nL > 0.0 ? -dF.row(0).dot(dF.row(1)) / nL : 0.0;
          if (auto s = solve_fiber(sys, chart, q, mu0)) accept(i, j, chart, *s);
        }
      }
    }
  }

  // Continuation links between neighbouring cells.
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const Node& nd = nodes[a];
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int i2 = (nd.i + di + n) % n;
        const int j2 = nd.j + dj;
        if (j2 < 0 || j2 >= n) continue;
        auto it = by_cell.find({i2, j2});
        if (it == by_cell.end()) continue;
        Vec4 q = nd.point.coords;
        q[0] = thetas[i2];
        q[1] = zs[j2];
        auto s = solve_fiber(sys, nd.point.chart, q, nd.mu);
        if (!s) continue;
        const Ambient x = embed(Point{nd.point.chart, s->coords});
        for (int b : it->second) {
          if ((embed(nodes[b].point) - x).norm() >= 1e-6) continue;
          if (!midpoint_consistent(sys, nd, *s, thetas[i2] - thetas[nd.i], zs[j2] - zs[nd.j])) continue;
          parent[find_root(parent, static_cast<int>(a))] = find_root(parent, b);
        }
      }
    }
  }

  Rank1Locus out;
  std::map<int, int> label;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const int root = find_root(parent, static_cast<int>(a));
    if (!label.count(root)) {
      const int next = static_cast<int>(label.size()) + 1;
      label[root] = next;
    }
  }
  out.components = static_cast<int>(label.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    Rank1Sample s;
    s.point = nodes[a].point;
    s.component = label[find_root(parent, static_cast<int>(a))];
    s.family = sys.id == SystemId::bCSOReversed ? reversed_family(s.point) : 0;
    s.mu = nodes[a].mu;
    s.image = eval_F(sys, s.point);
    out.samples.push_back(s);
  }
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const Rank1Sample& a, const Rank1Sample& b) { return a.component < b.component; });
  return out;
}

}  // namespace bsemitoric
