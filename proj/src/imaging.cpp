#include "bsemitoric/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "bsemitoric/error.hpp"
#include "bsemitoric/sampling.hpp"

namespace bsemitoric {

namespace {

constexpr std::array<std::string_view, 5> kSubsetNames{"whole", "first-factor-upper", "first-factor-lower",
                                                       "second-factor-upper", "second-factor-lower"};

// Root of a monotone function on [lo, hi] to full double precision.
template <class F>
double solve_monotone(F f, double lo, double hi) {
  boost::uintmax_t iters = 300;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 300) throw Error(ErrorKind::NumericalFailure, "1-D root solve did not converge");
  return 0.5 * (r.first + r.second);
}

}  // namespace

std::string_view subset_name(Subset s) { return kSubsetNames[static_cast<int>(s)]; }

std::optional<Subset> parse_subset(std::string_view name) {
  for (std::size_t i = 0; i < kSubsetNames.size(); ++i) {
    if (kSubsetNames[i] == name) return static_cast<Subset>(i);
  }
  return std::nullopt;
}

std::vector<MomentumSample> sample_image(const SystemDef& sys, std::size_t n, std::uint64_t seed,
                                         const ImageWindow& window, Subset subset,
                                         const ImageSampling& sampling) {
  if (n == 0) throw Error(ErrorKind::BadParams, "sample count must be positive");
  if (!(sampling.log_fraction >= 0.0 && sampling.log_fraction <= 1.0)) {
    throw Error(ErrorKind::BadParams, "log_fraction must lie in [0, 1]");
  }
  if (!(window.L_min < window.L_max) || !(window.H_min < window.H_max)) {
    throw Error(ErrorKind::BadParams, "image window must be nonempty");
  }
  const bool two_spheres = sys.manifold() == Manifold::SphereTimesSphere;
  if (!two_spheres && (subset == Subset::SecondUpper || subset == Subset::SecondLower)) {
    throw Error(ErrorKind::NotApplicable, "second-factor subsets need two sphere factors");
  }
  const ChartId chart = ChartId::cylindrical(sys.manifold());
  const double top = 1.0 - sampling.margin;
  const double log_lo = std::log(sampling.z_floor), log_hi = std::log(top);
  const int zf = sys.form.singular_factor;

  auto forced_sign = [&](int factor) {
    if (factor == 0 && subset == Subset::FirstUpper) return 1;
    if (factor == 0 && subset == Subset::FirstLower) return -1;
    if (factor == 1 && subset == Subset::SecondUpper) return 1;
    if (factor == 1 && subset == Subset::SecondLower) return -1;
    return 0;
  };
  auto draw_height = [&](Rng& rng, int factor) {
    const int forced = forced_sign(factor);
    if (factor == zf && rng.uniform() < sampling.log_fraction) {
      const double mag = std::exp(rng.uniform(log_lo, log_hi));
      const int s = rng.sign();
      return (forced != 0 ? forced : s) * mag;
    }
    double z = rng.uniform(-top, top);
    while (factor == zf && std::abs(z) < sampling.z_floor) z = rng.uniform(-top, top);
    if (forced != 0) z = forced * std::abs(z);
    return z;
  };

  std::vector<MomentumSample> out;
  out.reserve(n);
  for (std::size_t shard = 0; out.size() < n; ++shard) {
    Rng rng(shard_seed(seed, shard));
    const std::size_t count = std::min(sampling.shard_size, n - out.size());
    for (std::size_t k = 0; k < count; ++k) {
      Vec4 q;
      q[0] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      q[1] = draw_height(rng, 0);
      if (two_spheres) {
        q[2] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        q[3] = draw_height(rng, 1);
      } else {
        q[2] = rng.uniform(-sampling.plane_half_width, sampling.plane_half_width);
        q[3] = rng.uniform(-sampling.plane_half_width, sampling.plane_half_width);
      }
      const MomentumValue F = eval_F(sys, make_point(chart, q));
      MomentumSample s;
      s.L = std::clamp(F.L, window.L_min, window.L_max);
      s.H = std::clamp(F.H, window.H_min, window.H_max);
      s.clamped = s.L != F.L || s.H != F.H;
      s.chart = chart;
      s.subset = subset;
      out.push_back(s);
    }
  }
  return out;
}

Coverage coverage(const std::vector<MomentumSample>& samples, const ImageWindow& window) {
  Coverage c;
  c.window = window;
  const int r = window.resolution;
  c.cells_total = r * r;
  c.counts.assign(static_cast<std::size_t>(c.cells_total), 0);
  for (const auto& s : samples) {
    if (s.clamped) continue;
    const int i = std::min(r - 1, static_cast<int>((s.L - window.L_min) / (window.L_max - window.L_min) * r));
    const int j = std::min(r - 1, static_cast<int>((s.H - window.H_min) / (window.H_max - window.H_min) * r));
    if (i < 0 || j < 0) continue;
    ++c.counts[static_cast<std::size_t>(j) * r + i];
  }
  c.cells_hit = static_cast<int>(std::count_if(c.counts.begin(), c.counts.end(), [](long k) { return k > 0; }));
  return c;
}

MomentumValue reversed_boundary(const SystemParams& params, double z, int branch) {
  if (!(z > 0.0 && z <= 1.0)) throw Error(ErrorKind::BadParams, "boundary parameter z must lie in (0, 1]");
  if (!(params.rho1 > 0.0) || !(params.rho2 > 0.0)) throw Error(ErrorKind::BadParams, "rho must be positive");
  const double r1 = params.rho1;
  const double w = 1.0 - z * z;
  return {-r1 * std::log(z) + r1 * w / (2.0 * z * z),
          (branch >= 0 ? 1.0 : -1.0) * std::sqrt(r1 / params.rho2) * w / (2.0 * z)};
}

double reversed_hmax(const SystemParams& params, double L) {
  if (L <= 0.0) return 0.0;
  // The boundary L(z) decreases from +∞ to 0 on (0, 1]; solve in w = -log z.
  auto f = [&](double w) { return reversed_boundary(params, std::exp(-w), 1).L - L; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  const double z = std::exp(-solve_monotone(f, 0.0, hi));
  return reversed_boundary(params, z, 1).H;
}

Point probe_preimage(const SystemDef& sys, const MomentumValue& target) {
  if (sys.id != SystemId::bCSO) throw Error(ErrorKind::NotApplicable, "explicit preimages exist for bcso only");
  const double r1 = sys.params.rho1, r2 = sys.params.rho2;
  const double ell = target.L, h = std::abs(target.H);
  const double sign = target.H < 0.0 ? -1.0 : 1.0;

  // (x, y) = (s, 0) and (u, v) = (±N, 0) give H = ±sN/2 and L = ρ₁ log z + ρ₂ N²/2.
  double z = 1.0, N = 0.0;
  if (ell >= 0.0) {
    auto N_of = [&](double w) { return std::sqrt(2.0 * (ell + r1 * w) / r2); };
    auto g = [&](double w) { return std::sqrt(-std::expm1(-2.0 * w)) * N_of(w) / 2.0 - h; };
    double w = 0.0;
    if (h > 0.0) {
      double hi = 1.0;
      while (g(hi) < 0.0) hi *= 2.0;
      w = solve_monotone(g, 0.0, hi);
    }
    z = std::exp(-w);
    N = N_of(w);
  } else {
    auto z_of = [&](double n) { return std::exp((ell - r2 * n * n / 2.0) / r1); };
    auto g = [&](double n) {
      const double zz = z_of(n);
      return std::sqrt(1.0 - zz * zz) * n / 2.0 - h;
    };
    if (h > 0.0) {
      double hi = 1.0;
      while (g(hi) < 0.0) hi *= 2.0;
      N = solve_monotone(g, 0.0, hi);
    }
    z = z_of(N);
  }

  Point p;
  if (z >= 0.5) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    p = make_point(ChartId::cartesian(Manifold::SphereTimesPlane, 1), Vec4(s, 0.0, sign * N, 0.0));
  } else {
    p = make_point(ChartId::cylindrical(Manifold::SphereTimesPlane), Vec4(0.0, z, sign * N, 0.0));
  }
  const MomentumValue F = eval_F(sys, p);
  const double err = std::hypot(F.L - target.L, F.H - target.H);
  if (!(err <= 1e-9 * std::max(1.0, std::hypot(target.L, target.H)))) {
    throw Error(ErrorKind::NumericalFailure, "preimage residual " + std::to_string(err));
  }
  return p;
}

}  // namespace bsemitoric
