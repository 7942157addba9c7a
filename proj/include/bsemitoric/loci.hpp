#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bsemitoric/systems.hpp"

namespace bsemitoric {

struct RankResult {
  int rank = 0;
  std::array<double, 2> singular_values{};
  std::optional<double> mu;  // μ with μ dL + dH ≈ 0 when rank = 1 and dL ≠ 0
};

inline constexpr double kRankTolerance = 1e-8;

/// Rank of the b-frame Jacobian (dL; dH) by singular-value thresholding.
RankResult rank_at(const SystemDef& sys, const Point& p);

/// Point of the reversed system's rank-1 locus over (θ, z) on the given branch
/// (±1), in the cylindrical chart. Throws BadParams for z = 0 or |z| >= 1.
Point reversed_rank1_analytic(const SystemParams& params, double theta, double z, int branch);

/// Family 1..4 of a reversed rank-1 point: (z>0, +), (z>0, −), (z<0, +), (z<0, −).
int reversed_family(const Point& p);

/// Chart distance from p (cylindrical chart) to the analytic locus point with the same (θ, z, branch).
double reversed_locus_deviation(const SystemParams& params, const Point& p);

struct Rank1Grid {
  int resolution = 64;             // base grid points per axis
  double margin = 1e-3;            // kept from |z| = 1
  double plane_half_width = 4.0;   // (u, v) seed box
  int seeds_per_axis = 3;          // fiber seeds per coordinate
};

struct Rank1Sample {
  Point point;
  int component = 0;
  int family = 0;  // reversed system only, else 0
  double mu = 0.0;
  MomentumValue image;
};

struct Rank1Locus {
  std::vector<Rank1Sample> samples;
  int components = 0;
};

/// Solves μ dL + dH = 0 over a (θ, z) grid of the first sphere factor, with the
/// fiber coordinates and μ as Newton unknowns, then links neighbouring grid
/// solutions by continuation to count connected components. Throws BadParams
/// for resolution below 16.
Rank1Locus scan_rank1(const SystemDef& sys, const Rank1Grid& grid = {});

}  // namespace bsemitoric
