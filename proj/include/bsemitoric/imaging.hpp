#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bsemitoric/systems.hpp"

namespace bsemitoric {

enum class Subset { Whole, FirstUpper, FirstLower, SecondUpper, SecondLower };

/// "whole", "first-factor-upper", "first-factor-lower", "second-factor-upper", "second-factor-lower".
std::string_view subset_name(Subset s);
std::optional<Subset> parse_subset(std::string_view name);

struct ImageWindow {
  double L_min = -3.0;
  double L_max = 3.0;
  double H_min = -3.0;
  double H_max = 3.0;
  int resolution = 30;
};

/// How points are drawn. Every coordinate is uniform in the cylindrical chart,
/// except that a share log_fraction of the heights on the sphere factor
/// carrying Z is drawn with log|z| uniform on [log z_floor, log(1 - margin)],
/// so the logarithmic end of L is reached at desk-scale sample counts.
struct ImageSampling {
  double z_floor = 1e-12;
  double log_fraction = 0.5;
  double margin = 1e-3;
  double plane_half_width = 8.0;
  std::size_t shard_size = 1 << 16;
};

struct MomentumSample {
  double L = 0.0;
  double H = 0.0;
  ChartId chart;
  Subset subset = Subset::Whole;
  bool clamped = false;  // true when (L, H) was moved onto the window edge
};

/// Deterministic per (seed, n, window, subset, sampling). Shard k of
/// shard_size samples uses shard_seed(seed, k). Throws BadParams for n = 0,
/// NotApplicable for second-factor subsets on S²×R².
std::vector<MomentumSample> sample_image(const SystemDef& sys, std::size_t n, std::uint64_t seed,
                                         const ImageWindow& window, Subset subset,
                                         const ImageSampling& sampling = {});

struct Coverage {
  ImageWindow window;
  int cells_hit = 0;
  int cells_total = 0;
  std::vector<long> counts;  // row-major, H index outer
};

/// Cell occupancy from unclamped samples only (clamped points would otherwise
/// fill the edge cells regardless of the true image).
Coverage coverage(const std::vector<MomentumSample>& samples, const ImageWindow& window);

/// Boundary point of the reversed system's image for 0 < z <= 1. Throws BadParams.
MomentumValue reversed_boundary(const SystemParams& params, double z, int branch);

/// Largest |H| of the reversed image over the level L >= 0.
double reversed_hmax(const SystemParams& params, double L);

/// Explicit preimage of (L, H) under the b-coupled spin-oscillator, built from
/// collinear (x, y) and (u, v). Throws NotApplicable for other systems and
/// NumericalFailure when the check eval_F(p) = target fails at 1e-9.
Point probe_preimage(const SystemDef& sys, const MomentumValue& target);

}  // namespace bsemitoric
