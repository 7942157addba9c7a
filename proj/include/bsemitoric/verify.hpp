#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsemitoric/systems.hpp"

namespace bsemitoric {

struct SuiteResult {
  std::string name;
  bool passed = true;
  long points = 0;
  long failures = 0;
  double worst = 0.0;      // largest normalized error seen
  double threshold = 0.0;  // pass bound on that error
  // Involution suite only: share of points with |{L,H}| > 1e-3.
  double fraction_large_bracket = 0.0;
};

struct VerifyConfig {
  std::uint64_t seed = 20240521;
  long points_per_chart = 1000;
  long z_points = 10000;
  double fd_step = 1e-6;
};

struct VerifyReport {
  SystemId id = SystemId::CSO;
  SystemParams params;
  VerifyConfig config;
  std::vector<SuiteResult> suites;
  bool passed = true;
};

/// |{L,H}| ≤ 1e-9·(1 + ‖dL‖‖dH‖) at points_per_chart random points in every chart.
SuiteResult involution_suite(const SystemDef& sys, const VerifyConfig& cfg = {});
/// eval_dF against central differences (step fd_step) away from Z, relative error ≤ 1e-6.
SuiteResult gradient_suite(const SystemDef& sys, const VerifyConfig& cfg = {});
/// Hessians at the poles against second differences, error ≤ 1e-5.
SuiteResult hessian_suite(const SystemDef& sys, const VerifyConfig& cfg = {});
/// eval_F agrees across every chart overlap to 1e-11.
SuiteResult overlap_suite(const SystemDef& sys, const VerifyConfig& cfg = {});
/// rank_at ≥ 1 at z_points random points of Z (b-systems only).
SuiteResult z_rank_suite(const SystemDef& sys, const VerifyConfig& cfg = {});

/// Runs every applicable suite; passed is the conjunction.
VerifyReport verify_system(const SystemDef& sys, const VerifyConfig& cfg = {});

}  // namespace bsemitoric
