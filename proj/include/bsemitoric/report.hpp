#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsemitoric/classify.hpp"
#include "bsemitoric/flow.hpp"
#include "bsemitoric/imaging.hpp"
#include "bsemitoric/loci.hpp"
#include "bsemitoric/verify.hpp"

namespace bsemitoric {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "bsemitoric";
inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits, the CSV number format.
std::string format_double(double x);

/// Parameters relevant to the system family only.
Json params_json(SystemId id, const SystemParams& params);
/// Tool, version, system, parameters and (when given) seed.
Json provenance(const SystemDef& sys, std::optional<std::uint64_t> seed = std::nullopt);

Json point_json(const Point& p);
Json spectrum_json(const Spectrum& s);
Json matrix_json(const Mat4& m);

Json report_json(const FixedPointReport& r);
Json classification_json(const SystemDef& sys, const ClassificationResult& res, const FixedPointSearch& search);
Json tsweep_json(const TSweepResult& res, int steps);
Json verify_json(const SystemDef& sys, const VerifyReport& rep);
Json coverage_json(const Coverage& c);
Json flow_json(const SystemDef& sys, const FlowTrajectory& traj, double t_max);
Json loci_json(const SystemDef& sys, const Rank1Locus& locus, const Rank1Grid& grid);

/// Header `L,H,chart,subset`.
void write_samples_csv(std::ostream& os, const std::vector<MomentumSample>& samples);
/// Header `t,chart,c1,c2,c3,c4,L,H`.
void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj);
/// Header `component,family,chart,c1,c2,c3,c4,mu,L,H`.
void write_loci_csv(std::ostream& os, const Rank1Locus& locus);
/// Header `label,type,L,H`.
void write_fixed_csv(std::ostream& os, const std::vector<FixedPointReport>& reports);
/// Header `branch,z,L,H`; both branches of the reversed image boundary.
void write_boundary_csv(std::ostream& os, const SystemParams& params, int points);

}  // namespace bsemitoric
