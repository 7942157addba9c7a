#include "bsemitoric/report.hpp"

#include <cmath>
#include <cstdio>

namespace bsemitoric {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json params_json(SystemId id, const SystemParams& p) {
  if (is_spin_oscillator(id)) return Json{{"rho1", p.rho1}, {"rho2", p.rho2}};
  return Json{{"R1", p.R1}, {"R2", p.R2}, {"t", p.t}};
}

Json provenance(const SystemDef& sys, std::optional<std::uint64_t> seed) {
  Json j{{"tool", kToolName}, {"version", kToolVersion}, {"system", system_name(sys.id)},
         {"params", params_json(sys.id, sys.params)}};
  if (seed) j["seed"] = *seed;
  return j;
}

Json point_json(const Point& p) {
  const Ambient x = embed(p);
  return Json{{"chart", chart_label(p.chart)},
              {"coords", {p.coords[0], p.coords[1], p.coords[2], p.coords[3]}},
              {"ambient", {x[0], x[1], x[2], x[3], x[4], x[5]}}};
}

Json spectrum_json(const Spectrum& s) {
  Json out = Json::array();
  for (const auto& l : s) out.push_back({l.real(), l.imag()});
  return out;
}

Json matrix_json(const Mat4& m) {
  Json out = Json::array();
  for (int i = 0; i < 4; ++i) out.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
  return out;
}

Json report_json(const FixedPointReport& r) {
  Json j{{"label", r.label}, {"point", point_json(r.point)}, {"type", type_name(r.type)},
         {"degenerate", r.degenerate}};
  j["pencil"] = r.degenerate ? Json(nullptr) : Json{r.pencil.c1, r.pencil.c2};
  j["spectrum"] = r.degenerate ? Json(nullptr) : spectrum_json(r.pencil.spectrum);
  j["min_gap"] = r.pencil.min_gap;
  j["min_gap_pencil11"] = r.min_gap_pencil11;
  j["admissible_pencils"] = r.admissible_count;
  j["agreeing_pencils"] = r.agreeing_count;
  j["A_L"] = matrix_json(r.A_L);
  j["A_H"] = matrix_json(r.A_H);
  j["residual"] = r.residual;
  j["z_value"] = r.z_value;
  j["image"] = {{"L", r.image.L}, {"H", r.image.H}};
  return j;
}

Json classification_json(const SystemDef& sys, const ClassificationResult& res, const FixedPointSearch& search) {
  Json j = provenance(sys);
  j["tolerances"] = {{"fixed_point", kFixedPointTolerance},
                     {"pencil_gap", kPencilGapTolerance},
                     {"williamson", kWilliamsonTolerance}};
  j["search"] = {{"grid_scan", search.grid_scan},
                 {"grid", search.grid},
                 {"grid_points", res.fixed_points.grid_points},
                 {"analytic", res.fixed_points.analytic},
                 {"extra", res.fixed_points.extra}};
  Json fps = Json::array();
  Json diagnostics = Json::array();
  for (const auto& r : res.reports) {
    fps.push_back(report_json(r));
    if (r.type == WilliamsonType::EllipticHyperbolic || r.type == WilliamsonType::HyperbolicHyperbolic) {
      diagnostics.push_back("NotSemitoric: " + r.label + " is " + std::string(type_name(r.type)));
    }
  }
  j["fixed_points"] = fps;
  j["diagnostics"] = diagnostics;
  return j;
}

Json tsweep_json(const TSweepResult& res, int steps) {
  Json j{{"tool", kToolName}, {"version", kToolVersion}, {"system", system_name(res.id)},
         {"params", {{"R1", res.R1}, {"R2", res.R2}}}, {"steps", steps}};
  j["t_critical"] = {{"t_minus", res.critical.t_minus}, {"t_plus", res.critical.t_plus}};
  j["tolerances"] = {{"bisection", 1e-12}, {"formula_agreement", 1e-5}};
  Json poles = Json::array();
  for (const auto& e : kDoublePoles) poles.push_back(pole_label(pole(Manifold::SphereTimesSphere, e[0], e[1])));
  j["poles"] = poles;
  Json rows = Json::array();
  for (const auto& r : res.rows) {
    Json types = Json::array(), disc = Json::array();
    for (int k = 0; k < 4; ++k) {
      types.push_back(type_name(r.types[k]));
      disc.push_back(r.discriminant[k]);
    }
    rows.push_back({{"t", r.t}, {"types", types}, {"discriminant", disc}});
  }
  j["rows"] = rows;
  Json tr = Json::array();
  for (const auto& t : res.transitions) {
    tr.push_back({{"pole", t.pole}, {"t", t.t}, {"formula", t.formula}, {"error", t.error}});
  }
  j["transitions"] = tr;
  return j;
}

Json verify_json(const SystemDef& sys, const VerifyReport& rep) {
  Json j = provenance(sys, rep.config.seed);
  j["config"] = {{"points_per_chart", rep.config.points_per_chart},
                 {"z_points", rep.config.z_points},
                 {"fd_step", rep.config.fd_step}};
  Json suites = Json::array();
  for (const auto& s : rep.suites) {
    Json e{{"name", s.name}, {"passed", s.passed}, {"points", s.points}, {"failures", s.failures},
           {"worst", s.worst}, {"threshold", s.threshold}};
    if (s.name == "involution") e["fraction_bracket_above_1e-3"] = s.fraction_large_bracket;
    suites.push_back(e);
  }
  j["suites"] = suites;
  j["passed"] = rep.passed;
  return j;
}

Json coverage_json(const Coverage& c) {
  return Json{{"window", {{"L", {c.window.L_min, c.window.L_max}}, {"H", {c.window.H_min, c.window.H_max}}}},
              {"resolution", c.window.resolution},
              {"cells_hit", c.cells_hit},
              {"cells_total", c.cells_total}};
}

Json flow_json(const SystemDef& sys, const FlowTrajectory& traj, double t_max) {
  const Conservation c = conservation_report(traj);
  Json j = provenance(sys);
  j["which"] = traj.which == Which::L ? "L" : "H";
  j["t_max"] = t_max;
  j["integrator"] = {{"method", traj.config.method == Method::RK4 ? "rk4" : "rk45"},
                     {"step", traj.config.step},
                     {"tolerance", traj.config.tolerance},
                     {"switch_margin", traj.config.switch_margin}};
  j["z_guard"] = {{"policy", "truncate and flag when |z_value| < guard"}, {"guard", traj.config.z_guard}};
  j["status"] = status_name(traj.status);
  j["steps"] = traj.states.empty() ? 0 : traj.states.size() - 1;
  j["t_end"] = traj.states.empty() ? 0.0 : traj.states.back().t;
  j["min_abs_z"] = traj.min_abs_z;
  j["max_drift"] = {{"L", c.max_drift_L}, {"H", c.max_drift_H}};
  return j;
}

Json loci_json(const SystemDef& sys, const Rank1Locus& locus, const Rank1Grid& grid) {
  Json j = provenance(sys);
  j["grid"] = {{"resolution", grid.resolution}, {"margin", grid.margin},
               {"plane_half_width", grid.plane_half_width}, {"seeds_per_axis", grid.seeds_per_axis}};
  j["rank_tolerance"] = kRankTolerance;
  j["samples"] = locus.samples.size();
  j["components"] = locus.components;
  return j;
}

void write_samples_csv(std::ostream& os, const std::vector<MomentumSample>& samples) {
  os << "L,H,chart,subset\n";
  for (const auto& s : samples) {
    os << format_double(s.L) << ',' << format_double(s.H) << ',' << chart_label(s.chart) << ','
       << subset_name(s.subset) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj) {
  os << "t,chart,c1,c2,c3,c4,L,H\n";
  for (const auto& s : traj.states) {
    os << format_double(s.t) << ',' << chart_label(s.point.chart);
    for (int i = 0; i < 4; ++i) os << ',' << format_double(s.point.coords[i]);
    os << ',' << format_double(s.value.L) << ',' << format_double(s.value.H) << '\n';
  }
}

void write_loci_csv(std::ostream& os, const Rank1Locus& locus) {
  os << "component,family,chart,c1,c2,c3,c4,mu,L,H\n";
  for (const auto& s : locus.samples) {
    os << s.component << ',' << s.family << ',' << chart_label(s.point.chart);
    for (int i = 0; i < 4; ++i) os << ',' << format_double(s.point.coords[i]);
    os << ',' << format_double(s.mu) << ',' << format_double(s.image.L) << ',' << format_double(s.image.H) << '\n';
  }
}

void write_fixed_csv(std::ostream& os, const std::vector<FixedPointReport>& reports) {
  os << "label,type,L,H\n";
  for (const auto& r : reports) {
    os << r.label << ',' << type_name(r.type) << ',' << format_double(r.image.L) << ','
       << format_double(r.image.H) << '\n';
  }
}

void write_boundary_csv(std::ostream& os, const SystemParams& params, int points) {
  os << "branch,z,L,H\n";
  // Geometric spacing in z reaches far along the logarithmic end.
  for (int branch : {1, -1}) {
    for (int k = 0; k < points; ++k) {
      const double z = std::pow(1e-3, static_cast<double>(k) / (points - 1));
      const MomentumValue b = reversed_boundary(params, z, branch);
      os << branch << ',' << format_double(z) << ',' << format_double(b.L) << ',' << format_double(b.H) << '\n';
    }
  }
}

}  // namespace bsemitoric
