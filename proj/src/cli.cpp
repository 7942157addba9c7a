#include "bsemitoric/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "bsemitoric/error.hpp"
#include "bsemitoric/report.hpp"

namespace bsemitoric {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string system;
  SystemParams params;
  std::string out_dir;
  std::string name;
};

struct Options {
  Common common;
  std::uint64_t seed = 0;
  long points = 1000;
  int grid = 32;
  bool no_grid_scan = false;
  int steps = 101;
  std::size_t n = 1'000'000;
  std::string subset = "whole";
  std::vector<double> window{-3.0, 3.0, -3.0, 3.0};
  int resolution = 0;
  double z_floor = ImageSampling{}.z_floor;
  std::optional<double> plane;
  std::string which = "H";
  std::string chart = "cyl";
  std::vector<double> point;
  double t_max = 10.0;
  std::string method = "rk45";
  double step = IntegratorConfig{}.step;
  double tol = IntegratorConfig{}.tolerance;
  double guard = IntegratorConfig{}.z_guard;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit status plus the files a subcommand wrote, for the manifest.
struct Outcome {
  int code = 0;
  std::string kind;
  Json files = Json::object();
  Json extra = Json::object();
};

class Session {
 public:
  Session(const Options& o, std::ostream& out) : o_(o), out_(out) {
    const auto id = parse_system(o.common.system);
    if (!id) throw UsageError("unknown system '" + o.common.system + "'");
    sys_ = make_system(*id, o.common.params);
    if (!o.common.out_dir.empty()) {
      dir_ = o.common.out_dir;
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
      dir_ = env;
    } else {
      dir_ = ".";
    }
  }

  const SystemDef& sys() const { return sys_; }

  std::string stem(const std::string& kind, const std::string& suffix = "") const {
    if (!o_.common.name.empty()) return o_.common.name;
    std::string s = kind + "_" + std::string(system_name(sys_.id));
    if (!suffix.empty()) s += "_" + suffix;
    if (!is_spin_oscillator(sys_.id) && kind != "tsweep") {
      char buf[32];
      std::snprintf(buf, sizeof buf, "_t%g", sys_.params.t);
      s += buf;
    }
    return s;
  }

  template <class Writer>
  std::string write(const std::string& file, Writer&& writer) {
    fs::create_directories(dir_);
    const fs::path path = dir_ / file;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::NumericalFailure, "cannot open " + path.string() + " for writing");
    writer(os);
    if (!os) throw Error(ErrorKind::NumericalFailure, "write to " + path.string() + " failed");
    return file;
  }

  std::string write_json(const std::string& file, const Json& j) {
    out_ << j.dump(2) << '\n';
    return write(file, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  // Merges one entry into <dir>/manifest.json, keyed by stem.
  void record(const std::string& stem, const Outcome& oc) {
    const fs::path path = dir_ / "manifest.json";
    Json manifest;
    if (std::ifstream is(path); is) {
      manifest = Json::parse(is, nullptr, false);
    }
    if (!manifest.is_object() || !manifest.contains("entries") || !manifest["entries"].is_object()) {
      manifest = Json{{"tool", kToolName}, {"version", kToolVersion}, {"entries", Json::object()}};
    }
    Json entry{{"kind", oc.kind}, {"system", system_name(sys_.id)}, {"params", params_json(sys_.id, sys_.params)},
               {"files", oc.files}};
    for (const auto& [k, v] : oc.extra.items()) entry[k] = v;
    std::map<std::string, Json> sorted;
    for (const auto& [k, v] : manifest["entries"].items()) sorted[k] = v;
    sorted[stem] = entry;
    Json entries = Json::object();
    for (auto& [k, v] : sorted) entries[k] = v;
    manifest["entries"] = entries;
    write("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  }

 private:
  const Options& o_;
  std::ostream& out_;
  SystemDef sys_;
  fs::path dir_;
};

Outcome cmd_verify(Session& s, const Options& o) {
  VerifyConfig cfg;
  cfg.seed = o.seed;
  cfg.points_per_chart = o.points;
  const VerifyReport rep = verify_system(s.sys(), cfg);
  const std::string stem = s.stem("verify");
  Outcome oc{rep.passed ? 0 : 1, "verify"};
  oc.files["report"] = s.write_json(stem + ".json", verify_json(s.sys(), rep));
  s.record(stem, oc);
  return oc;
}

Outcome cmd_classify(Session& s, const Options& o) {
  FixedPointSearch search;
  search.grid = o.grid;
  search.grid_scan = !o.no_grid_scan;
  if (search.grid < 2) throw UsageError("--grid must be at least 2");
  const ClassificationResult res = classify_system(s.sys(), search);
  const Json j = classification_json(s.sys(), res, search);
  const std::string stem = s.stem("classify");
  Outcome oc{j["diagnostics"].empty() ? 0 : 1, "classify"};
  oc.files["report"] = s.write_json(stem + ".json", j);
  oc.files["fixed"] = s.write(stem + "_fixed.csv", [&](std::ostream& os) { write_fixed_csv(os, res.reports); });
  s.record(stem, oc);
  return oc;
}

Outcome cmd_tsweep(Session& s, const Options& o) {
  if (o.steps < 2) throw UsageError("--steps must be at least 2");
  const TSweepResult res = tsweep(s.sys().id, s.sys().params.R1, s.sys().params.R2, o.steps);
  bool ok = true;
  for (const auto& t : res.transitions) ok = ok && std::abs(t.error) <= 1e-5;
  const std::string stem = s.stem("tsweep");
  Outcome oc{ok ? 0 : 1, "tsweep"};
  oc.files["report"] = s.write_json(stem + ".json", tsweep_json(res, o.steps));
  s.record(stem, oc);
  return oc;
}

Outcome cmd_image(Session& s, const Options& o) {
  const auto subset = parse_subset(o.subset);
  if (!subset) throw UsageError("unknown subset '" + o.subset + "'");
  if (o.window.size() != 4) throw UsageError("--window takes L_min,L_max,H_min,H_max");
  if (o.n == 0) throw UsageError("--n must be positive");
  ImageWindow window{o.window[0], o.window[1], o.window[2], o.window[3], o.resolution > 0 ? o.resolution : 30};
  ImageSampling sampling;
  sampling.z_floor = o.z_floor;
  // The spin oscillator with the log in L needs a wide plane to reach large |H|;
  // elsewhere a narrow plane keeps most samples inside the window.
  sampling.plane_half_width = o.plane.value_or(s.sys().id == SystemId::bCSO ? 8.0 : 3.0);
  if (!(sampling.z_floor > 0.0 && sampling.z_floor < 1e-3)) throw UsageError("--z-floor must lie in (0, 1e-3)");
  if (!(sampling.plane_half_width > 0.0)) throw UsageError("--plane must be positive");

  const auto samples = sample_image(s.sys(), o.n, o.seed, window, *subset, sampling);
  const Coverage cov = coverage(samples, window);
  FixedPointSearch analytic;
  analytic.grid_scan = false;
  const ClassificationResult fixed = classify_system(s.sys(), analytic);

  const std::string stem = s.stem("image", o.subset);
  Outcome oc{0, "image"};
  oc.files["samples"] = s.write(stem + ".csv", [&](std::ostream& os) { write_samples_csv(os, samples); });
  Json cj = provenance(s.sys(), o.seed);
  cj["n"] = o.n;
  cj["subset"] = o.subset;
  cj["sampling"] = {{"z_floor", sampling.z_floor}, {"margin", sampling.margin},
                    {"plane_half_width", sampling.plane_half_width}, {"shard_size", sampling.shard_size}};
  cj["clamped"] = std::count_if(samples.begin(), samples.end(), [](const MomentumSample& m) { return m.clamped; });
  const Json cov_json = coverage_json(cov);
  for (const auto& [k, v] : cov_json.items()) cj[k] = v;
  oc.files["coverage"] = s.write_json(stem + "_coverage.json", cj);
  oc.files["fixed"] = s.write(stem + "_fixed.csv", [&](std::ostream& os) { write_fixed_csv(os, fixed.reports); });
  if (s.sys().id == SystemId::bCSOReversed) {
    oc.files["boundary"] = s.write(stem + "_boundary.csv", [&](std::ostream& os) {
      write_boundary_csv(os, s.sys().params, 400);
    });
  }
  oc.extra = {{"subset", o.subset}, {"seed", o.seed}, {"n", o.n}};
  s.record(stem, oc);
  return oc;
}

Outcome cmd_loci(Session& s, const Options& o) {
  Rank1Grid grid;
  if (o.resolution > 0) grid.resolution = o.resolution;
  const Rank1Locus locus = scan_rank1(s.sys(), grid);
  const std::string stem = s.stem("loci");
  Outcome oc{0, "loci"};
  oc.files["samples"] = s.write(stem + ".csv", [&](std::ostream& os) { write_loci_csv(os, locus); });
  oc.files["report"] = s.write_json(stem + ".json", loci_json(s.sys(), locus, grid));
  s.record(stem, oc);
  return oc;
}

Outcome cmd_flow(Session& s, const Options& o) {
  if (o.which != "L" && o.which != "H") throw UsageError("--which takes L or H");
  if (o.method != "rk4" && o.method != "rk45") throw UsageError("--method takes rk4 or rk45");
  if (o.point.size() != 4) throw UsageError("--point takes four comma-separated coordinates");
  const auto chart = parse_chart(s.sys().manifold(), o.chart);
  if (!chart) throw UsageError("unknown chart '" + o.chart + "'");
  IntegratorConfig cfg;
  cfg.method = o.method == "rk4" ? Method::RK4 : Method::RK45;
  cfg.step = o.step;
  cfg.tolerance = o.tol;
  cfg.z_guard = o.guard;
  const Point p0 = make_point(*chart, Vec4(o.point[0], o.point[1], o.point[2], o.point[3]));
  const Which which = o.which == "L" ? Which::L : Which::H;
  const FlowTrajectory traj = integrate(s.sys(), p0, which, o.t_max, cfg);
  const std::string stem = s.stem("flow", o.which);
  Outcome oc{traj.status == FlowStatus::StepFailure ? 1 : 0, "flow"};
  oc.files["trajectory"] = s.write(stem + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  oc.files["report"] = s.write_json(stem + ".json", flow_json(s.sys(), traj, o.t_max));
  s.record(stem, oc);
  return oc;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--system", o.common.system,
                  "cso, bcso, bcsorev, cam, cam1, cam2, cam3 or cambroken")->required();
  sub->add_option("--rho1", o.common.params.rho1, "spin weight")->capture_default_str();
  sub->add_option("--rho2", o.common.params.rho2, "oscillator weight")->capture_default_str();
  sub->add_option("--R1", o.common.params.R1, "first sphere radius")->capture_default_str();
  sub->add_option("--R2", o.common.params.R2, "second sphere radius")->capture_default_str();
  sub->add_option("--t", o.common.params.t, "coupling in [0, 1]")->capture_default_str();
  sub->add_option("--out", o.common.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
  sub->add_option("--name", o.common.name, "file stem for this run");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct, verify and classify the (b-)semitoric catalogue", "bsemitoric"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* verify = app.add_subcommand("verify", "involution, gradient, overlap and Z-rank suites");
  add_common(verify, o);
  verify->add_option("--seed", o.seed, "master seed")->default_val(20240521);
  verify->add_option("--points", o.points, "random points per chart")->default_val(1000)->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "fixed points and Williamson types");
  add_common(classify, o);
  classify->add_option("--grid", o.grid, "grid points per axis for the basin scan")->default_val(32);
  classify->add_flag("--no-grid-scan", o.no_grid_scan, "refine the analytic poles only");

  auto* sweep = app.add_subcommand("tsweep", "Williamson type against the coupling t");
  add_common(sweep, o);
  sweep->add_option("--steps", o.steps, "t grid points on [0, 1]")->default_val(101);

  auto* image = app.add_subcommand("image", "momentum-map image samples and coverage");
  add_common(image, o);
  image->add_option("--n", o.n, "sample count")->default_val(1000000);
  image->add_option("--seed", o.seed, "master seed")->default_val(1);
  image->add_option("--subset", o.subset, "whole, first-factor-upper, first-factor-lower, "
                                          "second-factor-upper or second-factor-lower")->capture_default_str();
  image->add_option("--window", o.window, "L_min,L_max,H_min,H_max")->delimiter(',')->expected(4);
  image->add_option("--resolution", o.resolution, "coverage cells per axis (30)");
  image->add_option("--z-floor", o.z_floor, "smallest |z| on the singular factor")->capture_default_str();
  image->add_option("--plane", o.plane, "half width of the (u, v) box (8 for bcso, else 3)");

  auto* loci = app.add_subcommand("loci", "rank-1 locus scan");
  add_common(loci, o);
  loci->add_option("--resolution", o.resolution, "base grid points per axis (64)");

  auto* flow = app.add_subcommand("flow", "integrate X_L or X_H");
  add_common(flow, o);
  flow->add_option("--which", o.which, "L or H")->capture_default_str();
  flow->add_option("--chart", o.chart, "chart label of --point")->capture_default_str();
  flow->add_option("--point", o.point, "four chart coordinates")->delimiter(',')->expected(4)->required();
  flow->add_option("--t-max", o.t_max, "final time")->capture_default_str();
  flow->add_option("--method", o.method, "rk45 or rk4")->capture_default_str();
  flow->add_option("--step", o.step, "rk4 step, rk45 initial step")->capture_default_str();
  flow->add_option("--tol", o.tol, "rk45 tolerance")->capture_default_str();
  flow->add_option("--guard", o.guard, "stop when |z_value| drops below this")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    Session session(o, out);
    Outcome oc;
    if (verify->parsed()) oc = cmd_verify(session, o);
    if (classify->parsed()) oc = cmd_classify(session, o);
    if (sweep->parsed()) oc = cmd_tsweep(session, o);
    if (image->parsed()) oc = cmd_image(session, o);
    if (loci->parsed()) oc = cmd_loci(session, o);
    if (flow->parsed()) oc = cmd_flow(session, o);
    return oc.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::BadParams:
      case ErrorKind::NotApplicable:
      case ErrorKind::ChartDomain:
      case ErrorKind::Usage:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bsemitoric
