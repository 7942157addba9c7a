#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bsemitoric/cli.hpp"
#include "bsemitoric/error.hpp"
#include "bsemitoric/report.hpp"

namespace py = pybind11;
using namespace bsemitoric;

namespace {

SystemDef system_from(const std::string& name, double rho1, double rho2, double R1, double R2, double t) {
  const auto id = parse_system(name);
  if (!id) throw Error(ErrorKind::BadParams, "unknown system '" + name + "'");
  return make_system(*id, SystemParams{rho1, rho2, R1, R2, t});
}

Point point_from(const SystemDef& sys, const std::string& chart, const std::array<double, 4>& c) {
  const auto id = parse_chart(sys.manifold(), chart);
  if (!id) throw Error(ErrorKind::ChartDomain, "unknown chart '" + chart + "'");
  return make_point(*id, Vec4(c[0], c[1], c[2], c[3]));
}

Which which_from(const std::string& w) {
  if (w == "L") return Which::L;
  if (w == "H") return Which::H;
  throw Error(ErrorKind::BadParams, "which must be 'L' or 'H'");
}

// Reports are returned as JSON text and decoded on the Python side, so both
// front ends share one serialization.
std::string dump(const Json& j) { return j.dump(); }

py::array_t<double> coords_array(const std::vector<Point>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{4}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < 4; ++k) m(i, k) = pts[i].coords[k];
  }
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of bsemitoric";
  m.attr("__version__") = kToolVersion;

  // Library errors surface as bsemitoric.Error with the failure kind attached.
  static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<SystemDef>(m, "System")
      .def(py::init(&system_from), py::arg("name"), py::arg("rho1") = 1.0, py::arg("rho2") = 1.0,
           py::arg("R1") = 1.0, py::arg("R2") = 2.0, py::arg("t") = 0.5)
      .def_property_readonly("name", [](const SystemDef& s) { return std::string(system_name(s.id)); })
      .def_property_readonly("params", [](const SystemDef& s) { return dump(params_json(s.id, s.params)); })
      .def_property_readonly("charts", [](const SystemDef& s) {
        std::vector<std::string> out;
        for (const auto& c : s.charts()) out.push_back(chart_label(c));
        return out;
      })
      .def_property_readonly("singular_factor", [](const SystemDef& s) { return s.form.singular_factor; })
      .def("eval_F", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        const MomentumValue F = eval_F(s, point_from(s, chart, c));
        return std::make_pair(F.L, F.H);
      }, py::arg("chart"), py::arg("coords"))
      .def("eval_dF", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        return Eigen::MatrixXd(eval_dF(s, point_from(s, chart, c)));
      }, py::arg("chart"), py::arg("coords"))
      .def("omega", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        return Eigen::MatrixXd(omega_bframe(s, point_from(s, chart, c)).entries);
      }, py::arg("chart"), py::arg("coords"))
      .def("z_value", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        return z_value(s, point_from(s, chart, c));
      }, py::arg("chart"), py::arg("coords"))
      .def("poisson_bracket", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        return poisson_bracket(s, point_from(s, chart, c));
      }, py::arg("chart"), py::arg("coords"))
      .def("hamiltonian_field", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c,
                                   const std::string& which) {
        return Eigen::VectorXd(hamiltonian_field(s, point_from(s, chart, c), which_from(which)));
      }, py::arg("chart"), py::arg("coords"), py::arg("which"))
      .def("rank", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
        const RankResult r = rank_at(s, point_from(s, chart, c));
        py::dict d;
        d["rank"] = r.rank;
        d["singular_values"] = r.singular_values;
        d["mu"] = r.mu ? py::cast(*r.mu) : py::none();
        return d;
      }, py::arg("chart"), py::arg("coords"));

  m.def("to_chart", [](const std::string& system, const std::string& chart, std::array<double, 4> c,
                       const std::string& target) {
    const SystemDef s = system_from(system, 1, 1, 1, 2, 0.5);
    const auto t = parse_chart(s.manifold(), target);
    if (!t) throw Error(ErrorKind::ChartDomain, "unknown chart '" + target + "'");
    const Point q = to_chart(point_from(s, chart, c), *t);
    return std::array<double, 4>{q.coords[0], q.coords[1], q.coords[2], q.coords[3]};
  }, py::arg("system"), py::arg("chart"), py::arg("coords"), py::arg("target"));

  m.def("t_critical", [](double R1, double R2) {
    const CriticalCouplings c = t_critical(R1, R2);
    return std::make_pair(c.t_minus, c.t_plus);
  }, py::arg("R1"), py::arg("R2"));

  m.def("_classify", [](const SystemDef& s, bool grid_scan, int grid) {
    FixedPointSearch search;
    search.grid_scan = grid_scan;
    search.grid = grid;
    py::gil_scoped_release release;
    return dump(classification_json(s, classify_system(s, search), search));
  }, py::arg("system"), py::arg("grid_scan") = true, py::arg("grid") = 32);

  m.def("_tsweep", [](const std::string& name, double R1, double R2, int steps) {
    const SystemDef s = system_from(name, 1, 1, R1, R2, 0.5);
    py::gil_scoped_release release;
    return dump(tsweep_json(tsweep(s.id, R1, R2, steps), steps));
  }, py::arg("name"), py::arg("R1") = 1.0, py::arg("R2") = 2.0, py::arg("steps") = 101);

  m.def("_verify", [](const SystemDef& s, std::uint64_t seed, long points) {
    VerifyConfig cfg;
    cfg.seed = seed;
    cfg.points_per_chart = points;
    py::gil_scoped_release release;
    return dump(verify_json(s, verify_system(s, cfg)));
  }, py::arg("system"), py::arg("seed") = 20240521, py::arg("points") = 1000);

  m.def("sample_image", [](const SystemDef& s, std::size_t n, std::uint64_t seed, std::array<double, 4> window,
                           int resolution, const std::string& subset, double z_floor, double log_fraction,
                           double plane_half_width) {
    const auto sub = parse_subset(subset);
    if (!sub) throw Error(ErrorKind::BadParams, "unknown subset '" + subset + "'");
    const ImageWindow w{window[0], window[1], window[2], window[3], resolution};
    ImageSampling sampling;
    sampling.z_floor = z_floor;
    sampling.log_fraction = log_fraction;
    sampling.plane_half_width = plane_half_width;
    std::vector<MomentumSample> samples;
    Coverage cov;
    {
      py::gil_scoped_release release;
      samples = sample_image(s, n, seed, w, *sub, sampling);
      cov = coverage(samples, w);
    }
    std::vector<double> L(n), H(n);
    std::vector<bool> clamped(n);
    for (std::size_t i = 0; i < n; ++i) {
      L[i] = samples[i].L;
      H[i] = samples[i].H;
      clamped[i] = samples[i].clamped;
    }
    py::dict d;
    d["L"] = py::array(py::cast(L));
    d["H"] = py::array(py::cast(H));
    d["clamped"] = py::array(py::cast(clamped));
    d["coverage"] = dump(coverage_json(cov));
    d["counts"] = cov.counts;
    return d;
  }, py::arg("system"), py::arg("n"), py::arg("seed") = 1,
     py::arg("window") = std::array<double, 4>{-3, 3, -3, 3}, py::arg("resolution") = 30,
     py::arg("subset") = "whole", py::arg("z_floor") = ImageSampling{}.z_floor,
     py::arg("log_fraction") = ImageSampling{}.log_fraction,
     py::arg("plane_half_width") = ImageSampling{}.plane_half_width);

  m.def("reversed_boundary", [](double z, int branch, double rho1, double rho2) {
    const MomentumValue b = reversed_boundary(SystemParams{rho1, rho2}, z, branch);
    return std::make_pair(b.L, b.H);
  }, py::arg("z"), py::arg("branch") = 1, py::arg("rho1") = 1.0, py::arg("rho2") = 1.0);

  m.def("probe_preimage", [](const SystemDef& s, double L, double H) {
    const Point p = probe_preimage(s, MomentumValue{L, H});
    return std::make_pair(chart_label(p.chart), std::array<double, 4>{p.coords[0], p.coords[1], p.coords[2], p.coords[3]});
  }, py::arg("system"), py::arg("L"), py::arg("H"));

  m.def("scan_rank1", [](const SystemDef& s, int resolution) {
    Rank1Grid grid;
    grid.resolution = resolution;
    Rank1Locus locus;
    {
      py::gil_scoped_release release;
      locus = scan_rank1(s, grid);
    }
    std::vector<Point> pts;
    std::vector<int> comp, fam;
    std::vector<std::string> charts;
    std::vector<double> mu, L, H;
    for (const auto& x : locus.samples) {
      pts.push_back(x.point);
      charts.push_back(chart_label(x.point.chart));
      comp.push_back(x.component);
      fam.push_back(x.family);
      mu.push_back(x.mu);
      L.push_back(x.image.L);
      H.push_back(x.image.H);
    }
    py::dict d;
    d["components"] = locus.components;
    d["chart"] = charts;
    d["coords"] = coords_array(pts);
    d["component"] = py::array(py::cast(comp));
    d["family"] = py::array(py::cast(fam));
    d["mu"] = py::array(py::cast(mu));
    d["L"] = py::array(py::cast(L));
    d["H"] = py::array(py::cast(H));
    return d;
  }, py::arg("system"), py::arg("resolution") = 64);

  m.def("integrate", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c,
                        const std::string& which, double t_max, const std::string& method, double step, double tol,
                        double guard) {
    IntegratorConfig cfg;
    if (method != "rk4" && method != "rk45") throw Error(ErrorKind::BadParams, "method must be 'rk4' or 'rk45'");
    cfg.method = method == "rk4" ? Method::RK4 : Method::RK45;
    cfg.step = step;
    cfg.tolerance = tol;
    cfg.z_guard = guard;
    const Point p0 = point_from(s, chart, c);
    FlowTrajectory traj;
    {
      py::gil_scoped_release release;
      traj = integrate(s, p0, which_from(which), t_max, cfg);
    }
    std::vector<Point> pts;
    std::vector<std::string> charts;
    std::vector<double> t, L, H;
    for (const auto& st : traj.states) {
      pts.push_back(st.point);
      charts.push_back(chart_label(st.point.chart));
      t.push_back(st.t);
      L.push_back(st.value.L);
      H.push_back(st.value.H);
    }
    const Conservation cons = conservation_report(traj);
    py::dict d;
    d["t"] = py::array(py::cast(t));
    d["chart"] = charts;
    d["coords"] = coords_array(pts);
    d["L"] = py::array(py::cast(L));
    d["H"] = py::array(py::cast(H));
    d["status"] = std::string(status_name(traj.status));
    d["min_abs_z"] = traj.min_abs_z;
    d["max_drift"] = std::make_pair(cons.max_drift_L, cons.max_drift_H);
    return d;
  }, py::arg("system"), py::arg("chart"), py::arg("coords"), py::arg("which") = "H", py::arg("t_max") = 10.0,
     py::arg("method") = "rk45", py::arg("step") = IntegratorConfig{}.step,
     py::arg("tol") = IntegratorConfig{}.tolerance, py::arg("guard") = IntegratorConfig{}.z_guard);

  m.def("period_check", [](const SystemDef& s, const std::string& chart, std::array<double, 4> c) {
    return period_check(s, point_from(s, chart, c));
  }, py::arg("system"), py::arg("chart"), py::arg("coords"));

  m.def("_run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
