// Python bindings for the banding library: scalar special functions, the
// monotone step-function type with its generalized inverses, the shape
// operators, weighted empirical distribution functions, a two-sample band
// pipeline, and the Monte Carlo study driver.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantband/bandcalc.hpp"
#include "quantband/core.hpp"
#include "quantband/errors.hpp"
#include "quantband/estimate.hpp"
#include "quantband/resample.hpp"
#include "quantband/shape.hpp"
#include "quantband/simlab.hpp"
#include "quantband/special.hpp"

namespace py = pybind11;
using namespace quantband;

namespace {

Grid make_grid(std::vector<double> points, std::optional<double> domain_sup) {
  return Grid(std::move(points), domain_sup);
}

py::dict quantile_band_dict(const QuantileBand& q) {
  py::dict d;
  d["levels"] = q.prob_grid.levels();
  d["lo"] = q.lo;
  d["hi"] = q.hi;
  d["restricted"] = q.restricted;
  if (q.restricted) d["admissible"] = q.admissible;
  return d;
}

py::dict qe_band_dict(const QEBand& q) {
  py::dict d;
  d["levels"] = q.prob_grid.levels();
  d["lo"] = q.lo;
  d["hi"] = q.hi;
  d["restricted"] = q.restricted;
  if (q.restricted) d["admissible"] = q.admissible;
  return d;
}

// Joint bands for two independent samples: empirical DFs on the pooled
// outcome grid, one exchangeable weight vector per bootstrap draw feeding
// both estimates, band inversion on a regular level grid augmented with
// the band edges, optional restriction to the observed support, and the
// effect band for sample1 minus sample0 with its uniform zero test.
py::dict two_sample_bands(std::vector<double> y0, std::vector<double> y1,
                          double level, int draws, std::uint64_t seed,
                          const std::string& scheme, double prob_lo,
                          double prob_hi, double prob_step,
                          bool restrict_to_observed, int threads) {
  if (y0.empty() || y1.empty())
    throw DataError("two_sample_bands: both samples must be non-empty");
  std::vector<double> pts = y0;
  pts.insert(pts.end(), y1.begin(), y1.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const Grid grid(pts);

  const std::size_t n0 = y0.size();
  const std::size_t n = n0 + y1.size();
  EstimatorFn fn = [y0, y1, grid, n0](const std::vector<double>& w) {
    const std::vector<double> w0(w.begin(), w.begin() + static_cast<long>(n0));
    const std::vector<double> w1(w.begin() + static_cast<long>(n0), w.end());
    return std::vector<MonotoneStepFn>{edf(y0, w0, grid), edf(y1, w1, grid)};
  };
  BootstrapConfig bcfg;
  bcfg.scheme = scheme_from_string(scheme);
  bcfg.draws = draws;
  bcfg.master_seed = seed;
  const BootstrapDraws bd = bootstrap_dfs(fn, n, {}, 2, grid, bcfg, threads);

  PointEstimates pest;
  pest.curves = {edf(y0, {}, grid), edf(y1, {}, grid)};
  const BandSet set = df_bands_joint(pest, bd, level);

  std::vector<double> edges;
  for (const DFBand& band : set.bands) {
    edges.insert(edges.end(), band.lower.values().begin(),
                 band.lower.values().end());
    edges.insert(edges.end(), band.upper.values().begin(),
                 band.upper.values().end());
  }
  const ProbGrid pg = ProbGrid::regular(prob_lo, prob_hi, prob_step).merged(edges);

  QuantileBand q0 = invert_band(set.bands[0], pg);
  QuantileBand q1 = invert_band(set.bands[1], pg);
  if (restrict_to_observed) {
    q0 = restrict_support(q0, pts);
    q1 = restrict_support(q1, pts);
  }
  const QEBand effect = qe_band(q1, q0);
  const EqualityTest test = test_equality(effect);

  py::dict out;
  out["grid"] = pts;
  out["critical_value"] = set.report.c;
  out["level"] = level;
  py::list dfs;
  for (std::size_t k = 0; k < set.bands.size(); ++k) {
    py::dict g;
    g["estimate"] = set.estimates[k].values();
    g["lower"] = set.bands[k].lower.values();
    g["upper"] = set.bands[k].upper.values();
    dfs.append(g);
  }
  out["df"] = dfs;
  out["qf"] = py::make_tuple(quantile_band_dict(q0), quantile_band_dict(q1));
  out["effect"] = qe_band_dict(effect);
  out["reject_equality"] = test.reject;
  return out;
}

py::dict run_design_py(const std::string& family, double lambda0,
                       double lambda1, double mu0, double mu1, int n,
                       double level, int nsim, int draws, std::uint64_t seed,
                       bool competitors, int threads) {
  SimDesign d;
  if (family == "counts")
    d.family = SimDesign::Family::PoissonCounts;
  else if (family == "ordered")
    d.family = SimDesign::Family::OrderedLatent;
  else
    throw ConfigError("family must be 'counts' or 'ordered'");
  d.lambda0 = lambda0;
  d.lambda1 = lambda1;
  d.mu0 = mu0;
  d.mu1 = mu1;
  d.n = n;
  d.level = level;
  d.nsim = nsim;
  d.draws = draws;
  d.seed = seed;
  d.competitors = competitors;
  d.threads = threads;
  const SimReport r = run_design(d);

  py::dict out;
  out["grid_points"] = r.grid_points;
  out["cov_single0"] = r.cov_single0;
  out["cov_single1"] = r.cov_single1;
  out["cov_joint_all"] = r.cov_joint_all;
  out["cov_qe"] = r.cov_qe;
  out["reject_rate"] = r.reject_rate;
  out["len_new"] = r.len_new;
  if (competitors) {
    auto method = [](const MethodReport& m) {
      py::dict md;
      md["coverage"] = m.coverage;
      md["avg_length"] = m.avg_length;
      return md;
    };
    out["boot"] = method(r.boot);
    out["jitter1"] = method(r.jitter1);
    out["jitter2"] = method(r.jitter2);
    out["direct_zero_se_fraction"] = r.direct_zero_se_fraction;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Simultaneous confidence bands for distribution, quantile, and "
      "quantile-effect functions of possibly discrete outcomes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("poisson_cdf", &poisson_cdf, py::arg("rate"), py::arg("y"),
        "P(X <= y) for X Poisson with the given rate.");
  m.def("norm_cdf", &norm_cdf, py::arg("x"));
  m.def("norm_inv", &norm_inv, py::arg("p"));

  m.def(
      "rearrange",
      [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
      },
      py::arg("values"), "Increasing rearrangement of the values.");
  m.def(
      "isotonize",
      [](std::vector<double> v) {
        std::vector<double> pts(v.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
          pts[i] = static_cast<double>(i);
        return isotonize(Grid(pts), std::move(v)).values();
      },
      py::arg("values"),
      "Least-squares projection onto nondecreasing vectors (values in [0,1]).");
  m.def(
      "shape",
      [](std::vector<double> v, double iso_weight) {
        std::vector<double> pts(v.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
          pts[i] = static_cast<double>(i);
        ShapeConfig cfg;
        cfg.isotonization_weight = iso_weight;
        return shape(Grid(pts), std::move(v), cfg).values();
      },
      py::arg("values"), py::arg("iso_weight") = 0.0,
      "Clip to [0,1], then mix increasing rearrangement with isotonization.");

  m.def("empirical_quantile", &empirical_quantile, py::arg("values"),
        py::arg("alpha"),
        "Order-statistic quantile: the ceil(alpha*n)-th smallest value.");
  m.def("robust_se", &robust_se, py::arg("draws"),
        "Bootstrap interquartile range over the normal interquartile range.");

  py::class_<MonotoneStepFn>(m, "StepFunction",
                             "Nondecreasing step function on a finite grid "
                             "with values in [0,1].")
      .def(py::init([](std::vector<double> points, std::vector<double> values,
                       std::optional<double> domain_sup) {
             return MonotoneStepFn(make_grid(std::move(points), domain_sup),
                                   std::move(values));
           }),
           py::arg("points"), py::arg("values"),
           py::arg("domain_sup") = std::nullopt)
      .def("__call__",
           [](const MonotoneStepFn& f, double y) { return f(y); })
      .def("left_inverse", &MonotoneStepFn::left_inverse, py::arg("a"),
           "Smallest grid point where the function reaches a, or the domain "
           "supremum when it never does.")
      .def("right_inverse", &MonotoneStepFn::right_inverse, py::arg("y"))
      .def_property_readonly(
          "points",
          [](const MonotoneStepFn& f) { return f.grid().points(); })
      .def_property_readonly(
          "values", [](const MonotoneStepFn& f) { return f.values(); })
      .def("__len__", &MonotoneStepFn::size);

  m.def(
      "edf",
      [](const std::vector<double>& y, const std::vector<double>& w,
         std::vector<double> grid_points, std::optional<double> domain_sup) {
        if (grid_points.empty()) {
          grid_points = y;
          std::sort(grid_points.begin(), grid_points.end());
          grid_points.erase(
              std::unique(grid_points.begin(), grid_points.end()),
              grid_points.end());
        }
        return edf(y, w, make_grid(std::move(grid_points), domain_sup));
      },
      py::arg("y"), py::arg("weights") = std::vector<double>{},
      py::arg("grid") = std::vector<double>{},
      py::arg("domain_sup") = std::nullopt,
      "Weighted empirical distribution function on the grid (defaults to "
      "the sorted distinct outcomes).");

  m.def("two_sample_bands", &two_sample_bands, py::arg("y0"), py::arg("y1"),
        py::arg("level") = 0.95, py::arg("draws") = 1000, py::arg("seed") = 0,
        py::arg("scheme") = "exponential", py::arg("prob_lo") = 0.1,
        py::arg("prob_hi") = 0.9, py::arg("prob_step") = 0.01,
        py::arg("restrict_to_observed") = true, py::arg("threads") = 1,
        "Joint distribution, quantile, and quantile-effect bands for two "
        "independent samples, plus the uniform equality test.");

  m.def("run_design", &run_design_py, py::arg("family") = "counts",
        py::arg("lambda0") = 3.0, py::arg("lambda1") = 3.0,
        py::arg("mu0") = 0.0, py::arg("mu1") = 0.0, py::arg("n") = 400,
        py::arg("level") = 0.95, py::arg("nsim") = 100, py::arg("draws") = 200,
        py::arg("seed") = 0, py::arg("competitors") = false,
        py::arg("threads") = 1,
        "Monte Carlo coverage/length/rejection study for a two-group design.");

  m.attr("__version__") = "0.1.0";
}
