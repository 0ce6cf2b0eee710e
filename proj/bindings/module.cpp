// Python bindings for the core operations: counting distribution, moments and
// dispersion, transform and decomposition weights, subordinator and
// first-passage sampling, composed-process formulas, fitting and comparison
// statistics, and the config-driven simulation pipeline.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <utility>

#include "cppok/config.hpp"
#include "cppok/orderk.hpp"
#include "cppok/simulate.hpp"
#include "cppok/stats.hpp"
#include "cppok/subordinator.hpp"
#include "cppok/timechange.hpp"
#include "cppok/verify.hpp"
#include "cppok/version.hpp"

namespace py = pybind11;
using namespace cppok;

namespace {

Rng seeded_rng(std::uint64_t seed) { return replicate_rng(seed, 0); }

std::pair<std::vector<double>, std::vector<double>> path_pair(const ProcessPath& path) {
  return {path.times, path.values};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "order-k compound Poisson processes with random clocks";
  m.attr("__version__") = kVersion;

  py::class_<OrderKParams>(m, "OrderKParams")
      .def(py::init([](int k, double rate) {
             OrderKParams params{k, rate};
             params.validate();
             return params;
           }),
           py::arg("k"), py::arg("rate"))
      .def_readonly("k", &OrderKParams::order)
      .def_readonly("rate", &OrderKParams::rate)
      .def("__repr__", [](const OrderKParams& p) {
        return "OrderKParams(k=" + std::to_string(p.order) +
               ", rate=" + std::to_string(p.rate) + ")";
      });

  py::class_<JumpLaw, std::shared_ptr<JumpLaw>>(m, "JumpLaw")
      .def("mean", &JumpLaw::mean)
      .def("second_moment", &JumpLaw::second_moment)
      .def("variance", &JumpLaw::variance)
      .def("describe", &JumpLaw::describe)
      .def("__repr__", [](const JumpLaw& law) { return law.describe(); });
  m.def("dirac_jump", [](double point) -> std::shared_ptr<JumpLaw> {
          return std::make_shared<DiracJump>(point);
        },
        py::arg("point") = 1.0);
  m.def("discrete_jump", [](std::vector<double> weights) -> std::shared_ptr<JumpLaw> {
          return std::make_shared<DiscreteJump>(std::move(weights));
        },
        py::arg("weights"));
  m.def("exponential_jump", [](double rate) -> std::shared_ptr<JumpLaw> {
          return std::make_shared<ExponentialJump>(rate);
        },
        py::arg("rate"));

  // --- Counting distribution, moments, transform --------------------------------
  m.def("pok_pmf", [](const OrderKParams& params, double t, int nmax) {
          return pok_pmf(params, t, nmax).probs;
        },
        py::arg("params"), py::arg("t"), py::arg("nmax"));
  m.def("pok_pmf_enum", &pok_pmf_enum, py::arg("params"), py::arg("t"), py::arg("n"),
        py::arg("max_terms") = 20000000);
  m.def("mean", &cppok_mean, py::arg("params"), py::arg("jumps"), py::arg("t"));
  m.def("variance", &cppok_variance, py::arg("params"), py::arg("jumps"), py::arg("t"));
  m.def("pgf", &cppok_pgf, py::arg("params"), py::arg("jumps"), py::arg("u"), py::arg("t"));
  m.def("marginal_cdf", &marginal_cdf, py::arg("params"), py::arg("jumps"), py::arg("t"),
        py::arg("y"), py::arg("tail_eps") = 1e-10);

  py::class_<DispersionReport>(m, "DispersionReport")
      .def_readonly("gap", &DispersionReport::gap)
      .def_property_readonly(
          "classification",
          [](const DispersionReport& r) { return to_string(r.classification); })
      .def_readonly("prefactor", &DispersionReport::prefactor)
      .def_readonly("second_moment_term", &DispersionReport::second_moment_term)
      .def_readonly("mean_term", &DispersionReport::mean_term)
      .def_readonly("batch_term", &DispersionReport::batch_term);
  m.def("dispersion", &dispersion_report, py::arg("params"), py::arg("jumps"), py::arg("t"));

  py::class_<LevyMeasureWeights>(m, "LevyMeasureWeights")
      .def_readonly("alpha", &LevyMeasureWeights::alpha)
      .def_readonly("nu", &LevyMeasureWeights::nu)
      .def_readonly("tail_mass", &LevyMeasureWeights::tail_mass);
  m.def("levy_weights", &levy_measure_weights_auto, py::arg("params"), py::arg("jumps"),
        py::arg("tail_eps") = 1e-10);

  // --- Path sampling --------------------------------------------------------------
  m.def("sample_counting_path", [](const OrderKParams& params, double horizon,
                                   std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          return path_pair(sample_ppok_path(params, horizon, rng));
        },
        py::arg("params"), py::arg("horizon"), py::arg("seed"));
  m.def("sample_compound_path", [](const OrderKParams& params,
                                   const std::shared_ptr<JumpLaw>& jumps, double horizon,
                                   std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          return path_pair(sample_cppok_path(params, *jumps, horizon, rng));
        },
        py::arg("params"), py::arg("jumps"), py::arg("horizon"), py::arg("seed"));

  // --- Subordinators ----------------------------------------------------------------
  py::class_<MtssParams>(m, "MtssParams")
      .def(py::init([](double c1, double c2, double alpha1, double alpha2, double mu1,
                       double mu2) {
             MtssParams params{c1, c2, alpha1, alpha2, mu1, mu2};
             params.validate();
             return params;
           }),
           py::arg("c1") = 1.0, py::arg("c2") = 0.0, py::arg("alpha1") = 0.5,
           py::arg("alpha2") = 0.5, py::arg("mu1") = 1.0, py::arg("mu2") = 0.0)
      .def_readonly("c1", &MtssParams::c1)
      .def_readonly("c2", &MtssParams::c2)
      .def_readonly("alpha1", &MtssParams::alpha1)
      .def_readonly("alpha2", &MtssParams::alpha2)
      .def_readonly("mu1", &MtssParams::mu1)
      .def_readonly("mu2", &MtssParams::mu2)
      .def("has_zero_tempering", &MtssParams::has_zero_tempering);
  m.def("laplace_exponent", &laplace_exponent, py::arg("params"), py::arg("s"));
  m.def("mtss_mean", &mtss_mean, py::arg("params"), py::arg("t"));
  m.def("mtss_variance", &mtss_variance, py::arg("params"), py::arg("t"));
  m.def("sample_subordinator", [](const MtssParams& params, std::vector<double> grid,
                                  std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          return sample_mtss_path(params, std::move(grid), rng).values;
        },
        py::arg("params"), py::arg("grid"), py::arg("seed"));
  m.def("sample_inverse", [](const MtssParams& params, std::vector<double> tgrid, double step,
                             std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          const InversePath path = sample_inverse_path(params, std::move(tgrid), step, rng);
          return std::make_pair(path.values, path.bias_bound);
        },
        py::arg("params"), py::arg("tgrid"), py::arg("step"), py::arg("seed"));

  // --- Time-changed processes ---------------------------------------------------------
  py::enum_<ClockKind>(m, "ClockKind")
      .value("mtss", ClockKind::mtss)
      .value("inverse_mtss", ClockKind::inverse_mtss);
  py::class_<TimeChangedSpec>(m, "TimeChangedSpec")
      .def(py::init([](const OrderKParams& base, const std::shared_ptr<JumpLaw>& jumps,
                       ClockKind kind, const MtssParams& clock, double step) {
             TimeChangedSpec spec;
             spec.base = base;
             spec.jumps = jumps;
             spec.clock.kind = kind;
             spec.clock.params = clock;
             spec.clock.inverse_step = step;
             spec.validate();
             return spec;
           }),
           py::arg("base"), py::arg("jumps"), py::arg("kind"), py::arg("clock"),
           py::arg("step") = 0.0)
      .def_property_readonly("label",
                             [](const TimeChangedSpec& spec) { return to_string(spec.label()); });
  m.def("sample_z1", [](const TimeChangedSpec& spec, const std::vector<double>& tgrid,
                        std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          return sample_z1(spec, tgrid, rng).values;
        },
        py::arg("spec"), py::arg("tgrid"), py::arg("seed"));
  m.def("sample_z2", [](const TimeChangedSpec& spec, const std::vector<double>& tgrid,
                        std::uint64_t seed) {
          Rng rng = seeded_rng(seed);
          return sample_z2(spec, tgrid, rng).values;
        },
        py::arg("spec"), py::arg("tgrid"), py::arg("seed"));
  m.def("z1_mean", &z1_mean, py::arg("spec"), py::arg("t"));
  m.def("z1_variance", &z1_variance, py::arg("spec"), py::arg("t"));
  m.def("z1_cov", &z1_cov, py::arg("spec"), py::arg("s"), py::arg("t"));
  m.def("z1_dispersion", &z1_dispersion_classify, py::arg("spec"), py::arg("t"));
  m.def("z1_lrd_exponent", [](const TimeChangedSpec& spec) {
          const CorrelationDecay decay = z1_lrd_exponent(spec);
          return std::make_pair(decay.exponent, decay.variance_slope);
        },
        py::arg("spec"));
  m.def("z2_asymptotics", [](const TimeChangedSpec& spec, double t) {
          const AsymptoticMoments moments = z2_asymptotics(spec, t);
          return std::make_pair(moments.mean, moments.variance);
        },
        py::arg("spec"), py::arg("t"));

  // --- Statistics -------------------------------------------------------------------
  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("exponent", &PowerLawFit::exponent)
      .def_readonly("log_amplitude", &PowerLawFit::log_amplitude)
      .def_readonly("r_squared", &PowerLawFit::r_squared)
      .def_readonly("fit_tmin", &PowerLawFit::fit_tmin)
      .def_readonly("fit_tmax", &PowerLawFit::fit_tmax)
      .def_readonly("points_used", &PowerLawFit::points_used)
      .def_readonly("points_trimmed", &PowerLawFit::points_trimmed);
  m.def("fit_power_law", &fit_power_law, py::arg("times"), py::arg("corr"), py::arg("tmin"),
        py::arg("tmax"));
  m.def("classify_dependence",
        [](double exponent) { return to_string(classify_dependence(exponent)); },
        py::arg("exponent"));
  py::class_<TwoSampleResult>(m, "TwoSampleResult")
      .def_readonly("tv_distance", &TwoSampleResult::tv_distance)
      .def_readonly("chi2_stat", &TwoSampleResult::chi2_stat)
      .def_readonly("dof", &TwoSampleResult::dof)
      .def_readonly("p_value", &TwoSampleResult::p_value);
  m.def("two_sample_pmf_test", &two_sample_pmf_test, py::arg("a"), py::arg("b"));
  m.def("two_sample_ks", &two_sample_ks, py::arg("a"), py::arg("b"));
  m.def("ks_critical_value", &ks_critical_value, py::arg("n"), py::arg("m"),
        py::arg("alpha") = 0.01);

  // --- Config-driven pipeline ----------------------------------------------------------
  m.def("simulation_report", [](const std::string& config_json) {
          return simulation_report_text(parse_config_text(config_json));
        },
        py::arg("config_json"),
        "Parse a JSON experiment config, run it, and render the report text.");
  m.def("config_hash", [](const std::string& config_json) {
          return config_hash_hex(parse_config_text(config_json));
        },
        py::arg("config_json"));

  // --- Verification ----------------------------------------------------------------------
  m.def("verify_suite_names", &verify_suite_names);
  m.def("run_verify_suite", [](const std::string& name, int workers) {
          const SuiteReport report = run_verify_suite(name, workers);
          py::list results;
          for (const CriterionResult& r : report.results) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            results.append(d);
          }
          return results;
        },
        py::arg("name"), py::arg("workers") = 0);
}
