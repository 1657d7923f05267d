// Python bindings: the model configuration, the menu solver, the benchmark
// mechanisms, the analysis toolkit, the brute-force oracles, and the CLI
// entry point, exposed with pybind11.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "certmenu/analysis.hpp"
#include "certmenu/benchmarks.hpp"
#include "certmenu/model.hpp"
#include "certmenu/oracle.hpp"
#include "certmenu/runner.hpp"
#include "certmenu/solver.hpp"

namespace py = pybind11;
using namespace certmenu;

namespace {

ModelConfig make_uniform_config(double gamma, double alpha, double kappa,
                                double sigma, double theta_max,
                                int theta_points, double loss_b,
                                double addiction_z) {
  ModelConfig cfg;
  cfg.gamma = gamma;
  cfg.attention.alpha = alpha;
  cfg.attention.loss_b = loss_b;
  cfg.attention.addiction_z = addiction_z;
  cfg.cost.kappa = kappa;
  cfg.cost.sigma = sigma;
  cfg.dist = TypeDistribution::make_uniform(theta_max);
  cfg.grid.theta_points = theta_points;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_certmenu, m) {
  m.doc() =
      "Certified-quality menu solver: profit-maximizing certificates and "
      "targeted views for a platform selling content moderation.";

  py::class_<AttentionSpec>(m, "AttentionSpec")
      .def(py::init<>())
      .def_readwrite("alpha", &AttentionSpec::alpha)
      .def_readwrite("loss_b", &AttentionSpec::loss_b)
      .def_readwrite("addiction_z", &AttentionSpec::addiction_z)
      .def("eval", &AttentionSpec::eval, py::arg("lam"))
      .def("deriv_safe", &AttentionSpec::deriv_safe, py::arg("lam"))
      .def("inverse", &AttentionSpec::inverse, py::arg("a"))
      .def("kink", &AttentionSpec::kink)
      .def("has_transform", &AttentionSpec::has_transform);

  py::class_<CostSpec>(m, "CostSpec")
      .def(py::init<>())
      .def_readwrite("kappa", &CostSpec::kappa)
      .def_readwrite("sigma", &CostSpec::sigma)
      .def("cost", &CostSpec::cost, py::arg("v"))
      .def("marginal", &CostSpec::marginal, py::arg("v"))
      .def("inverse_marginal", &CostSpec::inverse_marginal, py::arg("x"));

  py::class_<TypeDistribution>(m, "TypeDistribution")
      .def_static("make_uniform", &TypeDistribution::make_uniform,
                  py::arg("theta_max"))
      .def_static("make_tabulated", &TypeDistribution::make_tabulated,
                  py::arg("knots"), py::arg("cdf"))
      .def("upper", &TypeDistribution::upper)
      .def("cdf", &TypeDistribution::cdf, py::arg("theta"))
      .def("pdf", &TypeDistribution::pdf, py::arg("theta"))
      .def("virtual_value", &TypeDistribution::virtual_value, py::arg("theta"))
      .def("virtual_value_inverse", &TypeDistribution::virtual_value_inverse,
           py::arg("y"), py::arg("tol") = 1e-12);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("theta_points", &GridSpec::theta_points)
      .def_readwrite("lambda_coarse_points", &GridSpec::lambda_coarse_points)
      .def_readwrite("refine_tol", &GridSpec::refine_tol);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("attention", &ModelConfig::attention)
      .def_readwrite("cost", &ModelConfig::cost)
      .def_readwrite("dist", &ModelConfig::dist)
      .def_readwrite("gamma", &ModelConfig::gamma)
      .def_readwrite("grid", &ModelConfig::grid)
      .def("validate", &ModelConfig::validate);

  m.def("make_uniform_config", &make_uniform_config, py::arg("gamma"),
        py::arg("alpha") = 1.0, py::arg("kappa") = 1.0,
        py::arg("sigma") = 2.0, py::arg("theta_max") = 1.0,
        py::arg("theta_points") = 2001, py::arg("loss_b") = 0.0,
        py::arg("addiction_z") = 0.0,
        "Uniform-type configuration with the power attention family.");

  py::class_<Diagnostics>(m, "Diagnostics")
      .def_readonly("quality_drop", &Diagnostics::quality_drop)
      .def_readonly("views_drop", &Diagnostics::views_drop)
      .def_readonly("allocation_drop", &Diagnostics::allocation_drop);

  py::class_<MechanismSolution>(m, "MechanismSolution")
      .def_readonly("label", &MechanismSolution::label)
      .def_readonly("theta", &MechanismSolution::theta)
      .def_readonly("phi", &MechanismSolution::phi)
      .def_readonly("quality", &MechanismSolution::quality)
      .def_readonly("views_good", &MechanismSolution::views_good)
      .def_readonly("views_bad", &MechanismSolution::views_bad)
      .def_readonly("attention", &MechanismSolution::attention)
      .def_readonly("price", &MechanismSolution::price)
      .def_readonly("diag", &MechanismSolution::diag)
      .def("size", &MechanismSolution::size)
      .def("allocation", &MechanismSolution::allocation, py::arg("i"));

  m.def("effective_virtual_value", &effective_virtual_value, py::arg("cfg"),
        py::arg("phi_hat"), py::arg("lam"),
        "Per-view platform return at quality lam for virtual value phi_hat.");
  m.def("quality_grid", &quality_grid, py::arg("cfg"));

  py::class_<QualityChoice>(m, "QualityChoice")
      .def_readonly("quality", &QualityChoice::quality)
      .def_readonly("value", &QualityChoice::value);
  m.def("optimal_quality", &optimal_quality, py::arg("cfg"),
        py::arg("phi_hat"),
        "Largest maximizer of the effective virtual value over (0, 1].");
  m.def("optimal_views", &optimal_views, py::arg("cfg"), py::arg("phi_hat"),
        py::arg("lam"));

  m.def("solve_grid", &solve_grid, py::arg("cfg"));
  m.def("solve_optimal", &solve_optimal, py::arg("cfg"),
        "Profit-maximizing menu of certificate quality and targeted views.");
  m.def("closed_form_linear", &closed_form_linear, py::arg("cfg"));

  py::class_<IcReport>(m, "IcReport")
      .def_readonly("max_violation", &IcReport::max_violation)
      .def_readonly("type_index", &IcReport::type_index)
      .def_readonly("report_index", &IcReport::report_index);
  m.def("verify_ic", &verify_ic, py::arg("cfg"), py::arg("sol"));

  py::class_<ProfitReport>(m, "ProfitReport")
      .def_readonly("direct", &ProfitReport::direct)
      .def_readonly("virtual_surplus", &ProfitReport::virtual_surplus);
  m.def("profit", &profit, py::arg("cfg"), py::arg("sol"));

  // Benchmarks.
  m.def("planner", &planner, py::arg("cfg"));
  py::class_<SingleCertResult>(m, "SingleCertResult")
      .def_readonly("lambda_", &SingleCertResult::lambda)
      .def_readonly("profit", &SingleCertResult::profit)
      .def_readonly("mechanism", &SingleCertResult::mechanism);
  m.def("single_certificate", &single_certificate, py::arg("cfg"),
        py::arg("lam"));
  m.def("optimize_single", &optimize_single, py::arg("cfg"));
  m.def("enforced_perfect", &enforced_perfect, py::arg("cfg"));
  m.def("crossing_theta", &crossing_theta, py::arg("cfg"), py::arg("lo"),
        py::arg("hi"));
  m.def("serving_cutoff", &serving_cutoff, py::arg("cfg"), py::arg("lam"));
  m.def("two_certificate_profit", &two_certificate_profit, py::arg("cfg"),
        py::arg("lo"), py::arg("hi"), py::arg("theta_hat"));
  py::class_<TwoCertResult>(m, "TwoCertResult")
      .def_readonly("lambda_lo", &TwoCertResult::lambda_lo)
      .def_readonly("lambda_hi", &TwoCertResult::lambda_hi)
      .def_readonly("theta_hat", &TwoCertResult::theta_hat)
      .def_readonly("profit", &TwoCertResult::profit)
      .def_readonly("mechanism", &TwoCertResult::mechanism);
  m.def("optimize_two_certificate", &optimize_two_certificate, py::arg("cfg"));

  // Analysis.
  m.def("engagement", &engagement, py::arg("cfg"), py::arg("sol"));
  m.def("welfare_inner_mean", &welfare_inner_mean, py::arg("att"),
        py::arg("lam"));
  m.def("consumer_welfare_power", &consumer_welfare_power, py::arg("cfg"),
        py::arg("sol"));
  py::class_<DiversityReport>(m, "DiversityReport")
      .def_readonly("intervals", &DiversityReport::intervals)
      .def_readonly("measure", &DiversityReport::measure);
  m.def("content_diversity", &content_diversity, py::arg("cfg"),
        py::arg("sol"));
  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("theta", &ComparisonReport::theta)
      .def_readonly("phi", &ComparisonReport::phi)
      .def_readonly("quality_opt", &ComparisonReport::quality_opt)
      .def_readonly("views_opt", &ComparisonReport::views_opt)
      .def_readonly("engagement_opt", &ComparisonReport::engagement_opt)
      .def_readonly("views_perfect", &ComparisonReport::views_perfect)
      .def_readonly("engagement_perfect",
                    &ComparisonReport::engagement_perfect)
      .def_readonly("delta", &ComparisonReport::delta)
      .def_readonly("total_opt", &ComparisonReport::total_opt)
      .def_readonly("total_perfect", &ComparisonReport::total_perfect)
      .def_readonly("diversity_opt", &ComparisonReport::diversity_opt)
      .def_readonly("diversity_perfect", &ComparisonReport::diversity_perfect)
      .def_readonly("perfect_on_served", &ComparisonReport::perfect_on_served)
      .def_readonly("low_quality_above_gamma",
                    &ComparisonReport::low_quality_above_gamma)
      .def_readonly("serves_below_gamma", &ComparisonReport::serves_below_gamma)
      .def_readonly("dichotomy_holds", &ComparisonReport::dichotomy_holds);
  m.def("compare_to_perfect", &compare_to_perfect, py::arg("cfg"));

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("value", &SweepRow::value)
      .def_readonly("profit", &SweepRow::profit)
      .def_readonly("engagement", &SweepRow::engagement)
      .def_readonly("welfare", &SweepRow::welfare)
      .def_readonly("diversity", &SweepRow::diversity)
      .def_readonly("quality_min_served", &SweepRow::quality_min_served)
      .def_readonly("quality_max", &SweepRow::quality_max);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("param", &SweepResult::param)
      .def_readonly("theta", &SweepResult::theta)
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("quality", &SweepResult::quality)
      .def_readonly("views", &SweepResult::views)
      .def_readonly("monotone_ok", &SweepResult::monotone_ok)
      .def_readonly("worst_violation", &SweepResult::worst_violation)
      .def_readonly("note", &SweepResult::note);
  m.def("sweep_gamma", &sweep_gamma, py::arg("cfg"), py::arg("values"));
  m.def("sweep_kappa", &sweep_kappa, py::arg("cfg"), py::arg("values"));
  m.def("sweep_alpha", &sweep_alpha, py::arg("cfg"), py::arg("values"));
  m.def("sweep_losses", &sweep_losses, py::arg("cfg"), py::arg("values"));
  m.def("sweep_addiction", &sweep_addiction, py::arg("cfg"),
        py::arg("values"));

  py::class_<LimitsReport>(m, "LimitsReport")
      .def_readonly("alpha", &LimitsReport::alpha)
      .def_readonly("sigma", &LimitsReport::sigma)
      .def_readonly("regime", &LimitsReport::regime)
      .def_readonly("expected_limit", &LimitsReport::expected_limit)
      .def_readonly("gammas", &LimitsReport::gammas)
      .def_readonly("phi_probes", &LimitsReport::phi_probes)
      .def_readonly("quality", &LimitsReport::quality)
      .def_readonly("views", &LimitsReport::views)
      .def_readonly("engagement", &LimitsReport::engagement);
  m.def("small_gamma_limits", &small_gamma_limits, py::arg("cfg"),
        py::arg("gammas"), py::arg("phi_probes"));

  // Brute-force oracles.
  py::module_ om = m.def_submodule("oracle", "Brute-force references.");
  py::class_<oracle::OracleGrid>(om, "OracleGrid")
      .def(py::init<>())
      .def_readwrite("lambda_points", &oracle::OracleGrid::lambda_points)
      .def_readwrite("v_points", &oracle::OracleGrid::v_points)
      .def_readwrite("v_max", &oracle::OracleGrid::v_max)
      .def_readwrite("profit_lambda_points",
                     &oracle::OracleGrid::profit_lambda_points)
      .def_readwrite("profit_theta_points",
                     &oracle::OracleGrid::profit_theta_points);
  py::class_<oracle::BruteMax>(om, "BruteMax")
      .def_readonly("arg", &oracle::BruteMax::arg)
      .def_readonly("value", &oracle::BruteMax::value)
      .def_readonly("step", &oracle::BruteMax::step);
  om.def("brute_argmax_quality", &oracle::brute_argmax_quality,
         py::arg("cfg"), py::arg("phi_hat"),
         py::arg("grid") = oracle::OracleGrid{});
  om.def("brute_views", &oracle::brute_views, py::arg("cfg"),
         py::arg("phi_hat"), py::arg("lam"),
         py::arg("grid") = oracle::OracleGrid{});
  om.def("brute_single_profit", &oracle::brute_single_profit, py::arg("cfg"),
         py::arg("grid") = oracle::OracleGrid{});

  // Config files and the CLI entry point.
  py::class_<OutputSpec>(m, "OutputSpec")
      .def(py::init<>())
      .def_readwrite("dir", &OutputSpec::dir)
      .def_readwrite("precision", &OutputSpec::precision);
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("model", &RunConfig::model)
      .def_readwrite("output", &RunConfig::output)
      .def_readwrite("seed", &RunConfig::seed);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("format_fixed", &format_fixed, py::arg("x"), py::arg("precision"));
  m.def("run_command", &run_command, py::arg("args"),
        "CLI dispatch; returns the process exit code.");
}
