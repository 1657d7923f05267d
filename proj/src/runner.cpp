#include "certmenu/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "certmenu/analysis.hpp"
#include "certmenu/benchmarks.hpp"
#include "certmenu/numerics.hpp"
#include "certmenu/oracle.hpp"

namespace certmenu {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' must be a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' must be an integer, got '" + value + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not 'key = value': '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " has an empty key or value");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("duplicate config key '" + key + "'");
  }

  static const char* known[] = {
      "model.gamma",        "attention.family",
      "attention.alpha",    "attention.loss_b",
      "attention.addiction_z", "cost.kappa",
      "cost.sigma",         "dist.family",
      "dist.theta_max",     "grid.theta_points",
      "grid.lambda_coarse_points", "grid.refine_tol",
      "output.dir",         "output.precision",
      "seed"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  for (const char* req : {"model.gamma", "attention.family", "cost.kappa",
                          "cost.sigma", "dist.family", "dist.theta_max"})
    if (!kv.count(req))
      throw std::invalid_argument("missing config key '" + std::string(req) +
                                  "'");

  RunConfig rc;
  if (kv.at("attention.family") != "power")
    throw std::invalid_argument(
        "attention.family must be 'power', got '" + kv.at("attention.family") +
        "'");
  if (kv.at("dist.family") != "uniform")
    throw std::invalid_argument("dist.family must be 'uniform', got '" +
                                kv.at("dist.family") + "'");

  rc.model.gamma = parse_double("model.gamma", kv.at("model.gamma"));
  rc.model.cost.kappa = parse_double("cost.kappa", kv.at("cost.kappa"));
  rc.model.cost.sigma = parse_double("cost.sigma", kv.at("cost.sigma"));
  rc.model.dist = TypeDistribution::make_uniform(
      parse_double("dist.theta_max", kv.at("dist.theta_max")));
  if (kv.count("attention.alpha"))
    rc.model.attention.alpha =
        parse_double("attention.alpha", kv.at("attention.alpha"));
  if (kv.count("attention.loss_b"))
    rc.model.attention.loss_b =
        parse_double("attention.loss_b", kv.at("attention.loss_b"));
  if (kv.count("attention.addiction_z"))
    rc.model.attention.addiction_z =
        parse_double("attention.addiction_z", kv.at("attention.addiction_z"));
  if (kv.count("grid.theta_points"))
    rc.model.grid.theta_points = static_cast<int>(
        parse_int("grid.theta_points", kv.at("grid.theta_points")));
  if (kv.count("grid.lambda_coarse_points"))
    rc.model.grid.lambda_coarse_points = static_cast<int>(parse_int(
        "grid.lambda_coarse_points", kv.at("grid.lambda_coarse_points")));
  if (kv.count("grid.refine_tol"))
    rc.model.grid.refine_tol =
        parse_double("grid.refine_tol", kv.at("grid.refine_tol"));
  if (kv.count("output.dir")) rc.output.dir = kv.at("output.dir");
  if (kv.count("output.precision")) {
    long long p = parse_int("output.precision", kv.at("output.precision"));
    if (p < 0 || p > 17)
      throw std::invalid_argument("output.precision must be in [0, 17]");
    rc.output.precision = static_cast<int>(p);
  }
  if (kv.count("seed")) {
    long long s = parse_int("seed", kv.at("seed"));
    if (s < 0) throw std::invalid_argument("seed must be >= 0");
    rc.seed = static_cast<std::uint64_t>(s);
  }
  rc.model.validate();
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_fixed(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, x);
  return buf;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, int precision) : precision_(precision) {
    out_.open(path, std::ios::binary);  // '\n' endings on every platform
    if (!out_)
      throw std::runtime_error("cannot open output file '" + path + "'");
  }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      out_ << (i ? "," : "") << format_fixed(vals[i], precision_);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  int precision_;
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

void write_mechanism_csv(const std::string& path, const ModelConfig& cfg,
                         const MechanismSolution& sol, int precision) {
  CsvWriter w(path, precision);
  w.header({"theta", "phi", "lambda", "v_good", "v_bad", "price", "attention",
            "engagement_density"});
  for (std::size_t i = 0; i < sol.size(); ++i)
    w.row({sol.theta[i], sol.phi[i], sol.quality[i], sol.views_good[i],
           sol.views_bad[i], sol.price[i], sol.attention[i],
           sol.allocation(i) * cfg.dist.pdf(sol.theta[i])});
}

namespace {

int usage(const std::string& msg = "") {
  if (!msg.empty()) std::cerr << "error: " << msg << "\n";
  std::cerr <<
      "usage: certmenu <command> [args] --config PATH [--out DIR]\n"
      "commands:\n"
      "  solve                          solve the optimal menu -> mechanism.csv\n"
      "  benchmark planner              welfare benchmark -> benchmark_planner.csv\n"
      "  benchmark single [--lambda X]  best (or fixed) single certificate\n"
      "  benchmark two-cert             best pair of certificates\n"
      "  benchmark perfect              mandated perfect certification\n"
      "  sweep gamma|kappa|alpha|b|z [--values a,b,...]\n"
      "  compare-perfect                optimal vs perfect -> compare.csv\n"
      "  limits [--gammas a,b,...] [--phis a,b,...]\n"
      "  figures                        fig1/fig2a/fig2b/fig3 CSVs\n"
      "  verify [--probes N]            solver vs brute-force oracles\n";
  return 2;
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("option " + key + " needs a value list");
  return out;
}

struct Cli {
  std::vector<std::string> words;  // positional words (command, subcommand)
  std::map<std::string, std::string> opts;
};

Cli split_args(const std::vector<std::string>& args) {
  Cli cli;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      if (i + 1 >= args.size())
        throw std::invalid_argument("option " + a + " needs a value");
      cli.opts[a] = args[++i];
    } else {
      cli.words.push_back(a);
    }
  }
  return cli;
}

int cmd_solve(const RunConfig& rc) {
  MechanismSolution sol = solve_optimal(rc.model);
  write_mechanism_csv(join_path(rc.output.dir, "mechanism.csv"), rc.model, sol,
                      rc.output.precision);
  ProfitReport p = profit(rc.model, sol);
  IcReport ic = verify_ic(rc.model, sol);
  std::cout << "profit_direct=" << format_fixed(p.direct, 12)
            << " profit_virtual=" << format_fixed(p.virtual_surplus, 12)
            << "\nengagement=" << format_fixed(engagement(rc.model, sol), 12)
            << " welfare=" << format_fixed(consumer_welfare_power(rc.model, sol), 12)
            << " served_measure="
            << format_fixed(content_diversity(rc.model, sol).measure, 12)
            // + 0.0 keeps a zero violation from printing as "-0"
            << "\nic_max_violation=" << ic.max_violation + 0.0 << "\n";
  return 0;
}

int cmd_benchmark(const RunConfig& rc, const std::string& which,
                  std::optional<double> lambda) {
  const ModelConfig& m = rc.model;
  if (which == "planner") {
    MechanismSolution s = planner(m);
    write_mechanism_csv(join_path(rc.output.dir, "benchmark_planner.csv"), m,
                        s, rc.output.precision);
    std::cout << "engagement=" << format_fixed(engagement(m, s), 12) << "\n";
    return 0;
  }
  if (which == "single") {
    SingleCertResult r =
        lambda ? single_certificate(m, *lambda) : optimize_single(m);
    write_mechanism_csv(join_path(rc.output.dir, "benchmark_single.csv"), m,
                        r.mechanism, rc.output.precision);
    std::cout << "lambda=" << format_fixed(r.lambda, 12)
              << " profit=" << format_fixed(r.profit, 12) << "\n";
    return 0;
  }
  if (which == "two-cert") {
    TwoCertResult r = optimize_two_certificate(m);
    write_mechanism_csv(join_path(rc.output.dir, "benchmark_two_cert.csv"), m,
                        r.mechanism, rc.output.precision);
    std::cout << "lambda_lo=" << format_fixed(r.lambda_lo, 12)
              << " lambda_hi=" << format_fixed(r.lambda_hi, 12)
              << " theta_hat=" << format_fixed(r.theta_hat, 12)
              << " profit=" << format_fixed(r.profit, 12) << "\n";
    return 0;
  }
  if (which == "perfect") {
    SingleCertResult r = enforced_perfect(m);
    write_mechanism_csv(join_path(rc.output.dir, "benchmark_perfect.csv"), m,
                        r.mechanism, rc.output.precision);
    std::cout << "profit=" << format_fixed(r.profit, 12) << " engagement="
              << format_fixed(engagement(m, r.mechanism), 12) << "\n";
    return 0;
  }
  return usage("unknown benchmark '" + which + "'");
}

int cmd_sweep(const RunConfig& rc, const std::string& param,
              std::optional<std::vector<double>> values) {
  SweepResult res;
  if (param == "gamma")
    res = sweep_gamma(rc.model,
                      values.value_or(std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4}));
  else if (param == "kappa")
    res = sweep_kappa(rc.model, values.value_or(std::vector<double>{0.5, 1.0, 2.0}));
  else if (param == "alpha")
    res = sweep_alpha(rc.model, values.value_or(std::vector<double>{0.5, 1.0, 2.0}));
  else if (param == "b")
    res = sweep_losses(rc.model, values.value_or(std::vector<double>{0.0, 0.5, 1.0}));
  else if (param == "z")
    res = sweep_addiction(rc.model, values.value_or(std::vector<double>{0.01, 0.03}));
  else
    return usage("unknown sweep parameter '" + param + "'");

  CsvWriter w(join_path(rc.output.dir, "sweep_" + res.param + ".csv"),
              rc.output.precision);
  w.header({"value", "profit", "engagement", "welfare", "diversity",
            "quality_min_served", "quality_max"});
  for (const auto& r : res.rows)
    w.row({r.value, r.profit, r.engagement, r.welfare, r.diversity,
           r.quality_min_served, r.quality_max});
  std::cout << res.param << " sweep: " << res.note << ": "
            << (res.monotone_ok ? "holds" : "VIOLATED") << " (worst deficit "
            << res.worst_violation << ")\n";
  return res.monotone_ok ? 0 : 1;
}

int cmd_compare(const RunConfig& rc) {
  ComparisonReport rep = compare_to_perfect(rc.model);
  CsvWriter w(join_path(rc.output.dir, "compare.csv"), rc.output.precision);
  w.header({"theta", "phi", "lambda_opt", "v_opt", "engagement_opt",
            "v_perfect", "engagement_perfect", "delta"});
  for (std::size_t i = 0; i < rep.theta.size(); ++i)
    w.row({rep.theta[i], rep.phi[i], rep.quality_opt[i], rep.views_opt[i],
           rep.engagement_opt[i], rep.views_perfect[i],
           rep.engagement_perfect[i], rep.delta[i]});
  std::cout << "total_engagement_optimal=" << format_fixed(rep.total_opt, 12)
            << " total_engagement_perfect="
            << format_fixed(rep.total_perfect, 12)
            << "\nserved_measure_optimal="
            << format_fixed(rep.diversity_opt.measure, 12)
            << " served_measure_perfect="
            << format_fixed(rep.diversity_perfect.measure, 12)
            << "\ndichotomy=" << (rep.dichotomy_holds ? "holds" : "VIOLATED")
            << (rep.perfect_on_served ? " (perfect quality on served set)"
                                      : " (degrades above gamma, serves below)")
            << "\n";
  return rep.dichotomy_holds ? 0 : 1;
}

int cmd_limits(const RunConfig& rc, std::optional<std::vector<double>> gammas,
               std::optional<std::vector<double>> phis) {
  LimitsReport rep = small_gamma_limits(
      rc.model, gammas.value_or(std::vector<double>{1e-2, 1e-3, 1e-4}),
      phis.value_or(std::vector<double>{0.0, 0.3, 0.6}));
  CsvWriter w(join_path(rc.output.dir, "limits.csv"), rc.output.precision);
  w.header({"gamma", "phi", "quality", "views", "engagement"});
  for (std::size_t g = 0; g < rep.gammas.size(); ++g)
    for (std::size_t p = 0; p < rep.phi_probes.size(); ++p)
      w.row({rep.gammas[g], rep.phi_probes[p], rep.quality[g][p],
             rep.views[g][p], rep.engagement[g][p]});
  std::cout << "regime=" << rep.regime;
  if (rep.regime == "finite")
    std::cout << " expected_limit=" << format_fixed(rep.expected_limit, 12);
  std::cout << "\n";
  return 0;
}

int cmd_figures(const RunConfig& rc) {
  const ModelConfig& m = rc.model;
  double phi_lo = std::max(0.0, m.dist.virtual_value(0.0));
  double phi_hi = m.dist.virtual_value(m.dist.upper());
  std::vector<double> phis = num::linspace(phi_lo, phi_hi, 401);
  auto grid = quality_grid(m);

  auto views_at = [&](double phi, double lam) {
    return m.cost.inverse_marginal(effective_virtual_value(m, phi, lam));
  };

  {
    CsvWriter w(join_path(rc.output.dir, "fig1.csv"), rc.output.precision);
    w.header({"phi", "v_perfect", "v_half"});
    for (double phi : phis)
      w.row({phi, views_at(phi, 1.0), views_at(phi, 0.5)});
  }
  std::vector<double> lam_opt(phis.size()), v_opt(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    QualityChoice q = optimal_quality_on(m, phis[i], grid);
    lam_opt[i] = q.quality;
    v_opt[i] = m.cost.inverse_marginal(q.value);
  }
  {
    CsvWriter w(join_path(rc.output.dir, "fig2a.csv"), rc.output.precision);
    w.header({"phi", "lambda_opt"});
    for (std::size_t i = 0; i < phis.size(); ++i) w.row({phis[i], lam_opt[i]});
  }
  {
    CsvWriter w(join_path(rc.output.dir, "fig2b.csv"), rc.output.precision);
    w.header({"phi", "v_opt", "v_perfect"});
    for (std::size_t i = 0; i < phis.size(); ++i)
      w.row({phis[i], v_opt[i], views_at(phis[i], 1.0)});
  }
  {
    CsvWriter w(join_path(rc.output.dir, "fig3.csv"), rc.output.precision);
    w.header({"phi", "engagement_opt", "engagement_perfect", "delta"});
    for (std::size_t i = 0; i < phis.size(); ++i) {
      double eo = m.attention.eval(lam_opt[i]) * v_opt[i];
      double ep = views_at(phis[i], 1.0);
      w.row({phis[i], eo, ep, eo - ep});
    }
  }
  return 0;
}

int cmd_verify(const RunConfig& rc, long probes) {
  const ModelConfig& m = rc.model;
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double phi_lo = m.dist.virtual_value(0.0);
  double phi_hi = m.dist.virtual_value(m.dist.upper());
  auto grid = quality_grid(m);
  oracle::OracleGrid og;
  long failures = 0;

  for (long i = 0; i < probes; ++i) {
    double phi = phi_lo + (phi_hi - phi_lo) * u01(rng);
    QualityChoice q = optimal_quality_on(m, phi, grid);
    oracle::BruteMax b = oracle::brute_argmax_quality(m, phi, og);
    double rtol = 1e-9 * std::max(1.0, std::abs(b.value));
    if (std::abs(q.quality - b.arg) > b.step + 1e-9 ||
        q.value < b.value - rtol) {
      std::cerr << "probe " << i << ": quality mismatch phi=" << phi
                << " solver=" << q.quality << " oracle=" << b.arg
                << " (step " << b.step << ")\n";
      ++failures;
    }
    oracle::BruteMax bv = oracle::brute_views(m, phi, q.quality, og);
    double vtol = bv.step + 1e-8 * (1.0 + std::abs(bv.arg));
    if (std::abs(optimal_views(m, phi, q.quality) - bv.arg) > vtol) {
      std::cerr << "probe " << i << ": views mismatch phi=" << phi << "\n";
      ++failures;
    }
  }
  std::cout << "oracle probes: " << (probes - failures) << "/" << probes
            << " ok\n";

  MechanismSolution sol = solve_optimal(m);
  ProfitReport p = profit(m, sol);
  double rel = std::abs(p.direct - p.virtual_surplus) /
               std::max(1e-12, std::abs(p.virtual_surplus));
  if (rel > 1e-6) {
    std::cerr << "revenue equivalence violated: direct=" << p.direct
              << " virtual=" << p.virtual_surplus << "\n";
    ++failures;
  }
  double a_scale = 0.0;
  for (std::size_t i = 0; i < sol.size(); ++i)
    a_scale = std::max(a_scale, sol.allocation(i));
  IcReport ic = verify_ic(m, sol);
  if (ic.max_violation > 1e-8 * std::max(1.0, m.dist.upper() * a_scale)) {
    std::cerr << "incentive violation " << ic.max_violation << "\n";
    ++failures;
  }
  SingleCertResult s = optimize_single(m);
  TwoCertResult t = optimize_two_certificate(m);
  double scale = std::max({1.0, s.profit, p.virtual_surplus});
  if (s.profit > t.profit + 1e-6 * scale ||
      t.profit > p.virtual_surplus + 1e-6 * scale) {
    std::cerr << "profit nesting violated: single=" << s.profit
              << " pair=" << t.profit << " menu=" << p.virtual_surplus << "\n";
    ++failures;
  }
  std::cout << "revenue_equivalence_rel=" << rel
            // + 0.0 keeps a zero violation from printing as "-0"
            << " ic_max_violation=" << ic.max_violation + 0.0
            << "\nprofit_single=" << format_fixed(s.profit, 12)
            << " profit_pair=" << format_fixed(t.profit, 12)
            << " profit_menu=" << format_fixed(p.virtual_surplus, 12) << "\n";
  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: FAILURES\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  Cli cli;
  try {
    cli = split_args(args);
  } catch (const std::exception& e) {
    return usage(e.what());
  }
  if (cli.words.empty()) return usage();
  const std::string& cmd = cli.words[0];
  static const char* known_cmds[] = {"solve",   "benchmark", "sweep",
                                     "compare-perfect", "limits", "figures",
                                     "verify"};
  bool cmd_ok = false;
  for (const char* k : known_cmds) cmd_ok = cmd_ok || cmd == k;
  if (!cmd_ok) return usage("unknown command '" + cmd + "'");

  if (!cli.opts.count("--config")) return usage("--config PATH is required");

  RunConfig rc;
  try {
    rc = load_config(cli.opts.at("--config"));
    if (cli.opts.count("--out")) rc.output.dir = cli.opts.at("--out");
    std::filesystem::create_directories(rc.output.dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd == "solve") {
      if (cli.words.size() != 1) return usage("solve takes no subcommand");
      return cmd_solve(rc);
    }
    if (cmd == "benchmark") {
      if (cli.words.size() != 2) return usage("benchmark needs a kind");
      std::optional<double> lam;
      if (cli.opts.count("--lambda"))
        lam = parse_double("--lambda", cli.opts.at("--lambda"));
      return cmd_benchmark(rc, cli.words[1], lam);
    }
    if (cmd == "sweep") {
      if (cli.words.size() != 2) return usage("sweep needs a parameter");
      std::optional<std::vector<double>> vals;
      if (cli.opts.count("--values"))
        vals = parse_list("--values", cli.opts.at("--values"));
      return cmd_sweep(rc, cli.words[1], vals);
    }
    if (cmd == "compare-perfect") return cmd_compare(rc);
    if (cmd == "limits") {
      std::optional<std::vector<double>> gs, ps;
      if (cli.opts.count("--gammas"))
        gs = parse_list("--gammas", cli.opts.at("--gammas"));
      if (cli.opts.count("--phis"))
        ps = parse_list("--phis", cli.opts.at("--phis"));
      return cmd_limits(rc, gs, ps);
    }
    if (cmd == "figures") return cmd_figures(rc);
    if (cmd == "verify") {
      long probes = 200;
      if (cli.opts.count("--probes"))
        probes = parse_int("--probes", cli.opts.at("--probes"));
      if (probes <= 0) return usage("--probes must be positive");
      return cmd_verify(rc, probes);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return usage();
}

}  // namespace certmenu
