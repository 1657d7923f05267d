#include "certmenu/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "certmenu/benchmarks.hpp"
#include "certmenu/numerics.hpp"

namespace certmenu {

namespace {

constexpr double kServedThreshold = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-cell Simpson of interp(values) * pdf over the solution grid.
double integrate_against_density(const ModelConfig& cfg,
                                 const std::vector<double>& theta,
                                 const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    double h = theta[i + 1] - theta[i];
    if (h <= 0.0) continue;
    double tm = theta[i] + 0.5 * h;
    double vm = 0.5 * (values[i] + values[i + 1]);
    total += num::simpson_cell(h, values[i] * cfg.dist.pdf(theta[i]),
                               vm * cfg.dist.pdf(tm),
                               values[i + 1] * cfg.dist.pdf(theta[i + 1]));
  }
  return total;
}

}  // namespace

double engagement(const ModelConfig& cfg, const MechanismSolution& sol) {
  std::vector<double> a(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i) a[i] = sol.allocation(i);
  return integrate_against_density(cfg, sol.theta, a);
}

double welfare_inner_mean(const AttentionSpec& att, double lambda) {
  if (lambda <= 0.0) return 0.0;
  // (1/L) * int_0^L q A'(q) dq with q = L t^3:  3 L * int_0^1 t^5 A'(L t^3) dt
  constexpr int kCells = 256;
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    double q = lambda * t * t * t;
    if (q <= 0.0) return 0.0;
    return t * t * t * t * t * att.deriv_safe(std::min(q, 1.0));
  };
  double total = 0.0;
  double h = 1.0 / kCells;
  for (int i = 0; i < kCells; ++i) {
    double a = i * h, b = a + h;
    total += h / 6.0 *
             (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
  }
  return 3.0 * lambda * total;
}

double consumer_welfare_power(const ModelConfig& cfg,
                              const MechanismSolution& sol) {
  std::vector<double> w(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i) {
    double lam = sol.quality[i];
    w[i] = sol.views_good[i] *
           (sol.attention[i] - welfare_inner_mean(cfg.attention, lam));
  }
  return integrate_against_density(cfg, sol.theta, w);
}

DiversityReport content_diversity(const ModelConfig& cfg,
                                  const MechanismSolution& sol) {
  DiversityReport rep;
  rep.measure = 0.0;
  std::size_t n = sol.size();
  auto crossing = [&](std::size_t i) {
    // Boundary between nodes i and i+1 where interpolated views cross the
    // served threshold, by bisection on the interpolant.
    double lo = sol.theta[i], hi = sol.theta[i + 1];
    auto v = [&](double th) {
      double t = (th - sol.theta[i]) / (sol.theta[i + 1] - sol.theta[i]);
      return sol.views_good[i] +
             t * (sol.views_good[i + 1] - sol.views_good[i]) -
             kServedThreshold;
    };
    bool rising = sol.views_good[i + 1] > sol.views_good[i];
    for (int it = 0; it < 100 && hi - lo > 1e-15 * cfg.dist.upper(); ++it) {
      double mid = 0.5 * (lo + hi);
      bool above = v(mid) > 0.0;
      if (above == rising)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  bool inside = sol.views_good[0] > kServedThreshold;
  double start = inside ? sol.theta[0] : 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    bool next = sol.views_good[i + 1] > kServedThreshold;
    if (!inside && next) {
      start = crossing(i);
      inside = true;
    } else if (inside && !next) {
      rep.intervals.emplace_back(start, crossing(i));
      inside = false;
    }
  }
  if (inside) rep.intervals.emplace_back(start, sol.theta.back());
  for (const auto& [a, b] : rep.intervals)
    rep.measure += cfg.dist.cdf(b) - cfg.dist.cdf(a);
  return rep;
}

ComparisonReport compare_to_perfect(const ModelConfig& cfg) {
  MechanismSolution opt = solve_optimal(cfg);
  ComparisonReport rep;
  rep.theta = opt.theta;
  rep.phi = opt.phi;
  rep.quality_opt = opt.quality;
  rep.views_opt = opt.views_good;
  std::size_t n = opt.size();
  rep.engagement_opt.resize(n);
  rep.views_perfect.resize(n);
  rep.engagement_perfect.resize(n);
  rep.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.engagement_opt[i] = opt.allocation(i);
    double v1 = cfg.cost.inverse_marginal(rep.phi[i] - cfg.gamma);
    rep.views_perfect[i] = v1;
    rep.engagement_perfect[i] = v1;  // A(1) = 1
    rep.delta[i] = rep.engagement_opt[i] - rep.engagement_perfect[i];
  }

  MechanismSolution perf = enforced_perfect(cfg).mechanism;
  rep.total_opt = engagement(cfg, opt);
  rep.total_perfect = engagement(cfg, perf);
  rep.diversity_opt = content_diversity(cfg, opt);
  rep.diversity_perfect = content_diversity(cfg, perf);

  rep.perfect_on_served = true;
  rep.low_quality_above_gamma = false;
  for (std::size_t i = 0; i < n; ++i) {
    bool served = rep.views_opt[i] > kServedThreshold;
    bool degraded = rep.quality_opt[i] < 1.0 - 1e-6;
    if (served && degraded) rep.perfect_on_served = false;
    if (rep.phi[i] > cfg.gamma + 1e-12 && degraded)
      rep.low_quality_above_gamma = true;
  }
  // Pointwise probes just below the phi = gamma threshold (grid resolution
  // can miss a thin served band).
  rep.serves_below_gamma = false;
  auto grid = quality_grid(cfg);
  for (double scale : {1e-3, 1e-5, 1e-7}) {
    double phi_target = cfg.gamma - scale * std::max(1.0, cfg.gamma);
    if (phi_target <= cfg.dist.virtual_value(0.0)) continue;
    double th = cfg.dist.virtual_value_inverse(phi_target);
    if (th <= 0.0) continue;
    double phi = cfg.dist.virtual_value(th);
    if (phi >= cfg.gamma) continue;
    QualityChoice q = optimal_quality_on(cfg, phi, grid);
    if (cfg.cost.inverse_marginal(q.value) > kServedThreshold) {
      rep.serves_below_gamma = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n && !rep.serves_below_gamma; ++i)
    if (rep.phi[i] < cfg.gamma - 1e-12 &&
        rep.views_opt[i] > kServedThreshold)
      rep.serves_below_gamma = true;

  rep.dichotomy_holds =
      rep.perfect_on_served ||
      (rep.low_quality_above_gamma && rep.serves_below_gamma);
  return rep;
}

namespace {

using Setter = void (*)(ModelConfig&, double);

// Find the index of a shared uniform node inside a solution grid (insertions
// only ever add nodes, so the uniform ones are present exactly).
std::size_t node_index(const std::vector<double>& theta, double t) {
  auto it = std::lower_bound(theta.begin(), theta.end(), t - 1e-12);
  return std::min<std::size_t>(static_cast<std::size_t>(it - theta.begin()),
                               theta.size() - 1);
}

SweepResult run_sweep(ModelConfig cfg, const std::string& param,
                      const std::vector<double>& values, Setter set) {
  SweepResult res;
  res.param = param;
  res.theta = num::linspace(0.0, cfg.dist.upper(), cfg.grid.theta_points);
  res.monotone_ok = true;
  res.worst_violation = 0.0;
  for (double v : values) {
    ModelConfig c = cfg;
    set(c, v);
    c.validate();
    MechanismSolution sol = solve_optimal(c);
    SweepRow row;
    row.value = v;
    row.profit = profit(c, sol).virtual_surplus;
    row.engagement = engagement(c, sol);
    row.welfare = consumer_welfare_power(c, sol);
    row.diversity = content_diversity(c, sol).measure;
    row.quality_min_served = 1.0;
    row.quality_max = 0.0;
    std::vector<double> q(res.theta.size()), vg(res.theta.size());
    for (std::size_t j = 0; j < res.theta.size(); ++j) {
      std::size_t k = node_index(sol.theta, res.theta[j]);
      q[j] = sol.quality[k];
      vg[j] = sol.views_good[k];
      row.quality_max = std::max(row.quality_max, q[j]);
      if (vg[j] > kServedThreshold)
        row.quality_min_served = std::min(row.quality_min_served, q[j]);
    }
    res.rows.push_back(row);
    res.quality.push_back(std::move(q));
    res.views.push_back(std::move(vg));
  }
  return res;
}

void flag(SweepResult& res, double deficit) {
  res.worst_violation = std::max(res.worst_violation, deficit);
}

}  // namespace

SweepResult sweep_gamma(ModelConfig cfg, const std::vector<double>& values) {
  SweepResult res = run_sweep(
      cfg, "gamma", values, [](ModelConfig& c, double v) { c.gamma = v; });
  // Quality rises pointwise with the subsidy, for every type.
  for (std::size_t k = 0; k + 1 < values.size(); ++k)
    for (std::size_t j = 0; j < res.theta.size(); ++j)
      flag(res, res.quality[k][j] - res.quality[k + 1][j]);
  res.monotone_ok = res.worst_violation <= 1e-6;
  res.note = "quality nondecreasing in gamma at every type";
  return res;
}

SweepResult sweep_kappa(ModelConfig cfg, const std::vector<double>& values) {
  SweepResult res = run_sweep(
      cfg, "kappa", values,
      [](ModelConfig& c, double v) { c.cost.kappa = v; });
  // Quality and the served set ignore the cost scale; views shrink with it.
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    for (std::size_t j = 0; j < res.theta.size(); ++j) {
      flag(res, std::abs(res.quality[k][j] - res.quality[k + 1][j]) - 1e-8);
      flag(res, res.views[k + 1][j] - res.views[k][j] - 1e-10);
      bool s0 = res.views[k][j] > kServedThreshold;
      bool s1 = res.views[k + 1][j] > kServedThreshold;
      if (s0 != s1) flag(res, 1.0);
    }
  }
  res.monotone_ok = res.worst_violation <= 0.0;
  res.note = "quality and served set invariant in kappa; views nonincreasing";
  return res;
}

SweepResult sweep_alpha(ModelConfig cfg, const std::vector<double>& values) {
  SweepResult res = run_sweep(
      cfg, "alpha", values,
      [](ModelConfig& c, double v) { c.attention.alpha = v; });
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    for (std::size_t j = 0; j < res.theta.size(); ++j) {
      flag(res, res.quality[k][j] - res.quality[k + 1][j] - 1e-6);
      // Serving sets shrink as attention gets more convex.
      if (res.views[k + 1][j] > 1e-9 && res.views[k][j] < 1e-15)
        flag(res, 1.0);
    }
  }
  res.monotone_ok = res.worst_violation <= 0.0;
  res.note = "quality nondecreasing in alpha; served sets nested decreasing";
  return res;
}

SweepResult sweep_losses(ModelConfig cfg, const std::vector<double>& values) {
  SweepResult res = run_sweep(
      cfg, "loss_b", values,
      [](ModelConfig& c, double v) { c.attention.loss_b = v; });
  // Where the higher-loss menu serves, the lower-loss menu serves too and
  // certifies weakly lower quality.
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    for (std::size_t j = 0; j < res.theta.size(); ++j) {
      if (res.views[k + 1][j] <= kServedThreshold) continue;
      flag(res, res.quality[k][j] - res.quality[k + 1][j] - 1e-6);
      if (res.views[k + 1][j] > 1e-9 && res.views[k][j] < 1e-15)
        flag(res, 1.0);
    }
  }
  res.monotone_ok = res.worst_violation <= 0.0;
  res.note = "quality nondecreasing in loss_b on the common served set";
  return res;
}

SweepResult sweep_addiction(ModelConfig cfg,
                            const std::vector<double>& values) {
  SweepResult res = run_sweep(
      cfg, "addiction_z", values,
      [](ModelConfig& c, double v) { c.attention.addiction_z = v; });
  // More addictive attention: quality falls, the served set grows.
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    for (std::size_t j = 0; j < res.theta.size(); ++j) {
      if (res.views[k][j] <= kServedThreshold) continue;
      flag(res, res.quality[k + 1][j] - res.quality[k][j] - 1e-6);
      if (res.views[k][j] > 1e-9 && res.views[k + 1][j] < 1e-15)
        flag(res, 1.0);
    }
  }
  res.monotone_ok = res.worst_violation <= 0.0;
  res.note = "quality nonincreasing in addiction_z on the common served set";
  return res;
}

LimitsReport small_gamma_limits(const ModelConfig& cfg,
                                const std::vector<double>& gammas,
                                const std::vector<double>& phi_probes) {
  LimitsReport rep;
  rep.alpha = cfg.attention.alpha;
  rep.sigma = cfg.cost.sigma;
  double prod = rep.alpha * rep.sigma;
  rep.expected_limit = kNaN;
  if (std::abs(prod - 1.0) <= 1e-12) {
    rep.regime = "finite";
    rep.expected_limit =
        std::pow(rep.alpha / cfg.cost.kappa, 1.0 / (rep.sigma - 1.0));
  } else {
    rep.regime = prod > 1.0 ? "vanishing" : "diverging";
  }
  rep.gammas = gammas;
  rep.phi_probes = phi_probes;
  for (double g : gammas) {
    ModelConfig c = cfg;
    c.gamma = g;
    c.validate();
    auto grid = quality_grid(c);
    std::vector<double> q, v, e;
    for (double phi : phi_probes) {
      QualityChoice choice = optimal_quality_on(c, phi, grid);
      double views = c.cost.inverse_marginal(choice.value);
      q.push_back(choice.quality);
      v.push_back(views);
      e.push_back(c.attention.eval(choice.quality) * views);
    }
    rep.quality.push_back(std::move(q));
    rep.views.push_back(std::move(v));
    rep.engagement.push_back(std::move(e));
  }
  return rep;
}

}  // namespace certmenu
