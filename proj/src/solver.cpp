#include "certmenu/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "certmenu/numerics.hpp"

namespace certmenu {

namespace {

void require_regular(const ModelConfig& cfg) {
  auto reg = cfg.dist.check_regularity();
  if (!reg.regular)
    throw std::invalid_argument(
        "dist must be regular (nondecreasing virtual value); violation near "
        "theta=" +
        std::to_string(reg.violation_at));
}

Diagnostics compute_diagnostics(const MechanismSolution& s) {
  Diagnostics d;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    d.quality_drop = std::max(d.quality_drop, s.quality[i] - s.quality[i + 1]);
    d.views_drop =
        std::max(d.views_drop, s.views_good[i] - s.views_good[i + 1]);
    d.allocation_drop =
        std::max(d.allocation_drop, s.allocation(i) - s.allocation(i + 1));
  }
  return d;
}

}  // namespace

double effective_virtual_value(const ModelConfig& cfg, double phi_hat,
                               double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::domain_error("quality must lie in (0,1]: lambda=" +
                            std::to_string(lambda));
  double a = cfg.attention.eval(lambda);
  return (phi_hat + (1.0 - lambda) / lambda) * a - cfg.gamma / lambda;
}

double quality_grid_floor(const ModelConfig& cfg) {
  // Push the log grid low enough that maximizers of order A^{-1}(gamma)
  // (the small-gamma regime) stay inside the search range.
  double target = std::min(cfg.gamma, 1.0) * 1e-3;
  double base = cfg.attention.inverse(std::min(target, 1.0));
  if (base <= 0.0) return 1e-9;  // A(0+) already above target (addiction)
  return std::clamp(0.01 * base, 1e-300, 1e-6);
}

std::vector<double> quality_grid(const ModelConfig& cfg) {
  double floor = quality_grid_floor(cfg);
  int n = cfg.grid.lambda_coarse_points;
  int n_uni = std::max(n / 2, 16);
  double decades = std::log10(0.1 / floor);
  int n_log = std::max(n - n_uni, static_cast<int>(std::ceil(6.0 * decades)));
  std::vector<double> grid = num::logspace(floor, 0.1, n_log + 1);
  std::vector<double> uni = num::linspace(0.1, 1.0, n_uni + 1);
  for (double x : uni)
    if (x > grid.back()) grid.push_back(x);
  if (auto k = cfg.attention.kink())
    if (*k > floor && *k < 1.0) num::insert_sorted_unique(grid, *k, 1e-15);
  return grid;
}

QualityChoice optimal_quality_on(const ModelConfig& cfg, double phi_hat,
                                 const std::vector<double>& grid) {
  auto R = [&](double lam) {
    double a = cfg.attention.eval(lam);
    return (phi_hat + (1.0 - lam) / lam) * a - cfg.gamma / lam;
  };

  std::size_t n = grid.size();
  std::vector<double> val(n);
  for (std::size_t i = 0; i < n; ++i) val[i] = R(grid[i]);

  // Refine every local maximum of the coarse profile, then keep the largest
  // maximizer among candidates within 1e-9 of the best value.
  std::vector<num::MaxResult> cand;
  for (std::size_t i = 0; i < n; ++i) {
    bool up_ok = (i == 0) || val[i] >= val[i - 1];
    bool down_ok = (i + 1 == n) || val[i] >= val[i + 1];
    if (!(up_ok && down_ok)) continue;
    double lo = i == 0 ? grid[0] : grid[i - 1];
    double hi = i + 1 == n ? grid[n - 1] : grid[i + 1];
    if (hi > lo)
      cand.push_back(num::golden_max_log(R, lo, hi, cfg.grid.refine_tol));
    else
      cand.push_back({grid[i], val[i]});
  }
  cand.push_back({1.0, val.back()});  // grid always ends at 1

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cand) best = std::max(best, c.value);
  QualityChoice out{cand.front().x, cand.front().value};
  for (const auto& c : cand)
    if (c.value >= best - 1e-9 && c.x >= out.quality) out = {c.x, c.value};
  return out;
}

QualityChoice optimal_quality(const ModelConfig& cfg, double phi_hat) {
  return optimal_quality_on(cfg, phi_hat, quality_grid(cfg));
}

double optimal_views(const ModelConfig& cfg, double phi_hat, double lambda) {
  return cfg.cost.inverse_marginal(
      effective_virtual_value(cfg, phi_hat, lambda));
}

std::vector<double> solve_grid(const ModelConfig& cfg) {
  double top = cfg.dist.upper();
  std::vector<double> nodes = num::linspace(0.0, top, cfg.grid.theta_points);
  double merge_tol = 1e-12 * top;
  if (cfg.dist.family == TypeDistribution::Family::tabulated)
    for (double k : cfg.dist.knots)
      if (k > 0.0 && k < top) num::insert_sorted_unique(nodes, k, merge_tol);

  // Serving cutoff: smallest theta whose best effective virtual value is
  // nonnegative.  The top type always clears it (phi(top) = top > gamma).
  auto grid = quality_grid(cfg);
  auto g = [&](double th) {
    return optimal_quality_on(cfg, cfg.dist.virtual_value(th), grid).value;
  };
  if (g(0.0) < 0.0) {
    double cut = num::bisect_root(g, 0.0, top, merge_tol);
    if (cut > 0.0 && cut < top) num::insert_sorted_unique(nodes, cut, merge_tol);
  }
  return nodes;
}

namespace {

void fill_from_quality(const ModelConfig& cfg, MechanismSolution& s) {
  std::size_t n = s.theta.size();
  s.views_bad.resize(n);
  s.attention.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.attention[i] = cfg.attention.eval(s.quality[i]);
    s.views_bad[i] =
        s.views_good[i] * (1.0 - s.quality[i]) / s.quality[i];
  }
}

}  // namespace

MechanismSolution solve_optimal(const ModelConfig& cfg) {
  cfg.validate();
  require_regular(cfg);

  MechanismSolution s;
  s.label = "optimal";
  s.theta = solve_grid(cfg);
  std::size_t n = s.theta.size();
  s.phi.resize(n);
  s.quality.resize(n);
  s.views_good.resize(n);

  auto grid = quality_grid(cfg);
  num::parallel_for(n, [&](std::size_t i) {
    double phi = cfg.dist.virtual_value(s.theta[i]);
    QualityChoice q = optimal_quality_on(cfg, phi, grid);
    s.phi[i] = phi;
    s.quality[i] = q.quality;
    s.views_good[i] = cfg.cost.inverse_marginal(q.value);
  });

  fill_from_quality(cfg, s);
  s.diag = compute_diagnostics(s);
  price_schedule(cfg, s);
  return s;
}

MechanismSolution closed_form_linear(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.attention.alpha != 1.0 || cfg.attention.has_transform())
    throw std::invalid_argument(
        "closed form requires power attention with alpha=1 and no transforms");
  require_regular(cfg);

  double top = cfg.dist.upper();
  double g = cfg.gamma;
  std::vector<double> nodes = num::linspace(0.0, top, cfg.grid.theta_points);
  double merge_tol = 1e-12 * top;
  // Serving cutoff (phi where the maximized R crosses 0) and the point where
  // quality saturates at 1.
  double phi_cut = g >= 0.5 ? g : 1.0 - 1.0 / (4.0 * g);
  double phi_bot = cfg.dist.virtual_value(0.0);
  double phi_top = cfg.dist.virtual_value(top);
  for (double phi_kink : {phi_cut, 1.0 - g}) {
    if (phi_kink <= phi_bot || phi_kink >= phi_top) continue;
    double th = cfg.dist.virtual_value_inverse(phi_kink, merge_tol);
    if (th > 0.0 && th < top) num::insert_sorted_unique(nodes, th, merge_tol);
  }

  MechanismSolution s;
  s.label = "closed-form";
  s.theta = std::move(nodes);
  std::size_t n = s.theta.size();
  s.phi.resize(n);
  s.quality.resize(n);
  s.views_good.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double phi = cfg.dist.virtual_value(s.theta[i]);
    s.phi[i] = phi;
    double lam, r;
    if (phi >= 1.0 - g) {
      lam = 1.0;
      r = phi - g;
    } else {
      lam = std::sqrt(g / (1.0 - phi));
      r = 1.0 - 2.0 * std::sqrt(g * (1.0 - phi));
    }
    s.quality[i] = lam;
    s.views_good[i] = cfg.cost.inverse_marginal(r);
  }
  fill_from_quality(cfg, s);
  s.diag = compute_diagnostics(s);
  price_schedule(cfg, s);
  return s;
}

void price_schedule(const ModelConfig& cfg, MechanismSolution& sol) {
  (void)cfg;
  std::size_t n = sol.size();
  std::vector<double> a(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = sol.allocation(i);
    scale = std::max(scale, std::abs(a[i]));
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (a[i] - a[i + 1] > 1e-9 * std::max(scale, 1.0))
      throw std::invalid_argument(
          "price schedule requires a nondecreasing allocation");
  std::vector<double> u = num::cumtrapz(sol.theta, a);
  sol.price.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sol.price[i] = sol.theta[i] * a[i] - u[i];
}

IcReport verify_ic(const ModelConfig& cfg, const MechanismSolution& sol) {
  (void)cfg;
  std::size_t n = sol.size();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = sol.allocation(i);
  IcReport rep{-std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    double own = sol.theta[i] * a[i] - sol.price[i];
    if (-own > rep.max_violation) rep = {-own, i, i};  // opt-out
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double gain = sol.theta[i] * a[j] - sol.price[j] - own;
      if (gain > rep.max_violation) rep = {gain, i, j};
    }
  }
  return rep;
}

ProfitReport profit(const ModelConfig& cfg, const MechanismSolution& sol) {
  if (sol.price.size() != sol.size())
    throw std::invalid_argument("profit requires a priced mechanism");
  std::size_t n = sol.size();
  std::vector<double> a(n), common(n), dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = sol.allocation(i);
    common[i] = sol.attention[i] * sol.views_bad[i] -
                cfg.gamma * (sol.views_good[i] + sol.views_bad[i]) -
                cfg.cost.cost(sol.views_good[i]);
  }
  std::vector<double> u = num::cumtrapz(sol.theta, a);
  // Deviation of the stored prices from the envelope formula (zero for
  // solver output); interpolated at midpoints so hand-built prices are
  // integrated faithfully too.
  for (std::size_t i = 0; i < n; ++i)
    dev[i] = sol.price[i] - (sol.theta[i] * a[i] - u[i]);

  double direct = 0.0, virt = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = sol.theta[i + 1] - sol.theta[i];
    if (h <= 0.0) continue;
    double tm = sol.theta[i] + 0.5 * h;
    double f0 = cfg.dist.pdf(sol.theta[i]);
    double f1 = cfg.dist.pdf(sol.theta[i + 1]);
    double fm = cfg.dist.pdf(tm);
    double am = 0.5 * (a[i] + a[i + 1]);
    // Rebuild the type-independent term from interpolated primitives instead
    // of interpolating it directly: the cost of views is convex, so averaging
    // c(v) across the cell would bias every cell downward.
    double vgm = 0.5 * (sol.views_good[i] + sol.views_good[i + 1]);
    double vbm = 0.5 * (sol.views_bad[i] + sol.views_bad[i + 1]);
    double atm = 0.5 * (sol.attention[i] + sol.attention[i + 1]);
    double cm = atm * vbm - cfg.gamma * (vgm + vbm) - cfg.cost.cost(vgm);
    double um = u[i] + h * (3.0 * a[i] + a[i + 1]) / 8.0;
    double pm = tm * am - um + 0.5 * (dev[i] + dev[i + 1]);
    double phim = cfg.dist.virtual_value(tm);
    direct += num::simpson_cell(h, (sol.price[i] + common[i]) * f0,
                                (pm + cm) * fm,
                                (sol.price[i + 1] + common[i + 1]) * f1);
    virt += num::simpson_cell(h, (sol.phi[i] * a[i] + common[i]) * f0,
                              (phim * am + cm) * fm,
                              (sol.phi[i + 1] * a[i + 1] + common[i + 1]) * f1);
  }
  return {direct, virt};
}

std::vector<double> message_quality(const ModelConfig& cfg,
                                    const PooledMechanism& pooled) {
  std::size_t n = pooled.theta.size();
  int max_msg = 0;
  for (int m : pooled.message) max_msg = std::max(max_msg, m);
  std::vector<double> num_good(static_cast<std::size_t>(max_msg) + 1, 0.0);
  std::vector<double> den_all(static_cast<std::size_t>(max_msg) + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (pooled.theta[i] - pooled.theta[i - 1]);
    if (i + 1 < n) w += 0.5 * (pooled.theta[i + 1] - pooled.theta[i]);
    w *= cfg.dist.pdf(pooled.theta[i]);
    auto m = static_cast<std::size_t>(pooled.message[i]);
    num_good[m] += w * pooled.views_good[i];
    den_all[m] += w * (pooled.views_good[i] + pooled.views_bad[i]);
  }
  std::vector<double> q(num_good.size(), 1.0);
  for (std::size_t m = 0; m < q.size(); ++m)
    if (den_all[m] > 1e-300) q[m] = num_good[m] / den_all[m];
  return q;  // messages with zero total views keep the conventional 1.0
}

MechanismSolution canonicalize(const ModelConfig& cfg,
                               const PooledMechanism& pooled) {
  std::vector<double> q = message_quality(cfg, pooled);
  std::size_t n = pooled.theta.size();
  MechanismSolution s;
  s.label = "canonical";
  s.theta = pooled.theta;
  s.phi.resize(n);
  s.quality.resize(n);
  s.views_good = pooled.views_good;
  s.views_bad.resize(n);
  s.attention.resize(n);
  s.price = pooled.price;
  for (std::size_t i = 0; i < n; ++i) {
    double lam = q[static_cast<std::size_t>(pooled.message[i])];
    s.phi[i] = cfg.dist.virtual_value(s.theta[i]);
    s.quality[i] = lam;
    s.attention[i] = cfg.attention.eval(lam);
    s.views_bad[i] = lam > 0.0
                         ? pooled.views_good[i] * (1.0 - lam) / lam
                         : pooled.views_bad[i];
  }
  s.diag = compute_diagnostics(s);
  return s;
}

namespace {

double trapezoid_direct(const ModelConfig& cfg,
                        const std::vector<double>& theta,
                        const std::vector<double>& price,
                        const std::vector<double>& att,
                        const std::vector<double>& vg,
                        const std::vector<double>& vb) {
  std::size_t n = theta.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (theta[i] - theta[i - 1]);
    if (i + 1 < n) w += 0.5 * (theta[i + 1] - theta[i]);
    double integrand = price[i] + att[i] * vb[i] -
                       cfg.gamma * (vg[i] + vb[i]) - cfg.cost.cost(vg[i]);
    total += w * cfg.dist.pdf(theta[i]) * integrand;
  }
  return total;
}

}  // namespace

double pooled_direct_profit(const ModelConfig& cfg,
                            const PooledMechanism& pooled) {
  std::vector<double> q = message_quality(cfg, pooled);
  std::size_t n = pooled.theta.size();
  std::vector<double> att(n);
  for (std::size_t i = 0; i < n; ++i)
    att[i] = cfg.attention.eval(q[static_cast<std::size_t>(pooled.message[i])]);
  return trapezoid_direct(cfg, pooled.theta, pooled.price, att,
                          pooled.views_good, pooled.views_bad);
}

double direct_profit_trapezoid(const ModelConfig& cfg,
                               const MechanismSolution& sol) {
  return trapezoid_direct(cfg, sol.theta, sol.price, sol.attention,
                          sol.views_good, sol.views_bad);
}

}  // namespace certmenu
