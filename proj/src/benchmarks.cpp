#include "certmenu/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "certmenu/numerics.hpp"

namespace certmenu {

namespace {

// Per-type profit of selling v = c'^{-1}(max{r,0}) views at effective
// virtual value r: r*v - c(v).
double point_profit(const CostSpec& cost, double r) {
  if (r <= 0.0) return 0.0;
  double v = cost.inverse_marginal(r);
  return r * v - cost.cost(v);
}

std::vector<double> base_nodes(const ModelConfig& cfg) {
  std::vector<double> nodes =
      num::linspace(0.0, cfg.dist.upper(), cfg.grid.theta_points);
  if (cfg.dist.family == TypeDistribution::Family::tabulated) {
    double merge_tol = 1e-12 * cfg.dist.upper();
    for (double k : cfg.dist.knots)
      if (k > 0.0 && k < cfg.dist.upper())
        num::insert_sorted_unique(nodes, k, merge_tol);
  }
  return nodes;
}

double check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::domain_error("certificate quality must lie in (0,1]: lambda=" +
                            std::to_string(lambda));
  return lambda;
}

}  // namespace

MechanismSolution planner(const ModelConfig& cfg) {
  cfg.validate();
  MechanismSolution s;
  s.label = "planner";
  s.theta = base_nodes(cfg);
  std::size_t n = s.theta.size();
  double v = cfg.cost.inverse_marginal(1.0 - cfg.gamma);
  s.phi.resize(n);
  s.quality.assign(n, 1.0);
  s.views_good.assign(n, v);
  for (std::size_t i = 0; i < n; ++i)
    s.phi[i] = cfg.dist.virtual_value(s.theta[i]);
  s.views_bad.assign(n, 0.0);
  s.attention.assign(n, 1.0);
  price_schedule(cfg, s);  // constant allocation: zero prices
  return s;
}

double serving_cutoff(const ModelConfig& cfg, double lambda) {
  check_lambda(lambda);
  double top = cfg.dist.upper();
  auto r = [&](double th) {
    return effective_virtual_value(cfg, cfg.dist.virtual_value(th), lambda);
  };
  if (cfg.attention.eval(lambda) <= 0.0) return top;  // below a loss kink
  if (r(0.0) >= 0.0) return 0.0;
  if (r(top) < 0.0) return top;
  return num::bisect_root(r, 0.0, top, 1e-13 * top);
}

namespace {

// Virtual-surplus profit of a single certificate, cutoff inserted.
double single_profit(const ModelConfig& cfg, double lambda,
                     const std::vector<double>& base) {
  double cut = serving_cutoff(cfg, lambda);
  double top = cfg.dist.upper();
  if (cut >= top) return 0.0;
  std::vector<double> nodes = base;
  if (cut > 0.0) num::insert_sorted_unique(nodes, cut, 1e-13 * top);
  auto integrand = [&](double th) {
    if (th < cut) return 0.0;
    double r =
        effective_virtual_value(cfg, cfg.dist.virtual_value(th), lambda);
    return point_profit(cfg.cost, r) * cfg.dist.pdf(th);
  };
  return num::integrate_cells(integrand, nodes);
}

}  // namespace

SingleCertResult single_certificate(const ModelConfig& cfg, double lambda) {
  cfg.validate();
  check_lambda(lambda);
  double top = cfg.dist.upper();
  std::vector<double> nodes = base_nodes(cfg);
  double cut = serving_cutoff(cfg, lambda);
  if (cut > 0.0 && cut < top)
    num::insert_sorted_unique(nodes, cut, 1e-13 * top);

  MechanismSolution s;
  s.label = "single-certificate";
  s.theta = std::move(nodes);
  std::size_t n = s.theta.size();
  s.phi.resize(n);
  s.quality.assign(n, lambda);
  s.views_good.resize(n);
  s.views_bad.resize(n);
  s.attention.assign(n, cfg.attention.eval(lambda));
  for (std::size_t i = 0; i < n; ++i) {
    s.phi[i] = cfg.dist.virtual_value(s.theta[i]);
    double r = effective_virtual_value(cfg, s.phi[i], lambda);
    s.views_good[i] = cfg.cost.inverse_marginal(r);
    s.views_bad[i] = s.views_good[i] * (1.0 - lambda) / lambda;
  }
  price_schedule(cfg, s);
  return {lambda, single_profit(cfg, lambda, base_nodes(cfg)), std::move(s)};
}

SingleCertResult optimize_single(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<double> base = base_nodes(cfg);
  std::vector<double> grid = quality_grid(cfg);
  auto objective = [&](double lam) { return single_profit(cfg, lam, base); };

  std::size_t n = grid.size();
  std::vector<double> val(n);
  num::parallel_for(n, [&](std::size_t i) { val[i] = objective(grid[i]); });

  std::vector<num::MaxResult> cand;
  for (std::size_t i = 0; i < n; ++i) {
    bool up_ok = (i == 0) || val[i] >= val[i - 1];
    bool down_ok = (i + 1 == n) || val[i] >= val[i + 1];
    if (!(up_ok && down_ok)) continue;
    double lo = i == 0 ? grid[0] : grid[i - 1];
    double hi = i + 1 == n ? grid[n - 1] : grid[i + 1];
    cand.push_back(hi > lo ? num::golden_max_log(objective, lo, hi,
                                                 cfg.grid.refine_tol)
                           : num::MaxResult{grid[i], val[i]});
  }
  cand.push_back({1.0, val.back()});

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cand) best = std::max(best, c.value);
  num::MaxResult pick = cand.front();
  for (const auto& c : cand)
    if (c.value >= best - 1e-9 && c.x >= pick.x) pick = c;
  return single_certificate(cfg, pick.x);
}

SingleCertResult enforced_perfect(const ModelConfig& cfg) {
  return single_certificate(cfg, 1.0);
}

double crossing_theta(const ModelConfig& cfg, double lambda_lo,
                      double lambda_hi) {
  check_lambda(lambda_lo);
  check_lambda(lambda_hi);
  double top = cfg.dist.upper();
  auto offset = [&](double lam) {
    double a = cfg.attention.eval(lam);
    return a * (1.0 - lam) / lam - cfg.gamma / lam;
  };
  double a_lo = cfg.attention.eval(lambda_lo);
  double a_hi = cfg.attention.eval(lambda_hi);
  if (a_hi <= a_lo) {
    // R(., hi) - R(., lo) does not depend on phi: constant sign.
    return offset(lambda_hi) >= offset(lambda_lo) ? 0.0 : top;
  }
  double phi_star = (offset(lambda_lo) - offset(lambda_hi)) / (a_hi - a_lo);
  // A crossing outside the virtual-value range means one certificate wins
  // everywhere; clamp so the inverse maps it to the matching endpoint.
  phi_star = std::clamp(phi_star, cfg.dist.virtual_value(0.0),
                        cfg.dist.virtual_value(top));
  return cfg.dist.virtual_value_inverse(phi_star, 1e-13 * top);
}

double two_certificate_profit(const ModelConfig& cfg, double lambda_lo,
                              double lambda_hi, double theta_hat) {
  cfg.validate();
  check_lambda(lambda_lo);
  check_lambda(lambda_hi);
  double top = cfg.dist.upper();
  if (!(theta_hat >= 0.0 && theta_hat <= top))
    throw std::domain_error("theta_hat outside the type support");

  std::vector<double> nodes = base_nodes(cfg);
  double merge_tol = 1e-13 * top;
  if (theta_hat > 0.0 && theta_hat < top)
    num::insert_sorted_unique(nodes, theta_hat, merge_tol);
  double cut_lo = serving_cutoff(cfg, lambda_lo);
  double cut_hi = serving_cutoff(cfg, lambda_hi);
  if (cut_lo > 0.0 && cut_lo < theta_hat)
    num::insert_sorted_unique(nodes, cut_lo, merge_tol);
  if (cut_hi > theta_hat && cut_hi < top)
    num::insert_sorted_unique(nodes, cut_hi, merge_tol);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = nodes[i + 1];
    double h = b - a;
    if (h <= 0.0) continue;
    double lam = 0.5 * (a + b) < theta_hat ? lambda_lo : lambda_hi;
    auto f = [&](double th) {
      double r =
          effective_virtual_value(cfg, cfg.dist.virtual_value(th), lam);
      return point_profit(cfg.cost, r) * cfg.dist.pdf(th);
    };
    total += h / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return total;
}

TwoCertResult optimize_two_certificate(const ModelConfig& cfg) {
  cfg.validate();
  double top = cfg.dist.upper();
  std::vector<double> grid = quality_grid(cfg);
  std::vector<double> nodes = base_nodes(cfg);
  std::size_t nl = grid.size();
  std::size_t nn = nodes.size();

  // Cumulative per-certificate profit along the shared type grid, so each
  // (lo, hi) pair costs O(1) in the coarse stage.
  std::vector<std::vector<double>> cum(nl, std::vector<double>(nn, 0.0));
  num::parallel_for(nl, [&](std::size_t k) {
    auto f = [&](double th) {
      double r =
          effective_virtual_value(cfg, cfg.dist.virtual_value(th), grid[k]);
      return point_profit(cfg.cost, r) * cfg.dist.pdf(th);
    };
    for (std::size_t j = 0; j + 1 < nn; ++j) {
      double h = nodes[j + 1] - nodes[j];
      cum[k][j + 1] =
          cum[k][j] + h / 6.0 * (f(nodes[j]) + 4.0 * f(nodes[j] + 0.5 * h) +
                                 f(nodes[j + 1]));
    }
  });
  auto cum_at = [&](std::size_t k, double th) {
    if (th <= nodes.front()) return 0.0;
    if (th >= nodes.back()) return cum[k][nn - 1];
    auto it = std::upper_bound(nodes.begin(), nodes.end(), th);
    std::size_t j = static_cast<std::size_t>(it - nodes.begin()) - 1;
    auto f = [&](double t) {
      double r =
          effective_virtual_value(cfg, cfg.dist.virtual_value(t), grid[k]);
      return point_profit(cfg.cost, r) * cfg.dist.pdf(t);
    };
    double h = th - nodes[j];
    return cum[k][j] +
           h / 6.0 * (f(nodes[j]) + 4.0 * f(nodes[j] + 0.5 * h) + f(th));
  };

  double best = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bk = nl - 1;
  for (std::size_t k = 0; k < nl; ++k) {
    for (std::size_t i = 0; i <= k; ++i) {
      double th = crossing_theta(cfg, grid[i], grid[k]);
      double p = cum_at(i, th) + cum[k][nn - 1] - cum_at(k, th);
      // Prefer the larger pair among near-ties, matching the quality search.
      if (p > best + 1e-9 ||
          (p >= best - 1e-9 && (k > bk || (k == bk && i > bi)))) {
        best = p;
        bi = i;
        bk = k;
      }
    }
  }

  double lo = grid[bi], hi = grid[bk];
  auto exact = [&](double l, double h) {
    return two_certificate_profit(cfg, std::min(l, h), std::max(l, h),
                                  crossing_theta(cfg, std::min(l, h),
                                                 std::max(l, h)));
  };
  double floor = quality_grid_floor(cfg);
  for (int round = 0; round < 2; ++round) {
    double hi_lo = bk > 0 ? grid[bk - 1] : grid[0];
    double hi_hi = bk + 1 < nl ? grid[bk + 1] : 1.0;
    hi_lo = std::max(hi_lo, lo);
    if (hi_hi > hi_lo) {
      auto r = num::golden_max_log([&](double h) { return exact(lo, h); },
                                   hi_lo, hi_hi, cfg.grid.refine_tol);
      hi = r.x;
    }
    double lo_lo = bi > 0 ? grid[bi - 1] : floor;
    double lo_hi = std::min(bi + 1 < nl ? grid[bi + 1] : 1.0, hi);
    if (lo_hi > lo_lo) {
      auto r = num::golden_max_log([&](double l) { return exact(l, hi); },
                                   lo_lo, lo_hi, cfg.grid.refine_tol);
      lo = r.x;
    }
  }
  if (lo > hi) std::swap(lo, hi);

  double theta_hat = crossing_theta(cfg, lo, hi);
  double p = two_certificate_profit(cfg, lo, hi, theta_hat);

  // A pair offering the best single certificate twice earns exactly its
  // profit, so the refined pair must never fall below it; if the pairwise
  // search lost ground (e.g. a refinement bracket missing the optimum),
  // collapse to that degenerate pair.
  SingleCertResult single = optimize_single(cfg);
  if (single.profit > p) {
    lo = hi = single.lambda;
    theta_hat = crossing_theta(cfg, lo, hi);
    p = two_certificate_profit(cfg, lo, hi, theta_hat);
  }

  // Assemble the menu: lo strictly below theta_hat, hi from theta_hat on,
  // except that an empty crossing set leaves everyone (top included) at lo.
  std::vector<double> mnodes = base_nodes(cfg);
  double merge_tol = 1e-13 * top;
  if (theta_hat > 0.0 && theta_hat < top)
    num::insert_sorted_unique(mnodes, theta_hat, merge_tol);
  double cut_lo = serving_cutoff(cfg, lo), cut_hi = serving_cutoff(cfg, hi);
  if (cut_lo > 0.0 && cut_lo < theta_hat)
    num::insert_sorted_unique(mnodes, cut_lo, merge_tol);
  if (cut_hi > theta_hat && cut_hi < top)
    num::insert_sorted_unique(mnodes, cut_hi, merge_tol);

  MechanismSolution s;
  s.label = "two-certificate";
  s.theta = std::move(mnodes);
  std::size_t n = s.theta.size();
  s.phi.resize(n);
  s.quality.resize(n);
  s.views_good.resize(n);
  s.views_bad.resize(n);
  s.attention.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double th = s.theta[i];
    bool high = theta_hat >= top ? false : th >= theta_hat;
    double lam = high ? hi : lo;
    s.phi[i] = cfg.dist.virtual_value(th);
    s.quality[i] = lam;
    s.attention[i] = cfg.attention.eval(lam);
    double r = effective_virtual_value(cfg, s.phi[i], lam);
    s.views_good[i] = cfg.cost.inverse_marginal(r);
    s.views_bad[i] = s.views_good[i] * (1.0 - lam) / lam;
  }
  price_schedule(cfg, s);
  return {lo, hi, theta_hat, p, std::move(s)};
}

}  // namespace certmenu
