#include "certmenu/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace certmenu::oracle {

namespace {

double oracle_floor(const ModelConfig& cfg) {
  // Same scale-aware floor rule as the solver grid, derived independently
  // from the attention inverse.
  double target = std::min(cfg.gamma, 1.0) * 1e-3;
  double base = cfg.attention.inverse(std::min(target, 1.0));
  if (base <= 0.0) return 1e-9;
  return std::clamp(0.01 * base, 1e-300, 1e-6);
}

}  // namespace

BruteMax brute_argmax_quality(const ModelConfig& cfg, double phi_hat,
                              const OracleGrid& grid) {
  double floor = oracle_floor(cfg);
  long n_log = grid.lambda_points / 2;
  long n_uni = grid.lambda_points - n_log;
  double gamma = cfg.gamma;
  bool plain_power = !cfg.attention.has_transform();
  double alpha = cfg.attention.alpha;

  double best_val = -std::numeric_limits<double>::infinity();
  double best_lam = floor;
  double best_step = floor;

  double la = std::log(floor), lb = std::log(0.1);
  double dl = (lb - la) / static_cast<double>(n_log - 1);
  for (long i = 0; i < n_log; ++i) {
    double llam = la + dl * static_cast<double>(i);
    double lam = std::exp(llam);
    double a = plain_power ? std::exp(alpha * llam) : cfg.attention.eval(lam);
    double r = (phi_hat + (1.0 - lam) / lam) * a - gamma / lam;
    if (r >= best_val) {
      best_val = r;
      best_lam = lam;
      best_step = lam * (std::exp(dl) - 1.0);
    }
  }
  double h = (1.0 - 0.1) / static_cast<double>(n_uni);
  for (long i = 1; i <= n_uni; ++i) {
    double lam = 0.1 + h * static_cast<double>(i);
    if (lam > 1.0) lam = 1.0;
    double a = plain_power ? std::pow(lam, alpha) : cfg.attention.eval(lam);
    double r = (phi_hat + (1.0 - lam) / lam) * a - gamma / lam;
    if (r >= best_val) {
      best_val = r;
      best_lam = lam;
      best_step = h;
    }
  }
  return {best_lam, best_val, best_step};
}

BruteMax brute_views(const ModelConfig& cfg, double phi_hat, double lambda,
                     const OracleGrid& grid) {
  double r = (phi_hat + (1.0 - lambda) / lambda) * cfg.attention.eval(lambda) -
             cfg.gamma / lambda;
  // The unconstrained maximizer sits at c'^{-1}(r), which can exceed the
  // type-scale bound when low-quality menus cross-subsidize (r >> theta_max),
  // so the automatic range covers both scales with a margin.
  double v_max = grid.v_max > 0.0
                     ? grid.v_max
                     : 10.0 * cfg.cost.inverse_marginal(cfg.dist.upper()) +
                           2.0 * cfg.cost.inverse_marginal(std::max(r, 0.0));
  double h = v_max / static_cast<double>(grid.v_points);
  double best_val = 0.0, best_v = 0.0;  // v = 0 earns exactly 0
  for (long i = 1; i <= grid.v_points; ++i) {
    double v = h * static_cast<double>(i);
    double p = r * v - cfg.cost.cost(v);
    if (p >= best_val) {
      best_val = p;
      best_v = v;
    }
  }
  return {best_v, best_val, h};
}

BruteMax brute_single_profit(const ModelConfig& cfg, const OracleGrid& grid) {
  double floor = oracle_floor(cfg);
  long n_log = grid.profit_lambda_points / 2;
  long n_uni = grid.profit_lambda_points - n_log;
  double top = cfg.dist.upper();
  int nt = grid.profit_theta_points | 1;  // odd point count for Simpson
  double ht = top / static_cast<double>(nt - 1);

  auto profit_at = [&](double lam) {
    double a = cfg.attention.eval(lam);
    double off = a * (1.0 - lam) / lam - cfg.gamma / lam;
    double total = 0.0;
    for (int j = 0; j < nt; ++j) {
      double th = ht * static_cast<double>(j);
      double r = cfg.dist.virtual_value(th) * a + off;
      double contrib = 0.0;
      if (r > 0.0) {
        double v = cfg.cost.inverse_marginal(r);
        contrib = (r * v - cfg.cost.cost(v)) * cfg.dist.pdf(th);
      }
      double w = (j == 0 || j == nt - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      total += w * contrib;
    }
    return total * ht / 3.0;
  };

  double best_val = -std::numeric_limits<double>::infinity();
  double best_lam = floor, best_step = floor;
  double la = std::log(floor), lb = std::log(0.1);
  double dl = (lb - la) / static_cast<double>(n_log - 1);
  for (long i = 0; i < n_log; ++i) {
    double lam = std::exp(la + dl * static_cast<double>(i));
    double p = profit_at(lam);
    if (p >= best_val) {
      best_val = p;
      best_lam = lam;
      best_step = lam * (std::exp(dl) - 1.0);
    }
  }
  double h = 0.9 / static_cast<double>(n_uni);
  for (long i = 1; i <= n_uni; ++i) {
    double lam = std::min(0.1 + h * static_cast<double>(i), 1.0);
    double p = profit_at(lam);
    if (p >= best_val) {
      best_val = p;
      best_lam = lam;
      best_step = h;
    }
  }
  return {best_lam, best_val, best_step};
}

}  // namespace certmenu::oracle
