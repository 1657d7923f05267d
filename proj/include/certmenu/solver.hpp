#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "certmenu/model.hpp"

namespace certmenu {

// Effective virtual value of a targeted view sold to a type with virtual
// value phi_hat under certified quality lambda:
//   R(phi_hat, lambda) = (phi_hat + (1 - lambda)/lambda) * A(lambda) - gamma/lambda
// lambda must lie in (0, 1].
double effective_virtual_value(const ModelConfig& cfg, double phi_hat,
                               double lambda);

// Coarse quality search grid: log-spaced points from an attention-scale-aware
// floor up to 0.1, then uniform points on [0.1, 1], plus any transform kink.
std::vector<double> quality_grid(const ModelConfig& cfg);
double quality_grid_floor(const ModelConfig& cfg);

struct QualityChoice {
  double quality;  // largest maximizer of R(phi_hat, .) over (0, 1]
  double value;    // R at it
};
QualityChoice optimal_quality(const ModelConfig& cfg, double phi_hat);
QualityChoice optimal_quality_on(const ModelConfig& cfg, double phi_hat,
                                 const std::vector<double>& grid);

// Profit-maximizing targeted views at (phi_hat, lambda):
// c'^{-1}(max{R, 0}).
double optimal_views(const ModelConfig& cfg, double phi_hat, double lambda);

// Worst monotonicity violations found in a solved menu (0 when monotone).
struct Diagnostics {
  double quality_drop = 0.0;
  double views_drop = 0.0;
  double allocation_drop = 0.0;
};

// A direct-revelation menu sampled on a type grid.  Off-grid queries use
// monotone piecewise-linear interpolation of the stored columns.
struct MechanismSolution {
  std::string label;
  std::vector<double> theta;       // grid, includes 0 and theta_max
  std::vector<double> phi;         // virtual values at theta
  std::vector<double> quality;     // certified quality lambda(theta)
  std::vector<double> views_good;  // targeted views V_g(theta)
  std::vector<double> views_bad;   // untargeted views V_b(theta)
  std::vector<double> attention;   // A(quality)
  std::vector<double> price;       // envelope prices, price(0) = 0
  Diagnostics diag;

  std::size_t size() const { return theta.size(); }
  double allocation(std::size_t i) const {
    return attention[i] * views_good[i];
  }
};

// Type grid used by the solvers: uniform theta_points nodes plus tabulated
// distribution knots and the serving cutoff (located by bisection on the
// maximized effective virtual value).
std::vector<double> solve_grid(const ModelConfig& cfg);

// Profit-maximizing menu: per type, the largest maximizer of R and the
// matching views, bad views pinned by the quality ratio, envelope prices.
MechanismSolution solve_optimal(const ModelConfig& cfg);

// Closed form for the linear attention family (power alpha = 1, no
// transforms); precondition error otherwise.
MechanismSolution closed_form_linear(const ModelConfig& cfg);

// Envelope prices P(theta) = theta*a(theta) - integral of a up to theta,
// where a = A(quality)*views_good.  The running integral is the exact
// integral of the piecewise-linear interpolant (cumulative trapezoid).
// Precondition: a nondecreasing.
void price_schedule(const ModelConfig& cfg, MechanismSolution& sol);

struct IcReport {
  double max_violation;      // > 0 means a profitable misreport or opt-out
  std::size_t type_index;    // deviating type
  std::size_t report_index;  // best deviation target (== type_index: opt-out)
};
IcReport verify_ic(const ModelConfig& cfg, const MechanismSolution& sol);

// Expected profit, computed two ways that must agree for an incentive-
// compatible menu priced by the envelope formula:
//   direct          — prices + bad-view ad revenue - subsidies - targeting cost
//   virtual_surplus — R(phi, quality) * views_good - targeting cost
struct ProfitReport {
  double direct;
  double virtual_surplus;
};
ProfitReport profit(const ModelConfig& cfg, const MechanismSolution& sol);

// An indirect mechanism that may pool types into finitely many messages and
// may spread bad views arbitrarily within a message.
struct PooledMechanism {
  std::vector<double> theta;
  std::vector<int> message;        // message id per grid type
  std::vector<double> views_good;
  std::vector<double> views_bad;
  std::vector<double> price;
};

// Per-message certified quality E[V_g | m] / E[V_g + V_b | m] under
// trapezoid-by-density weights (1.0 for a message with zero total views).
std::vector<double> message_quality(const ModelConfig& cfg,
                                    const PooledMechanism& pooled);

// Rewrite a pooled mechanism as a truthful menu with the same prices and
// good views, bad views reallocated to match each message's quality ratio.
// Preserves every message's quality and the platform's profit.
MechanismSolution canonicalize(const ModelConfig& cfg,
                               const PooledMechanism& pooled);

// Direct-objective profits under plain trapezoid weights.  These two use the
// same discrete weights as message_quality, so canonicalize preserves
// pooled_direct_profit exactly (not just up to quadrature error).
double pooled_direct_profit(const ModelConfig& cfg,
                            const PooledMechanism& pooled);
double direct_profit_trapezoid(const ModelConfig& cfg,
                               const MechanismSolution& sol);

}  // namespace certmenu
