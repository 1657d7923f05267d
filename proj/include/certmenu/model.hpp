#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace certmenu {

// Attention technology A(lambda) on [0,1]: the share of targeted views a
// consumer actually reads when the certificate pins quality at lambda.
// Base family: power, A0(x) = x^alpha, alpha > 0 (A0(0)=0, A0(1)=1).
// Optional behavioral transforms, mutually exclusive:
//   loss_b       consumers quit after bad reads:  A(l) = A0(max{l(1+b) - b, 0})
//   addiction_z  consumers read regardless:       A(l) = A0(min{l + z, 1})
// Both keep A(1) = 1 and A nondecreasing; each introduces one kink.
struct KinkError : std::domain_error {
  double lambda;
  double left;   // one-sided derivative from below
  double right;  // one-sided derivative from above (may be +inf)
  KinkError(double lam, double l, double r)
      : std::domain_error("attention derivative has a kink at lambda=" +
                          std::to_string(lam)),
        lambda(lam), left(l), right(r) {}
};

struct AttentionSpec {
  double alpha = 1.0;
  double loss_b = 0.0;
  double addiction_z = 0.0;

  // A(lambda); lambda outside [0,1] is a domain error.
  double eval(double lambda) const;
  // A'(lambda) for lambda in (0,1] (left derivative at 1).  Throws KinkError
  // at a transform kink; the error carries both one-sided values.
  double deriv(double lambda) const;
  // Like deriv(), but returns the average of the one-sided values at a kink.
  // Intended for quadrature nodes that may land exactly on the kink.
  double deriv_safe(double lambda) const;
  // Smallest lambda with A(lambda) >= a, for a in [0,1].
  double inverse(double a) const;
  // Location of the transform kink, if a transform is active.
  std::optional<double> kink() const;
  bool has_transform() const { return loss_b > 0.0 || addiction_z > 0.0; }
};

// Targeting cost c(v) = kappa * v^sigma / sigma, convex (sigma > 1).
struct CostSpec {
  double kappa = 1.0;
  double sigma = 2.0;

  double cost(double v) const;              // v >= 0, else domain error
  double marginal(double v) const;          // kappa * v^(sigma-1)
  double inverse_marginal(double x) const;  // (max{x,0}/kappa)^(1/(sigma-1))
};

// Type distribution F on [0, theta_max].  Families:
//   uniform    — F(t) = t/theta_max
//   tabulated  — piecewise-linear CDF on strictly increasing knots
//                (hence piecewise-constant density)
struct TypeDistribution {
  enum class Family { uniform, tabulated };

  Family family = Family::uniform;
  double theta_max = 1.0;          // uniform only
  std::vector<double> knots;       // tabulated: knots.front() == 0
  std::vector<double> cdf_values;  // tabulated: 0 -> 1, strictly increasing

  static TypeDistribution make_uniform(double theta_max);
  static TypeDistribution make_tabulated(std::vector<double> knots,
                                         std::vector<double> cdf);

  double upper() const;  // top of the support
  double cdf(double theta) const;
  double pdf(double theta) const;
  // Virtual value theta - (1 - F(theta)) / f(theta).
  double virtual_value(double theta) const;
  // Smallest theta with virtual_value(theta) >= y (clamped to the support),
  // located by bisection to tol (closed form for the uniform family).
  double virtual_value_inverse(double y, double tol = 1e-12) const;

  struct Regularity {
    bool regular;
    double violation_at;  // NaN when regular
  };
  // Sample the virtual value on a dense grid and look for a decrease.
  Regularity check_regularity(int n_check = 4096) const;

  void validate() const;  // throws std::invalid_argument naming dist.* keys
};

// Search-grid controls shared by the solver and the benchmarks.
struct GridSpec {
  int theta_points = 2001;        // uniform type grid (>= 2)
  int lambda_coarse_points = 64;  // coarse quality grid (>= 32)
  double refine_tol = 1e-10;      // golden-section stopping width in lambda
};

struct ModelConfig {
  AttentionSpec attention;
  CostSpec cost;
  TypeDistribution dist;
  double gamma = 0.25;  // per-view attention subsidy paid by the platform
  GridSpec grid;

  // Throws std::invalid_argument with messages naming the offending config
  // key (e.g. "model.gamma must be < min(dist.theta_max, 1)").
  void validate() const;
};

}  // namespace certmenu
