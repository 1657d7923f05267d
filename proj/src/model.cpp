#include "certmenu/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "certmenu/numerics.hpp"

namespace certmenu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Derivative of the base power family, with the correct one-sided limit at 0.
double power_deriv(double x, double alpha) {
  if (x <= 0.0) {
    if (alpha < 1.0) return kInf;
    if (alpha == 1.0) return 1.0;
    return 0.0;
  }
  return alpha * std::pow(x, alpha - 1.0);
}

}  // namespace

double AttentionSpec::eval(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::domain_error("attention argument outside [0,1]: lambda=" +
                            std::to_string(lambda));
  double arg = lambda;
  if (loss_b > 0.0)
    arg = std::max(lambda * (1.0 + loss_b) - loss_b, 0.0);
  else if (addiction_z > 0.0)
    arg = std::min(lambda + addiction_z, 1.0);
  return std::pow(arg, alpha);
}

std::optional<double> AttentionSpec::kink() const {
  if (loss_b > 0.0) return loss_b / (1.0 + loss_b);
  if (addiction_z > 0.0) return 1.0 - addiction_z;
  return std::nullopt;
}

double AttentionSpec::deriv(double lambda) const {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::domain_error(
        "attention derivative defined on (0,1]: lambda=" +
        std::to_string(lambda));
  if (loss_b > 0.0) {
    double k = loss_b / (1.0 + loss_b);
    if (lambda == k)
      throw KinkError(lambda, 0.0, (1.0 + loss_b) * power_deriv(0.0, alpha));
    if (lambda < k) return 0.0;
    double arg = std::max(lambda * (1.0 + loss_b) - loss_b, 0.0);
    return (1.0 + loss_b) * power_deriv(arg, alpha);
  }
  if (addiction_z > 0.0) {
    double k = 1.0 - addiction_z;
    if (lambda == k) throw KinkError(lambda, power_deriv(1.0, alpha), 0.0);
    if (lambda > k) return 0.0;
    return power_deriv(lambda + addiction_z, alpha);
  }
  return power_deriv(lambda, alpha);
}

double AttentionSpec::deriv_safe(double lambda) const {
  try {
    return deriv(lambda);
  } catch (const KinkError& k) {
    if (std::isinf(k.right)) return k.left;
    if (std::isinf(k.left)) return k.right;
    return 0.5 * (k.left + k.right);
  }
}

double AttentionSpec::inverse(double a) const {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::domain_error("attention inverse argument outside [0,1]: a=" +
                            std::to_string(a));
  if (a == 0.0) return 0.0;
  double x = std::pow(a, 1.0 / alpha);  // base preimage
  if (loss_b > 0.0) return std::min((x + loss_b) / (1.0 + loss_b), 1.0);
  if (addiction_z > 0.0) return std::max(x - addiction_z, 0.0);
  return x;
}

double CostSpec::cost(double v) const {
  if (!(v >= 0.0))
    throw std::domain_error("cost argument must be >= 0: v=" +
                            std::to_string(v));
  return kappa * std::pow(v, sigma) / sigma;
}

double CostSpec::marginal(double v) const {
  if (!(v >= 0.0))
    throw std::domain_error("marginal cost argument must be >= 0: v=" +
                            std::to_string(v));
  return kappa * std::pow(v, sigma - 1.0);
}

double CostSpec::inverse_marginal(double x) const {
  if (x <= 0.0) return 0.0;
  return std::pow(x / kappa, 1.0 / (sigma - 1.0));
}

TypeDistribution TypeDistribution::make_uniform(double theta_max) {
  TypeDistribution d;
  d.family = Family::uniform;
  d.theta_max = theta_max;
  return d;
}

TypeDistribution TypeDistribution::make_tabulated(std::vector<double> knots,
                                                  std::vector<double> cdf) {
  TypeDistribution d;
  d.family = Family::tabulated;
  d.knots = std::move(knots);
  d.cdf_values = std::move(cdf);
  d.theta_max = d.knots.empty() ? 0.0 : d.knots.back();
  return d;
}

double TypeDistribution::upper() const {
  return family == Family::uniform ? theta_max : knots.back();
}

double TypeDistribution::cdf(double theta) const {
  if (family == Family::uniform) {
    if (theta <= 0.0) return 0.0;
    if (theta >= theta_max) return 1.0;
    return theta / theta_max;
  }
  if (theta <= knots.front()) return 0.0;
  if (theta >= knots.back()) return 1.0;
  auto it = std::upper_bound(knots.begin(), knots.end(), theta);
  std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  double t = (theta - knots[i]) / (knots[i + 1] - knots[i]);
  return cdf_values[i] + t * (cdf_values[i + 1] - cdf_values[i]);
}

double TypeDistribution::pdf(double theta) const {
  if (family == Family::uniform) {
    if (theta < 0.0 || theta > theta_max) return 0.0;
    return 1.0 / theta_max;
  }
  if (theta < knots.front() || theta > knots.back()) return 0.0;
  // Right-cell convention at interior knots, left cell at the top.
  auto it = std::upper_bound(knots.begin(), knots.end(), theta);
  std::size_t i = it == knots.end() ? knots.size() - 2
                                    : static_cast<std::size_t>(it - knots.begin()) - 1;
  if (i + 1 >= knots.size()) i = knots.size() - 2;
  return (cdf_values[i + 1] - cdf_values[i]) / (knots[i + 1] - knots[i]);
}

double TypeDistribution::virtual_value(double theta) const {
  if (theta < 0.0 || theta > upper())
    throw std::domain_error("virtual value argument outside the type support: theta=" +
                            std::to_string(theta));
  if (family == Family::uniform) return 2.0 * theta - theta_max;
  return theta - (1.0 - cdf(theta)) / pdf(theta);
}

double TypeDistribution::virtual_value_inverse(double y, double tol) const {
  double top = upper();
  if (y < virtual_value(0.0) || y > virtual_value(top))
    throw std::out_of_range(
        "virtual value inverse argument outside [phi(0), phi(theta_max)]: y=" +
        std::to_string(y));
  if (family == Family::uniform)
    return std::clamp(0.5 * (y + theta_max), 0.0, theta_max);
  if (virtual_value(0.0) >= y) return 0.0;
  if (virtual_value(top) < y) return top;
  double lo = 0.0, hi = top;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (virtual_value(mid) >= y)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

TypeDistribution::Regularity TypeDistribution::check_regularity(
    int n_check) const {
  if (family == Family::uniform) return {true, kNaN};
  std::vector<double> grid = num::linspace(0.0, upper(), std::max(n_check, 8));
  for (double k : knots) num::insert_sorted_unique(grid, k, 0.0);
  double prev = virtual_value(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double cur = virtual_value(grid[i]);
    if (cur < prev - 1e-12) return {false, 0.5 * (grid[i - 1] + grid[i])};
    prev = std::max(prev, cur);
  }
  return {true, kNaN};
}

void TypeDistribution::validate() const {
  if (family == Family::uniform) {
    if (!(theta_max > 0.0) || !std::isfinite(theta_max))
      throw std::invalid_argument("dist.theta_max must be positive");
    return;
  }
  if (knots.size() < 2 || knots.size() != cdf_values.size())
    throw std::invalid_argument(
        "dist tabulated knots and cdf values must have equal length >= 2");
  if (knots.front() != 0.0)
    throw std::invalid_argument("dist tabulated knots must start at 0");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i]))
      throw std::invalid_argument(
          "dist tabulated knots must be strictly increasing");
    if (!(cdf_values[i + 1] > cdf_values[i]))
      throw std::invalid_argument(
          "dist tabulated cdf must be strictly increasing (positive density)");
  }
  if (cdf_values.front() != 0.0 || cdf_values.back() != 1.0)
    throw std::invalid_argument("dist tabulated cdf must run from 0 to 1");
}

void ModelConfig::validate() const {
  if (!(attention.alpha > 0.0) || !std::isfinite(attention.alpha))
    throw std::invalid_argument("attention.alpha must be positive");
  if (!(attention.loss_b >= 0.0) || !std::isfinite(attention.loss_b))
    throw std::invalid_argument("attention.loss_b must be >= 0");
  if (!(attention.addiction_z >= 0.0 && attention.addiction_z < 1.0))
    throw std::invalid_argument("attention.addiction_z must be in [0, 1)");
  if (attention.loss_b > 0.0 && attention.addiction_z > 0.0)
    throw std::invalid_argument(
        "attention.loss_b and attention.addiction_z are mutually exclusive");
  if (!(cost.kappa > 0.0) || !std::isfinite(cost.kappa))
    throw std::invalid_argument("cost.kappa must be positive");
  if (!(cost.sigma > 1.0) || !std::isfinite(cost.sigma))
    throw std::invalid_argument("cost.sigma must be > 1");
  dist.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("model.gamma must be positive");
  if (!(gamma < std::min(dist.upper(), 1.0)))
    throw std::invalid_argument("model.gamma must be < min(dist.theta_max, 1)");
  if (attention.addiction_z > 0.0 &&
      !(std::pow(attention.addiction_z, attention.alpha) < gamma))
    throw std::invalid_argument(
        "attention.addiction_z must satisfy A(z) < model.gamma");
  if (grid.theta_points < 2)
    throw std::invalid_argument("grid.theta_points must be >= 2");
  if (grid.lambda_coarse_points < 32)
    throw std::invalid_argument("grid.lambda_coarse_points must be >= 32");
  if (!(grid.refine_tol > 0.0 && grid.refine_tol <= 1e-2))
    throw std::invalid_argument("grid.refine_tol must be in (0, 1e-2]");
}

}  // namespace certmenu
