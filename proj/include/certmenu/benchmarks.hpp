#pragma once

#include "certmenu/model.hpp"
#include "certmenu/solver.hpp"

namespace certmenu {

// Welfare benchmark: perfect certification and the welfare-efficient view
// volume c'^{-1}(1 - gamma) for every type, priced at zero rents.
MechanismSolution planner(const ModelConfig& cfg);

struct SingleCertResult {
  double lambda;
  double profit;  // virtual-surplus objective by adaptive quadrature
  MechanismSolution mechanism;
};

// Restricted problem with one certificate of fixed quality lambda sold with
// type-dependent views c'^{-1}(max{R(phi, lambda), 0}).
SingleCertResult single_certificate(const ModelConfig& cfg, double lambda);

// Best single certificate (coarse grid + golden refinement; ties resolved
// toward the largest lambda).
SingleCertResult optimize_single(const ModelConfig& cfg);

// Mandated perfect certification: the single-certificate menu at lambda = 1.
SingleCertResult enforced_perfect(const ModelConfig& cfg);

// Smallest theta whose type prefers the high certificate:
// min{theta : R(phi(theta), hi) >= R(phi(theta), lo)}, top of the support if
// that set is empty (then everyone, including the top type, holds lo).
double crossing_theta(const ModelConfig& cfg, double lambda_lo,
                      double lambda_hi);

// Smallest theta served under a fixed certificate (R >= 0); top if none.
double serving_cutoff(const ModelConfig& cfg, double lambda);

// Profit of the menu {lo below theta_hat, hi from theta_hat up} with views
// c'^{-1}(max{R, 0}) on each branch.  theta_hat is taken as given so that
// degenerate splits can be inspected; the optimizer derives it from
// crossing_theta.
double two_certificate_profit(const ModelConfig& cfg, double lambda_lo,
                              double lambda_hi, double theta_hat);

struct TwoCertResult {
  double lambda_lo;
  double lambda_hi;
  double theta_hat;
  double profit;
  MechanismSolution mechanism;
};

// Best pair of certificates: coarse pair grid on the shared quality grid,
// then coordinate-wise golden refinement of the exact objective.
TwoCertResult optimize_two_certificate(const ModelConfig& cfg);

}  // namespace certmenu
