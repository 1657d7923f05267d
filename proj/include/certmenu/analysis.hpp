#pragma once

#include <string>
#include <utility>
#include <vector>

#include "certmenu/model.hpp"
#include "certmenu/solver.hpp"

namespace certmenu {

// Total engagement integral A(quality) * views_good against the type density.
double engagement(const ModelConfig& cfg, const MechanismSolution& sol);

// (1/lambda) * integral_0^lambda q dA(q): the reader's average wasted-read
// discount.  Graded Simpson (q = lambda t^3) so small-alpha power tails
// integrate accurately.
double welfare_inner_mean(const AttentionSpec& att, double lambda);

// Aggregate consumer welfare, views_good * (A - inner mean), by direct double
// quadrature.  For a pure power family this equals engagement / (alpha + 1).
double consumer_welfare_power(const ModelConfig& cfg,
                              const MechanismSolution& sol);

// Types served with positive targeted views (> 1e-12): maximal intervals with
// bisection-refined endpoints, plus their total F-measure.
struct DiversityReport {
  std::vector<std::pair<double, double>> intervals;
  double measure;
};
DiversityReport content_diversity(const ModelConfig& cfg,
                                  const MechanismSolution& sol);

// Optimal menu vs mandated perfect certification, on the optimal menu's grid.
struct ComparisonReport {
  std::vector<double> theta, phi;
  std::vector<double> quality_opt, views_opt, engagement_opt;
  std::vector<double> views_perfect, engagement_perfect;
  std::vector<double> delta;  // engagement_opt - engagement_perfect per type
  double total_opt, total_perfect;
  DiversityReport diversity_opt, diversity_perfect;
  // Menu dichotomy: either quality is 1 on the whole served set, or quality
  // is degraded somewhere profitable (phi > gamma) AND some unprofitable
  // types (phi < gamma) are served.
  bool perfect_on_served;
  bool low_quality_above_gamma;
  bool serves_below_gamma;
  bool dichotomy_holds;
};
ComparisonReport compare_to_perfect(const ModelConfig& cfg);

struct SweepRow {
  double value;
  double profit;
  double engagement;
  double welfare;
  double diversity;
  double quality_min_served;  // min quality where served (1 if nothing served)
  double quality_max;
};

// One solve per swept value; quality/views are additionally sampled on the
// shared uniform type grid so monotone comparisons are node-exact.
struct SweepResult {
  std::string param;
  std::vector<double> theta;  // shared uniform nodes
  std::vector<SweepRow> rows;
  std::vector<std::vector<double>> quality;  // [value][node]
  std::vector<std::vector<double>> views;    // [value][node]
  bool monotone_ok;
  double worst_violation;
  std::string note;
};

SweepResult sweep_gamma(ModelConfig cfg, const std::vector<double>& values);
SweepResult sweep_kappa(ModelConfig cfg, const std::vector<double>& values);
SweepResult sweep_alpha(ModelConfig cfg, const std::vector<double>& values);
SweepResult sweep_losses(ModelConfig cfg, const std::vector<double>& values);
SweepResult sweep_addiction(ModelConfig cfg, const std::vector<double>& values);

// Per-type behavior of the menu as gamma -> 0, probed at fixed virtual
// values.  Regime depends on alpha vs 1/sigma: engagement vanishes
// (alpha > 1/sigma), converges to (alpha/kappa)^(1/(sigma-1)) (equal), or
// diverges (alpha < 1/sigma).
struct LimitsReport {
  double alpha, sigma;
  std::string regime;     // "vanishing" | "finite" | "diverging"
  double expected_limit;  // NaN unless regime == "finite"
  std::vector<double> gammas;
  std::vector<double> phi_probes;
  std::vector<std::vector<double>> quality;     // [gamma][probe]
  std::vector<std::vector<double>> views;       // [gamma][probe]
  std::vector<std::vector<double>> engagement;  // [gamma][probe]
};
LimitsReport small_gamma_limits(const ModelConfig& cfg,
                                const std::vector<double>& gammas,
                                const std::vector<double>& phi_probes);

}  // namespace certmenu
