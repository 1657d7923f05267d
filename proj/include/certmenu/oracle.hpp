#pragma once

#include "certmenu/model.hpp"

namespace certmenu::oracle {

// Brute-force reference searches.  No refinement, no tie windows: plain
// argmax over a dense deterministic grid, ties resolved toward the larger
// argument.  Grid steps are reported so callers can phrase tolerances as
// "within one oracle step".
struct OracleGrid {
  long lambda_points = 1000000;      // quality scan (>= 100x solver density)
  long v_points = 10000;             // views scan
  double v_max = 0.0;                // 0: auto, covers both the type-scale
                                     // bound and c'^{-1} of the probed return
  long profit_lambda_points = 10000; // single-certificate profit scan
  int profit_theta_points = 4001;    // dense quadrature for that scan
};

struct BruteMax {
  double arg;
  double value;
  double step;  // local grid spacing at the argmax
};

// argmax_lambda R(phi_hat, lambda) over a log+uniform lambda grid.
BruteMax brute_argmax_quality(const ModelConfig& cfg, double phi_hat,
                              const OracleGrid& grid = {});

// argmax_v R * v - c(v) over a uniform v grid.
BruteMax brute_views(const ModelConfig& cfg, double phi_hat, double lambda,
                     const OracleGrid& grid = {});

// argmax_lambda of the single-certificate profit, each profit by plain dense
// Simpson without cutoff insertion.
BruteMax brute_single_profit(const ModelConfig& cfg,
                             const OracleGrid& grid = {});

}  // namespace certmenu::oracle
