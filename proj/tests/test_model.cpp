#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "certmenu/model.hpp"

using namespace certmenu;

namespace {

ModelConfig base_config() {
  ModelConfig cfg;
  cfg.attention = {1.0, 0.0, 0.0};
  cfg.cost = {1.0, 2.0};
  cfg.dist = TypeDistribution::make_uniform(1.0);
  cfg.gamma = 0.25;
  return cfg;
}

// A tabulated CDF whose density collapses after theta = 0.2: the hazard rate
// drops so fast that the virtual value falls there.
TypeDistribution spiky_tabulated() {
  return TypeDistribution::make_tabulated({0.0, 0.2, 0.5, 1.0},
                                          {0.0, 0.5, 0.6, 1.0});
}

}  // namespace

TEST_CASE("attention evaluation: base family and transforms") {
  AttentionSpec identity{1.0, 0.0, 0.0};
  CHECK(identity.eval(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(identity.eval(0.0) == 0.0);
  CHECK(identity.eval(1.0) == 1.0);

  AttentionSpec loss{1.0, 1.0, 0.0};  // A(l) = max{2l - 1, 0}
  CHECK(loss.eval(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(loss.eval(0.25) == 0.0);
  CHECK(loss.eval(1.0) == 1.0);

  AttentionSpec sqrt_att{0.5, 0.0, 0.0};
  CHECK(sqrt_att.eval(0.25) == doctest::Approx(0.5).epsilon(1e-15));

  AttentionSpec addicted{1.0, 0.0, 0.1};  // A(l) = min{l + 0.1, 1}
  CHECK(addicted.eval(0.0) == doctest::Approx(0.1));
  CHECK(addicted.eval(1.0) == 1.0);
  CHECK(addicted.eval(0.95) == 1.0);

  CHECK_THROWS_AS(identity.eval(-0.1), std::domain_error);
  CHECK_THROWS_AS(identity.eval(1.1), std::domain_error);
}

TEST_CASE("attention bounds and monotonicity on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (AttentionSpec spec : {AttentionSpec{0.5, 0.0, 0.0},
                             AttentionSpec{2.0, 0.0, 0.0},
                             AttentionSpec{1.0, 0.7, 0.0},
                             AttentionSpec{0.5, 0.0, 0.02}}) {
    double prev_l = 0.0, prev_a = spec.eval(0.0);
    CHECK(prev_a >= 0.0);
    for (int i = 0; i < 300; ++i) {
      double l = u(rng);
      double a = spec.eval(l);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      if (l >= prev_l)
        CHECK(a >= prev_a - 1e-15);
      prev_l = l;
      prev_a = a;
    }
    CHECK(spec.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("attention derivative: closed forms and kinks") {
  AttentionSpec identity{1.0, 0.0, 0.0};
  CHECK(identity.deriv(0.3) == doctest::Approx(1.0).epsilon(1e-15));

  AttentionSpec quad{2.0, 0.0, 0.0};
  CHECK(quad.deriv(0.5) == doctest::Approx(1.0).epsilon(1e-15));

  AttentionSpec addicted{1.0, 0.0, 0.1};
  CHECK(addicted.deriv(0.5) == doctest::Approx(1.0).epsilon(1e-15));

  AttentionSpec loss{1.0, 1.0, 0.0};  // kink at b/(1+b) = 0.5
  CHECK_THROWS_AS(loss.deriv(0.5), KinkError);
  try {
    loss.deriv(0.5);
  } catch (const KinkError& k) {
    CHECK(k.lambda == doctest::Approx(0.5));
    CHECK(k.left == doctest::Approx(0.0));
    CHECK(k.right == doctest::Approx(2.0));  // slope of 2l - 1
  }
  // deriv_safe averages the one-sided values instead of throwing.
  CHECK(loss.deriv_safe(0.5) == doctest::Approx(1.0));

  AttentionSpec addict2{1.0, 0.0, 0.2};  // kink at 1 - z = 0.8
  CHECK_THROWS_AS(addict2.deriv(0.8), KinkError);
}

TEST_CASE("attention derivative matches central finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const double h = 1e-6;
  for (AttentionSpec spec : {AttentionSpec{0.5, 0.0, 0.0},
                             AttentionSpec{1.0, 0.0, 0.0},
                             AttentionSpec{2.3, 0.0, 0.0},
                             AttentionSpec{1.5, 0.6, 0.0},
                             AttentionSpec{0.8, 0.0, 0.03}}) {
    auto kink = spec.kink();
    int done = 0;
    while (done < 100) {
      double l = u(rng);
      if (kink && std::abs(l - *kink) < 1e-3) continue;  // stay off the kink
      ++done;
      double fd = (spec.eval(l + h) - spec.eval(l - h)) / (2.0 * h);
      double an = spec.deriv(l);
      if (std::abs(fd) < 1e-12) {
        CHECK(std::abs(an) < 1e-9);
      } else {
        CHECK(an == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("attention inverse is the smallest preimage") {
  AttentionSpec sqrt_att{0.5, 0.0, 0.0};
  CHECK(sqrt_att.inverse(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sqrt_att.inverse(0.0) == 0.0);
  CHECK(sqrt_att.inverse(1.0) == doctest::Approx(1.0));

  AttentionSpec loss{1.0, 1.0, 0.0};  // flat at 0 until 0.5
  CHECK(loss.inverse(0.0) == 0.0);    // smallest lambda with A >= 0
  CHECK(loss.eval(loss.inverse(0.25)) == doctest::Approx(0.25).epsilon(1e-12));

  AttentionSpec addicted{1.0, 0.0, 0.1};
  // A(0) = 0.1 already, so every a <= 0.1 inverts to 0.
  CHECK(addicted.inverse(0.05) == 0.0);
  CHECK(addicted.inverse(0.6) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cost primitives") {
  CostSpec quadratic{1.0, 2.0};
  CHECK(quadratic.marginal(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(quadratic.marginal(0.0) == 0.0);
  CHECK(quadratic.cost(0.0) == 0.0);
  CHECK(quadratic.cost(2.0) == doctest::Approx(2.0).epsilon(1e-15));

  CostSpec scaled{2.0, 2.0};
  CHECK(scaled.marginal(0.5) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(quadratic.inverse_marginal(0.25) == doctest::Approx(0.25));
  CHECK(quadratic.inverse_marginal(-1.0) == 0.0);
  CostSpec cubic{1.0, 3.0};
  CHECK(cubic.inverse_marginal(0.04) == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(quadratic.marginal(-0.1), std::domain_error);
  CHECK_THROWS_AS(quadratic.cost(-0.1), std::domain_error);
}

TEST_CASE("marginal cost and its inverse are mutual inverses") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (CostSpec spec : {CostSpec{1.0, 2.0}, CostSpec{0.3, 1.5},
                        CostSpec{2.5, 3.7}}) {
    for (int i = 0; i < 200; ++i) {
      double x = u(rng);
      CHECK(spec.marginal(spec.inverse_marginal(x)) ==
            doctest::Approx(x).epsilon(1e-12));
      CHECK(spec.inverse_marginal(spec.marginal(x)) ==
            doctest::Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("virtual value: uniform closed form") {
  auto d1 = TypeDistribution::make_uniform(1.0);
  CHECK(d1.virtual_value(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d1.virtual_value(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  auto d2 = TypeDistribution::make_uniform(2.0);
  CHECK(d2.virtual_value(1.0) == doctest::Approx(0.0));
  // Exact identity 2*theta - theta_max on a sweep.
  for (int i = 0; i <= 50; ++i) {
    double th = 2.0 * i / 50.0;
    CHECK(d2.virtual_value(th) == 2.0 * th - 2.0);
  }
  CHECK_THROWS_AS(d1.virtual_value(-0.01), std::domain_error);
  CHECK_THROWS_AS(d1.virtual_value(1.01), std::domain_error);
}

TEST_CASE("virtual value inverse: round trips and range errors") {
  auto d = TypeDistribution::make_uniform(1.0);
  CHECK(d.virtual_value_inverse(0.25) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(d.virtual_value_inverse(1.0) == doctest::Approx(1.0));
  CHECK(d.virtual_value_inverse(d.virtual_value(0.3)) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(d.virtual_value_inverse(1.5), std::out_of_range);
  CHECK_THROWS_AS(d.virtual_value_inverse(-1.5), std::out_of_range);

  auto t = spiky_tabulated();
  // Round trip on the monotone segment above the dip.
  double y = t.virtual_value(0.9);
  double th = t.virtual_value_inverse(y, 1e-12);
  CHECK(t.virtual_value(th) >= y - 1e-9);
  // Smallest-preimage convention.
  CHECK(t.virtual_value(th - 1e-6) < y);
}

TEST_CASE("regularity check accepts uniform, rejects a hazard spike") {
  CHECK(TypeDistribution::make_uniform(1.0).check_regularity(512).regular);
  CHECK(TypeDistribution::make_uniform(0.5).check_regularity(512).regular);

  auto bad = spiky_tabulated();
  auto reg = bad.check_regularity(4096);
  CHECK_FALSE(reg.regular);
  // The virtual value drops right at the density break theta = 0.2.
  CHECK(reg.violation_at == doctest::Approx(0.2).epsilon(0.01));

  // A gentle tabulated distribution stays regular: linear CDF in pieces with
  // mildly increasing density.
  auto ok = TypeDistribution::make_tabulated({0.0, 0.5, 1.0}, {0.0, 0.4, 1.0});
  CHECK(ok.check_regularity(4096).regular);
}

TEST_CASE("model validation names the offending key") {
  auto expect_error = [](ModelConfig cfg, const std::string& needle) {
    try {
      cfg.validate();
      FAIL_CHECK("expected invalid_argument containing '" << needle << "'");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  ModelConfig cfg = base_config();
  CHECK_NOTHROW(cfg.validate());

  cfg = base_config();
  cfg.gamma = 0.8;
  cfg.dist = TypeDistribution::make_uniform(0.7);
  expect_error(cfg, "model.gamma");

  cfg = base_config();
  cfg.gamma = -0.1;
  expect_error(cfg, "model.gamma");

  cfg = base_config();
  cfg.attention.alpha = 0.0;
  expect_error(cfg, "attention.alpha");

  cfg = base_config();
  cfg.attention.loss_b = 0.5;
  cfg.attention.addiction_z = 0.1;
  expect_error(cfg, "mutually exclusive");

  cfg = base_config();
  cfg.attention.addiction_z = 0.3;  // A(z) = 0.3 >= gamma
  expect_error(cfg, "A(z) < model.gamma");

  cfg = base_config();
  cfg.attention.addiction_z = 0.2;  // A(z) = 0.2 < 0.25: fine
  CHECK_NOTHROW(cfg.validate());

  cfg = base_config();
  cfg.cost.sigma = 1.0;
  expect_error(cfg, "cost.sigma");

  cfg = base_config();
  cfg.cost.kappa = 0.0;
  expect_error(cfg, "cost.kappa");

  cfg = base_config();
  cfg.grid.theta_points = 1;
  expect_error(cfg, "grid.theta_points");

  cfg = base_config();
  cfg.grid.lambda_coarse_points = 16;
  expect_error(cfg, "grid.lambda_coarse_points");

  cfg = base_config();
  cfg.grid.refine_tol = 0.5;
  expect_error(cfg, "grid.refine_tol");

  cfg = base_config();
  cfg.dist = TypeDistribution::make_tabulated({0.0, 1.0}, {0.0, 0.9});
  expect_error(cfg, "cdf");
}
