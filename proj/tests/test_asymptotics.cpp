#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cuspres/asymptotics.hpp"
#include "cuspres/resonance.hpp"

using cuspres::cplx;
using cuspres::ModeProblem;
using cuspres::NuBranch;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST(NuOfLambda, Examples) {
  EXPECT_EQ(cuspres::nu_of_lambda(0.0, 1.0, NuBranch::CuspBranch).nu, cplx{0.5});
  EXPECT_EQ(cuspres::nu_of_lambda(0.0, 1.0, NuBranch::FunnelBranch).nu, cplx{0.5});
  EXPECT_THROW(cuspres::nu_of_lambda(0.5, 1.0, NuBranch::CuspBranch), cuspres::DomainError);
  EXPECT_THROW(cuspres::nu_of_lambda(cplx{-1.0, 1e-9}, 2.0, NuBranch::FunnelBranch), cuspres::DomainError);
  const cplx nu = cuspres::nu_of_lambda(10.0, 1.0, NuBranch::CuspBranch).nu;
  EXPECT_NEAR(nu.real(), 0.0, 1e-15);
  EXPECT_NEAR(nu.imag(), -std::sqrt(99.75), 1e-13);
  EXPECT_NEAR(nu.imag(), -9.98749, 1e-5);
}

TEST(NuOfLambda, DefiningRelationAndBranchSigns) {
  for (int i = 0; i < 30; ++i) {
    for (int k = 0; k < 30; ++k) {
      const cplx lambda{1.0 + 499.0 * i / 29.0, -5.0 + 10.0 * k / 29.0};
      for (double b : {1.0, 2.0}) {
        const cplx expected = 0.25 - lambda * lambda / (b * b);
        const cplx cusp = cuspres::nu_of_lambda(lambda, b, NuBranch::CuspBranch).nu;
        EXPECT_LT(std::abs(cusp * cusp - expected), 1e-14 * std::abs(expected) + 1e-15);
        if (lambda.real() > b / 2.0) {
          EXPECT_LT(cusp.imag(), 0.0) << lambda;
        }
      }
      for (double b : {-1.0, -2.0}) {
        const cplx expected = 0.25 - lambda * lambda / (b * b);
        const cplx funnel = cuspres::nu_of_lambda(lambda, b, NuBranch::FunnelBranch).nu;
        EXPECT_LT(std::abs(funnel * funnel - expected), 1e-14 * std::abs(expected) + 1e-15);
        if (lambda.imag() > 0.0) {
          EXPECT_GT(funnel.real(), 0.0) << lambda;
        }
      }
    }
  }
}

TEST(SeedCusp, FigureParametersAtHundred) {
  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  const auto s = cuspres::seed_cusp(100, prob);
  EXPECT_NEAR(s.zeta.real(), 200.0 * pi / std::numbers::e, 1e-12);
  EXPECT_NEAR(s.zeta.real(), 231.1455, 1e-4);
  EXPECT_EQ(s.zeta.imag(), 0.0);
  EXPECT_NEAR(s.nu_tilde.real(), 57.1371, 1e-4);
  EXPECT_NEAR(s.lambda0.real(), 77.6574, 1e-4);
  EXPECT_EQ(s.lambda0.imag(), -1.0);
}

TEST(SeedCusp, ImaginaryPartIsExactlyMinusBjOverTwo) {
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}}) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    for (int k : {10, 77, 1000, 123456}) {
      EXPECT_EQ(cuspres::seed_cusp(k, prob).lambda0.imag(), -0.5 * b * prob.j());
    }
  }
}

TEST(SeedCusp, RatioToLeadingLawTrendsToOne) {
  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  const auto gap = [&](int k) {
    return std::abs(cuspres::seed_cusp(k, prob).lambda0.real() / cuspres::predicted_cusp(k, prob).first - 1.0);
  };
  // The gap peaks near k = 10^3 before the log log k / log k decay takes over.
  EXPECT_LT(gap(1000000), gap(100));
  EXPECT_LT(gap(2000000000), gap(1000000));
}

TEST(SeedCusp, RequiresIndexAtLeastTen) {
  EXPECT_THROW(cuspres::seed_cusp(9, ModeProblem::cusp(-1.0, 1.0, 1.0)), cuspres::DomainError);
  EXPECT_THROW(cuspres::seed_cusp(20, ModeProblem::funnel(1.0, -1.0, 1.0)), cuspres::ConfigError);
}

TEST(SeedFunnel, Examples) {
  const cplx s2 = cuspres::seed_funnel(100, ModeProblem::funnel(1.0, -1.0, 1.0));
  EXPECT_NEAR(s2.real(), 314.159, 1e-3);
  EXPECT_NEAR(s2.imag(), -4.605, 1e-3);
  const cplx s1 = cuspres::seed_funnel(100, ModeProblem::funnel(1.0, -2.0, 1.0));
  EXPECT_NEAR(s1.real(), 314.159, 1e-3);
  EXPECT_NEAR(s1.imag(), -2.303, 1e-3);
}

TEST(SeedFunnel, Scaling) {
  const auto prob = ModeProblem::funnel(1.5, -1.5, 1.0);
  for (int k : {10, 100, 1000}) {
    const cplx diff = cuspres::seed_funnel(2 * k, prob) - cuspres::seed_funnel(k, prob);
    const cplx expected = cplx{pi * 1.5 * k, 0.0} - cplx{0.0, prob.j() * 1.5 / 2.0} * std::log(2.0);
    EXPECT_LT(std::abs(diff - expected), 1e-9 * k);
  }
}

TEST(RefinedSeeds, CloserToRootsThanLeadingSeeds) {
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}}) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    for (int k : {50, 300}) {
      const auto root = cuspres::solve_index(k, prob, cuspres::SolverConfig{});
      EXPECT_LT(std::abs(root.lambda - cuspres::refined_seed_cusp(k, prob).lambda0),
                std::abs(root.lambda - cuspres::seed_cusp(k, prob).lambda0))
          << a << ' ' << b << ' ' << k;
    }
  }
  for (double b : {-1.0, -2.0}) {
    const auto prob = ModeProblem::funnel(1.0, b, 1.0);
    const auto root = cuspres::solve_index(200, prob, cuspres::SolverConfig{});
    EXPECT_LT(std::abs(root.lambda - cuspres::refined_seed_funnel(200, prob)), 0.1);
  }
}

TEST(PredictedCusp, Examples) {
  const auto p1 = cuspres::predicted_cusp(1000, ModeProblem::cusp(-1.0, 1.0, 1.0));
  EXPECT_NEAR(p1.first, 1000.0 * pi / std::log(1000.0), 1e-10);
  EXPECT_NEAR(p1.first, 454.792, 1e-3);
  EXPECT_EQ(p1.second, -1.0);
  const auto p2 = cuspres::predicted_cusp(100, ModeProblem::cusp(-2.0, 2.0, 1.0));
  EXPECT_NEAR(p2.first, 136.44, 0.01);
  EXPECT_EQ(p2.second, -2.0);
  EXPECT_EQ(cuspres::predicted_cusp(100, ModeProblem::cusp(-2.0, 1.0, 1.0)).second, -0.5);
  EXPECT_EQ(cuspres::predicted_cusp(100, ModeProblem::cusp(-1.0, 2.0, 1.0)).second, -1.0);
}

TEST(WeylCount, Definition) {
  std::vector<cuspres::Resonance> empty;
  EXPECT_EQ(cuspres::weyl_count(empty, 100.0), 0u);

  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  const auto run = cuspres::enumerate(prob, 10, 600, 10, cuspres::SolverConfig{}, 4);
  ASSERT_TRUE(run.complete());
  ASSERT_GE(run.resonances.size(), 50u);
  EXPECT_EQ(cuspres::weyl_count(run.resonances, run.resonances[49].lambda.real()), 50u);
  EXPECT_EQ(cuspres::weyl_count(run.resonances, run.resonances.front().lambda.real() - 1.0), 0u);
}

TEST(WeylModel, Examples) {
  EXPECT_NEAR(cuspres::weyl_model(std::numbers::e, 1.0), 0.8653, 1e-4);
  EXPECT_NEAR(cuspres::weyl_model(1000.0, 1.0), 1000.0 * std::log(1000.0) / pi, 1e-9);
  EXPECT_NEAR(cuspres::weyl_model(1000.0, 1.0), 2198.807, 1e-3);
  EXPECT_DOUBLE_EQ(cuspres::weyl_model(500.0, 2.0), 0.5 * cuspres::weyl_model(500.0, 1.0));
  EXPECT_THROW(cuspres::weyl_model(2.0, 1.0), cuspres::DomainError);
}

TEST(PhaseVolume, DegenerateAtLambdaEqualsM) {
  EXPECT_EQ(cuspres::phase_volume(2.0, 2.0, 1.0), 0.0);
  EXPECT_THROW(cuspres::phase_volume(1.0, 2.0, 1.0), cuspres::DomainError);
}

TEST(PhaseVolume, MatchesRiemannSum) {
  const double lambda = std::numbers::e;
  const double r_star = std::log(lambda) / 1.0;
  const int n = 1000000;
  const double h = r_star / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * h;
    sum += std::sqrt(std::max(0.0, lambda * lambda - std::exp(2.0 * r)));
  }
  const double riemann = sum * h / pi;
  const double value = cuspres::phase_volume(lambda, 1.0, 1.0);
  EXPECT_GT(value, 0.0);
  EXPECT_NEAR(value, riemann, 1e-7 * riemann);
}

TEST(PhaseVolume, WithinOrderLambdaOfWeylModel) {
  for (double lambda : {100.0, 1000.0, 10000.0}) {
    const double diff = std::abs(cuspres::phase_volume(lambda, 1.0, 1.0) - cuspres::weyl_model(lambda, 1.0));
    EXPECT_LE(diff, 2.0 * lambda) << lambda;
  }
}

TEST(RefinementLogic, ImaginaryNuTildeTimesLogBounded) {
  // v~ recovered from a polished root via lambda = (b e z v~ - i b j)/2.
  double worst = 0.0;
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}}) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    for (int k : {100, 400, 1000}) {
      const auto root = cuspres::solve_index(k, prob, cuspres::SolverConfig{});
      const cplx nu_tilde =
          (2.0 * root.lambda + cplx{0.0, b * prob.j()}) / (b * std::numbers::e * prob.z());
      worst = std::max(worst, std::abs(nu_tilde.imag()) * std::log(std::abs(nu_tilde)));
    }
  }
  EXPECT_LE(worst, 10.0);
}
