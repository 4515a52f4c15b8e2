#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rqv/bipp.hpp"
#include "rqv/error.hpp"

using namespace rqv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PartialPrior m3(double th1, double th2, double e1, double e2) {
    return PartialPrior({0.0, e1, e2, kInf}, {th1, th2, 1.0 - th1 - th2});
}

PartialPrior m2(double th1, double e1) { return PartialPrior({0.0, e1, kInf}, {th1, 1.0 - th1}); }

// Posterior mean for a discrete prior, evaluated directly (no rescaling).
double direct_posterior(const std::vector<double>& pts, const std::vector<double>& w, double t) {
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const long double l = std::exp(-static_cast<long double>(pts[i]) * t);
        num += pts[i] * w[i] * l;
        den += w[i] * l;
    }
    return static_cast<double>(num / den);
}

}  // namespace

TEST(SingularLikelihood, Examples) {
    EXPECT_DOUBLE_EQ(singular_likelihood(0.0, 100.0), 1.0);
    EXPECT_DOUBLE_EQ(singular_likelihood(0.5, 0.0), 1.0);
    EXPECT_NEAR(singular_likelihood(0.001, 1000.0), 0.3678794, 1e-7);
}

TEST(PartialPrior, Validation) {
    EXPECT_THROW(PartialPrior({0.0, 1.0}, {1.0}), InvalidArgument);
    EXPECT_THROW(PartialPrior({0.0, 1.0, 0.5}, {0.5, 0.5}), InvalidArgument);
    EXPECT_THROW(PartialPrior({0.0, kInf, 2.0}, {0.5, 0.5}), InvalidArgument);
    EXPECT_THROW(PartialPrior({0.0, 1.0, 2.0}, {0.5, 0.4}), InvalidArgument);
    EXPECT_THROW(PartialPrior({0.0, 1.0, 2.0}, {1.0, 0.0}), InvalidArgument);
    EXPECT_THROW(PartialPrior({-1.0, 1.0, 2.0}, {0.5, 0.5}), InvalidArgument);
    const PartialPrior p({0.0, 1.0, 2.0}, {0.5, 0.5 + 5e-10});
    EXPECT_NEAR(p.theta(1) + p.theta(2), 1.0, 1e-15);
}

TEST(PartialPrior, LoadJson) {
    const auto p = load_partial_prior(R"({"epsilons":[0, 0.1, "inf"], "thetas":[0.4, 0.6]})");
    EXPECT_EQ(p.m(), 2u);
    EXPECT_TRUE(std::isinf(p.epsilon(2)));
    EXPECT_THROW(load_partial_prior(R"({"epsilons":[0, 0.1, "inf"], "thetas":[0.4, 0.6], "x":1})"), ParseError);
    EXPECT_THROW(load_partial_prior(R"({"epsilons":[0, 0.1, "inf"], "thetas":[0.4, 0.7]})"), ParseError);
    EXPECT_THROW(load_partial_prior(R"({"epsilons":[0, 0.1, "inf"], )"), ParseError);
}

TEST(BippClosedForm, TwoBandPlateau) {
    const auto p = m2(0.3, 1.0 / 500);
    const auto b = bipp_closed_form_m2(p, 1000.0);
    EXPECT_NEAR(b.upper, 1.0 / 150, 1e-12);
    EXPECT_EQ(b.lower, 0.0);
    EXPECT_LE(bipp_upper_numeric(p, 1000.0), b.upper * (1 + 1e-9));
}

TEST(BippClosedForm, TwoBandNearZeroExposureIsFiniteAndAbovePlateau) {
    const auto p = m2(0.5, 1.0 / 5000);
    const auto b = bipp_closed_form_m2(p, 1e-9);
    EXPECT_TRUE(std::isfinite(b.upper));
    EXPECT_GE(b.upper, p.epsilon(1) / p.theta(1));
}

TEST(BippClosedForm, ThreeBandAsymptote) {
    const auto p = m3(0.1, 0.1, 1.0 / 5000, 1.0 / 1000);
    const auto b = bipp_closed_form_m3(p, 1e7);
    EXPECT_NEAR(b.upper, 4e-4, 4e-6);
}

TEST(BippClosedForm, ContinuousAtCaseSwitches) {
    const auto p = m3(0.3, 0.1, 1.0 / 5000, 1.0 / 1000);
    for (double t0 : {1000.0, 5000.0}) {
        const auto before = bipp_closed_form_m3(p, t0 * (1 - 1e-13));
        const auto at = bipp_closed_form_m3(p, t0);
        EXPECT_NEAR(before.upper, at.upper, 1e-9 * at.upper);
        EXPECT_NEAR(before.lower, at.lower, 1e-9 * std::max(at.lower, 1e-300));
    }
    EXPECT_EQ(closed_form_case(p, 999.0).upper_case, 1);
    EXPECT_EQ(closed_form_case(p, 1000.0).upper_case, 2);
    EXPECT_EQ(closed_form_case(p, 5000.0).upper_case, 2);
    EXPECT_EQ(closed_form_case(p, 5001.0).upper_case, 3);
}

TEST(BippClosedForm, LowerTakesTheSmallerEdge) {
    // Late in the mission the eps_2 edge gives the smaller value.
    const auto p = m3(0.1, 0.1, 1.0 / 5000, 1.0 / 1000);
    const double t = 3000.0;
    const double l1 = std::exp(-p.epsilon(1) * t);
    const double l2 = std::exp(-p.epsilon(2) * t);
    const double a = p.epsilon(1) * l1 * p.theta(2) / (p.theta(1) + l1 * p.theta(2));
    const double b = p.epsilon(2) * l2 * p.theta(2) / (p.theta(1) + l2 * p.theta(2));
    EXPECT_LT(b, a);
    EXPECT_DOUBLE_EQ(bipp_closed_form_m3(p, t).lower, b);
    EXPECT_EQ(closed_form_case(p, t).lower_branch, 2);
    EXPECT_LE(bipp_closed_form_m3(p, t).lower, bipp_lower_numeric(p, t) * (1 + 1e-9));
}

TEST(BippClosedForm, ArityErrors) {
    EXPECT_THROW(bipp_closed_form_m3(m2(0.3, 0.01), 1.0), InvalidArity);
    EXPECT_THROW(bipp_closed_form_m2(m3(0.3, 0.3, 0.01, 0.1), 1.0), InvalidArity);
    const PartialPrior p4({0.0, 0.01, 0.02, 0.05, kInf}, {0.25, 0.25, 0.25, 0.25});
    EXPECT_THROW(bipp_bounds(p4, 1.0, BippStrategy::closed_form), InvalidArity);
}

TEST(BippBounds, Dispatch) {
    EXPECT_EQ(bipp_bounds(m3(0.3, 0.3, 0.01, 0.1), 10.0).method, BippMethod::closed_form);
    const PartialPrior p5({0.0, 0.01, 0.02, 0.05, 0.1, kInf}, {0.2, 0.2, 0.2, 0.2, 0.2});
    const auto b = bipp_bounds(p5, 10.0);
    EXPECT_EQ(b.method, BippMethod::numeric);
    EXPECT_LE(b.lower, b.upper);
}

TEST(BippBounds, ZeroExposureIsPriorOnly) {
    const PartialPrior p({0.0, 0.1, 0.5, 2.0}, {0.2, 0.3, 0.5});
    EXPECT_NEAR(bipp_lower_numeric(p, 0.0), 0.1 * 0.3 + 0.5 * 0.5, 1e-15);
    EXPECT_NEAR(bipp_upper_numeric(p, 0.0), 0.1 * 0.2 + 0.5 * 0.3 + 2.0 * 0.5, 1e-15);
    const auto b = bipp_closed_form_m3(m3(0.3, 0.3, 0.01, 0.1), 0.0);
    EXPECT_TRUE(std::isinf(b.upper));
    EXPECT_NEAR(b.lower, 0.01 * 0.3 + 0.1 * 0.4, 1e-15);
}

TEST(BippNumeric, MatchesGridOracle) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        const double e1 = std::pow(10.0, -4.0 + 2.0 * u(gen));
        const double e2 = e1 * (2.0 + 10.0 * u(gen));
        const double th1 = 0.1 + 0.5 * u(gen);
        const double th2 = (1.0 - th1) * (0.2 + 0.6 * u(gen));
        const auto p = m3(th1, th2, e1, e2);
        for (double t : {10.0, 1e3, 1e5}) {
            const auto grid = bipp_grid_oracle(p, t, 24);
            EXPECT_NEAR(bipp_upper_numeric(p, t), grid.upper, 1e-6 * grid.upper) << "t=" << t;
            EXPECT_NEAR(bipp_lower_numeric(p, t), grid.lower, 1e-6 * std::max(grid.lower, 1e-300)) << "t=" << t;
        }
    }
}

TEST(BippNumeric, FourBandsMatchGridOracle) {
    const PartialPrior p({0.0, 0.001, 0.004, 0.01, kInf}, {0.3, 0.3, 0.3, 0.1});
    for (double t : {50.0, 500.0}) {
        const auto grid = bipp_grid_oracle(p, t, 12);
        EXPECT_NEAR(bipp_upper_numeric(p, t), grid.upper, 1e-6 * grid.upper);
        EXPECT_NEAR(bipp_lower_numeric(p, t), grid.lower, 1e-6 * grid.lower);
    }
}

TEST(BippGridOracle, AgreesWithPlainTripleLoop) {
    const auto p = m3(0.3, 0.3, 1.0 / 2000, 1.0 / 1000);
    const double t = 1500.0;
    const std::size_t n = 120;
    const double top = p.epsilon(2) + 2.0 * (2.0 + p.theta(3) / p.theta(2)) / t;
    double best_hi = 0.0;
    double best_lo = kInf;
    for (std::size_t a = 0; a < n; ++a) {
        const double l1 = p.epsilon(1) * (a + 1) / n;
        for (std::size_t b = 0; b < n; ++b) {
            const double l2 = p.epsilon(1) + (p.epsilon(2) - p.epsilon(1)) * (b + 1) / n;
            for (std::size_t c = 0; c < n; ++c) {
                const double l3 = p.epsilon(2) + (top - p.epsilon(2)) * (c + 1) / n;
                best_hi = std::max(best_hi, direct_posterior({l1, l2, l3}, p.thetas(), t));
            }
        }
    }
    for (std::size_t a = 0; a <= n; ++a) {
        const double x1 = static_cast<double>(a) / n;
        for (std::size_t b = 0; b <= n; ++b) {
            const double x2 = static_cast<double>(b) / n;
            for (std::size_t c = 0; c <= n; ++c) {
                const double x3 = static_cast<double>(c) / n;
                // mass 1-x3 of the top band sits at infinity and drops out
                best_lo = std::min(best_lo, direct_posterior({0.0, p.epsilon(1), p.epsilon(1), p.epsilon(2), p.epsilon(2)},
                                                             {x1 * p.theta(1), (1 - x1) * p.theta(1), x2 * p.theta(2),
                                                              (1 - x2) * p.theta(2), x3 * p.theta(3)},
                                                             t));
            }
        }
    }
    const auto oracle = bipp_grid_oracle(p, t, 20);
    EXPECT_GE(oracle.upper, best_hi * (1 - 1e-12));
    EXPECT_LE(oracle.upper, best_hi * (1 + 1e-3));
    EXPECT_LE(oracle.lower, best_lo * (1 + 1e-12));
    EXPECT_GE(oracle.lower, best_lo * (1 - 1e-3));
    EXPECT_THROW(bipp_grid_oracle(p, t, 9), InvalidArgument);
}

TEST(BippGridOracle, ResolutionDoublingIsStable) {
    const auto p = m3(0.2, 0.5, 1.0 / 3000, 1.0 / 700);
    const auto a = bipp_grid_oracle(p, 2000.0, 16);
    const auto b = bipp_grid_oracle(p, 2000.0, 32);
    EXPECT_NEAR(a.upper, b.upper, 1e-6 * b.upper);
    EXPECT_NEAR(a.lower, b.lower, 1e-6 * b.lower);
}

TEST(BippGridOracle, CollapsedBandsGivePointPosterior) {
    const PartialPrior p({0.01, 0.01 + 1e-9, 0.01 + 2e-9, 0.01 + 3e-9}, {0.4, 0.3, 0.3});
    const double t = 30.0;
    const double point = direct_posterior({0.01, 0.01 + 1e-9, 0.01 + 2e-9}, {0.4, 0.3, 0.3}, t);
    const auto b = bipp_grid_oracle(p, t, 12);
    EXPECT_NEAR(b.lower, point, 1e-6 * point);
    EXPECT_NEAR(b.upper, point, 1e-6 * point);
}

TEST(BippTheory, ConcavityOfLikelihoodInverse) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(1e-9, 1.0);
    const double t = 7.0;
    auto g = [t](double w) { return -w * std::log(w) / t; };
    for (int k = 0; k < 10000; ++k) {
        const double w1 = u(gen);
        const double w2 = u(gen);
        const double a = u(gen);
        EXPECT_GE(g(a * w1 + (1 - a) * w2), a * g(w1) + (1 - a) * g(w2) - 1e-12);
    }
}

TEST(BippTheory, ConsistentDiscretePriorsLieInsideBounds) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto p = m3(0.25, 0.5, 1.0 / 4000, 1.0 / 800);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> pts;
        std::vector<double> w;
        for (std::size_t band = 1; band <= 3; ++band) {
            const double lo = p.epsilon(band - 1);
            const double hi = std::isfinite(p.epsilon(band)) ? p.epsilon(band) : lo * 20;
            double left = p.theta(band);
            for (int j = 0; j < 3; ++j) {
                const double share = j == 2 ? left : left * u(gen);
                left -= share;
                pts.push_back(lo + (hi - lo) * (1e-9 + u(gen)));
                w.push_back(share);
            }
        }
        const double t = std::pow(10.0, 5.0 * u(gen));
        const double mean = direct_posterior(pts, w, t);
        const auto cf = bipp_closed_form_m3(p, t);
        EXPECT_GE(mean, cf.lower - 1e-9);
        EXPECT_LE(mean, cf.upper + 1e-9);
        EXPECT_GE(mean, bipp_lower_numeric(p, t) - 1e-9);
        EXPECT_LE(mean, bipp_upper_numeric(p, t) + 1e-9);
    }
}

TEST(BippTheory, FigureCurvesAreMonotone) {
    for (double th1 : {0.1, 0.3, 0.6, 0.8}) {
        const auto p = m3(th1, 0.1, 1.0 / 5000, 1.0 / 1000);
        double prev = kInf;
        for (int k = 0; k <= 120; ++k) {
            const double t = std::pow(10.0, k / 20.0);
            const auto b = bipp_bounds(p, t);
            EXPECT_LE(b.lower, b.upper);
            EXPECT_LE(b.upper, prev * (1 + 1e-12)) << "t=" << t;
            prev = b.upper;
        }
        EXPECT_LT(bipp_bounds(p, 1e6).lower, 1e-40);
    }
}
