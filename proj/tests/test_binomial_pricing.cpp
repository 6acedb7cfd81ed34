#include "greedfear/binomial_pricing.hpp"
#include "greedfear/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace greedfear;

namespace {

GreedFearBinomialSpec reference(double A, int n)
{
    return {100.0, 0.10, 0.2, 0.05, A, n, 1.0};
}

auto call(double K)
{
    return [K](double x) { return std::max(x - K, 0.0); };
}

double phi(double x) { return boost::math::cdf(boost::math::normal(), x); }

double dividend_call_oracle(double S, double K, double tau, double r, double sigma, double q)
{
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(S / K) + (r - q + 0.5 * sigma * sigma) * tau) / sd;
    return S * std::exp(-q * tau) * phi(d1) - K * std::exp(-r * tau) * phi(d1 - sd);
}

// Node-by-node recursion over explicit pow() prices.
double naive_tree(double S0, double mu, double sigma, double r, double A, int n, double T, double K)
{
    const double dt = T / n;
    const double u = 1.0 + mu * dt + sigma * std::sqrt(dt);
    const double d = 1.0 + mu * dt - sigma * std::sqrt(dt);
    const double theta = (mu + (mu - r) * A - r) / sigma;
    const double pu = 0.5 - 0.5 * theta * std::sqrt(dt);
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) c[j] = std::max(S0 * std::pow(u, j) * std::pow(d, n - j) - K, 0.0);
    for (int k = n - 1; k >= 0; --k)
        for (int j = 0; j <= k; ++j) c[j] = std::exp(-r * dt) * (pu * c[j + 1] + (1.0 - pu) * c[j]);
    return c[0];
}

}  // namespace

TEST(Tree, OneStepFactors)
{
    const auto lattice = build_tree(reference(0.0, 1));
    EXPECT_DOUBLE_EQ(lattice.node(1, 1).price, 100.0 * (1.0 + 0.10 + 0.2));
    EXPECT_DOUBLE_EQ(lattice.node(1, 0).price, 100.0 * (1.0 + 0.10 - 0.2));
    EXPECT_EQ(lattice.node(0, 0).price, 100.0);
}

TEST(Tree, RecombiningLevels)
{
    const auto spec = reference(0.3, 40);
    const auto lattice = build_tree(spec);
    ASSERT_EQ(lattice.n_steps(), 40);
    const double u = spec.up(), d = spec.down();
    for (int k = 0; k <= 40; ++k) {
        ASSERT_EQ(lattice.level(k).size(), k + 1);
        for (int j = 0; j <= k; ++j) {
            const double direct = 100.0 * std::pow(u, j) * std::pow(d, k - j);
            EXPECT_NEAR(lattice.node(k, j).price, direct, 1e-12 * direct);
            EXPECT_GT(lattice.node(k, j).price, 0.0);
        }
    }
}

TEST(Tree, ZeroVolatilityIsOnePath)
{
    GreedFearBinomialSpec spec{50.0, 0.08, 0.0, 0.03, 0.0, 12, 2.0};
    const auto lattice = build_tree(spec);
    for (int k = 0; k <= 12; ++k) {
        const double expected = 50.0 * std::pow(1.0 + 0.08 * 2.0 / 12.0, k);
        for (int j = 0; j <= k; ++j) EXPECT_NEAR(lattice.node(k, j).price, expected, 1e-12 * expected);
    }
    EXPECT_THROW(price_binomial(spec, call(50.0)), DomainError);
}

TEST(Tree, CoarseStepNamesMinimalCount)
{
    auto spec = reference(50.0, 10);
    // θ = (0.05 + 2.5)/0.2 = 12.75 needs √(1/n) < 1/12.75, so n >= 163
    EXPECT_EQ(minimal_steps(spec), 163);
    try {
        build_tree(spec);
        FAIL() << "expected ConfigurationError";
    } catch (const ConfigurationError& e) {
        EXPECT_NE(std::string(e.what()).find("163"), std::string::npos) << e.what();
    }
    spec.n_steps = 163;
    EXPECT_NO_THROW(build_tree(spec));
    spec.n_steps = 162;
    EXPECT_THROW(build_tree(spec), ConfigurationError);
}

TEST(Tree, MinimalCountAgreesWithScan)
{
    for (double sigma : {0.2, 0.9, 1.5, 3.0}) {
        for (double A : {-4.0, 0.0, 2.0}) {
            GreedFearBinomialSpec spec{100.0, 0.1, sigma, 0.05, A, 1, 1.0};
            int first = 1;
            for (int n = 1; n < 5000; ++n) {
                spec.n_steps = n;
                bool ok = true;
                try {
                    validate(spec);
                } catch (const ConfigurationError&) {
                    ok = false;
                }
                if (!ok) first = n + 1;
            }
            EXPECT_EQ(minimal_steps(spec), first) << sigma << " " << A;
        }
    }
}

TEST(Tree, RejectsBadFields)
{
    EXPECT_THROW(build_tree({100.0, 0.05, 0.2, 0.06, 0.0, 10, 1.0}), DomainError);
    EXPECT_THROW(build_tree({-1.0, 0.1, 0.2, 0.05, 0.0, 10, 1.0}), DomainError);
    EXPECT_THROW(build_tree({100.0, 0.1, 0.2, 0.05, 0.0, 0, 1.0}), DomainError);
    EXPECT_THROW(build_tree({100.0, 0.1, 0.2, 0.05, 0.0, 10, 0.0}), DomainError);
}

TEST(Weights, InUnitIntervalAndSumToOne)
{
    for (double A : {-2.0, -0.5, 0.0, 0.5, 3.0}) {
        for (int n : {50, 200, 1000}) {
            const auto w = branch_weights(reference(A, n));
            EXPECT_GT(w.up, 0.0);
            EXPECT_LT(w.up, 1.0);
            EXPECT_GT(w.down, 0.0);
            EXPECT_LT(w.down, 1.0);
            EXPECT_DOUBLE_EQ(w.up + w.down, 1.0);
        }
    }
}

TEST(Weights, DriftUnderPricingMeasure)
{
    // E[S_{k+1}/S_k] = 1 + (r - D_y)Δt
    const auto spec = reference(0.7, 250);
    const auto w = branch_weights(spec);
    EXPECT_NEAR(w.up * spec.up() + w.down * spec.down(), 1.0 + (0.05 - spec.implied_dividend_yield()) * spec.dt(),
                1e-15);
}

TEST(HedgeNode, Examples)
{
    EXPECT_DOUBLE_EQ(hedge_ratio_node(10.0, 6.0, 110.0, 95.0, 0.0), 4.0 / 15.0);
    const double G = node_greed_fear(1.0, 0.2, 10.0, 6.0, 0.01);
    EXPECT_NEAR(G, 0.08, 1e-16);
    EXPECT_NEAR(hedge_ratio_node(10.0, 6.0, 110.0, 95.0, G), 0.33956, 1e-5);
    EXPECT_NEAR(hedge_ratio_node(10.0, 6.0, 110.0, 95.0, G), 4.0 / 15.0 + 0.08 * 205.0 / 225.0, 1e-15);
    for (double A : {-3.0, 0.4, 7.0}) {
        const double g = node_greed_fear(A, 0.3, 5.5, 5.5, 0.02);
        EXPECT_EQ(hedge_ratio_node(5.5, 5.5, 101.0, 99.0, g), 0.0);
    }
    EXPECT_THROW(hedge_ratio_node(1.0, 0.0, 100.0, 100.0, 0.0), ConfigurationError);
}

TEST(Binomial, MatchesNaiveRecursion)
{
    for (double A : {-1.0, 0.0, 0.8}) {
        EXPECT_NEAR(price_binomial(reference(A, 60), call(97.0)), naive_tree(100.0, 0.1, 0.2, 0.05, A, 60, 1.0, 97.0),
                    1e-11);
    }
}

TEST(Binomial, ConstantPayoffDiscounts)
{
    for (double A : {-0.5, 0.0, 0.5, 1.0}) {
        EXPECT_NEAR(price_binomial(reference(A, 300), [](double) { return 3.0; }), 3.0 * std::exp(-0.05), 1e-12);
    }
}

TEST(Binomial, ZeroGreedIsBlackScholes)
{
    EXPECT_NEAR(price_binomial(reference(0.0, 2000), call(100.0)), 10.4506, 0.02);
}

TEST(Binomial, ConvergesToDividendClosedForm)
{
    for (double A : {-0.5, 0.0, 0.5, 1.0}) {
        const double limit = dividend_call_oracle(100.0, 100.0, 1.0, 0.05, 0.2, 0.05 * A);
        EXPECT_NEAR(price_binomial(reference(A, 2000), call(100.0)), limit, 0.02) << "A=" << A;
    }
}

TEST(Binomial, ErrorShrinksUpToOscillationFloor)
{
    // Lattice prices swing between neighbouring n as nodes cross the strike; that swing is the floor.
    for (double A : {-0.5, 0.0, 0.5, 1.0}) {
        const double limit = price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.05 * A);
        double previous = std::abs(price_binomial(reference(A, 125), call(100.0)) - limit);
        for (int n : {500, 2000}) {
            const double c = price_binomial(reference(A, n), call(100.0));
            const double err = std::abs(c - limit);
            const double swing = std::abs(c - price_binomial(reference(A, n + 1), call(100.0)));
            EXPECT_LE(err, std::max(previous, swing)) << "A=" << A << " n=" << n;
            previous = err;
        }
    }
}

TEST(Binomial, GreedLowersPrice)
{
    double last_tree = INFINITY, last_closed = INFINITY;
    for (int i = 0; i < 9; ++i) {
        const double A = -1.0 + 0.25 * i;
        const double tree = price_binomial(reference(A, 500), call(100.0));
        const double closed = price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.05 * A);
        EXPECT_LE(tree, last_tree) << "A=" << A;
        EXPECT_LE(closed, last_closed) << "A=" << A;
        last_tree = tree;
        last_closed = closed;
    }
}

TEST(DividendClosedForm, Examples)
{
    EXPECT_NEAR(price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.0), 10.4506, 1e-4);
    EXPECT_NEAR(price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.02), 9.2270, 5e-4);
    EXPECT_NEAR(price_closed_form_dividend(100.0, 90.0, 0.5, 2.0, 0.03, 0.3, -0.01),
                dividend_call_oracle(100.0, 90.0, 1.5, 0.03, 0.3, -0.01), 1e-12);
    EXPECT_THROW(price_closed_form_dividend(100.0, 100.0, 1.0, 1.0, 0.05, 0.2, 0.0), DomainError);
}

TEST(DividendClosedForm, NonincreasingInYield)
{
    double last = INFINITY;
    for (int i = 0; i <= 40; ++i) {
        const double c = price_closed_form_dividend(100.0, 105.0, 0.0, 1.0, 0.05, 0.2, -0.1 + 0.005 * i);
        EXPECT_LE(c, last);
        last = c;
    }
}

TEST(DividendClosedForm, PutCallParity)
{
    for (double K : {70.0, 100.0, 140.0}) {
        for (double D : {-0.05, 0.0, 0.025, 0.1}) {
            const double c = price_closed_form_dividend(100.0, K, 0.0, 1.3, 0.05, 0.25, D);
            const double p = price_put_closed_form_dividend(100.0, K, 0.0, 1.3, 0.05, 0.25, D);
            EXPECT_NEAR(c - p, 100.0 * std::exp(-D * 1.3) - K * std::exp(-0.05 * 1.3), 1e-10);
        }
    }
}
