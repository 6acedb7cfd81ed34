#include "greedfear/diffusion_pricing.hpp"
#include "greedfear/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace greedfear;

namespace {

double phi(double x) { return boost::math::cdf(boost::math::normal(), x); }

// Black–Scholes with yield, through Boost's normal cdf.
double bs_oracle(double S, double K, double tau, double r, double sigma, double q)
{
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(S / K) + (r - q + 0.5 * sigma * sigma) * tau) / sd;
    return S * std::exp(-q * tau) * phi(d1) - K * std::exp(-r * tau) * phi(d1 - sd);
}

// e^{-r(1+G)τ} E(X_T - K)^+ - ∫ e^{-r(1+G)s} h ds with X lognormal at drift r - G(μ - r),
// both pieces by quadrature over the standard normal.
double fk_quadrature(double S, double K, double tau, double r, double sigma, double mu, double G)
{
    using boost::math::quadrature::gauss_kronrod;
    const double drift = r - G * (mu - r);
    const double sd = sigma * std::sqrt(tau);
    const double m = std::log(S) + (drift - 0.5 * sigma * sigma) * tau;
    const double z0 = (std::log(K) - m) / sd;
    auto integrand = [&](double z) {
        return (std::exp(m + sd * z) - K) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    };
    const double payoff = gauss_kronrod<double, 61>::integrate(integrand, z0, z0 + 40.0, 15, 1e-14);
    const double h = std::pow((1.0 + G) * mu - r, 2) * G / (sigma * sigma);
    const double ri = r * (1.0 + G);
    const double reward = gauss_kronrod<double, 61>::integrate(
        [&](double s) { return std::exp(-ri * s) * h; }, 0.0, tau, 5, 1e-15);
    return std::exp(-ri * tau) * payoff - reward;
}

auto call(double K)
{
    return [K](double x) { return std::max(x - K, 0.0); };
}

}  // namespace

TEST(DerivedCoefficients, ZeroGreedReduces)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.0);
    const auto c = derived_coefficients(spec, 0.0, 100.0);
    EXPECT_DOUBLE_EQ(c.r_invest, 0.05);
    EXPECT_DOUBLE_EQ(c.sharpe, 0.25);
    EXPECT_DOUBLE_EQ(c.sharpe_tau, 0.25);
    EXPECT_DOUBLE_EQ(c.div_yield, 0.0);
    EXPECT_DOUBLE_EQ(c.drift_R, 0.05);
    EXPECT_DOUBLE_EQ(c.reward_h, 0.0);
}

TEST(DerivedCoefficients, ConstantCaseExample)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.10, 0.2, 0.05, 0.1);
    const auto c = derived_coefficients(spec, 0.3, 87.0);
    EXPECT_NEAR(c.sharpe_tau, 0.30, 1e-14);
    EXPECT_NEAR(c.reward_h, 0.009, 1e-15);
    EXPECT_NEAR(c.drift_R, 0.045, 1e-15);
    EXPECT_NEAR(c.r_invest, 0.055, 1e-15);

    const auto fear = GreedFearDiffusionSpec::constant(0.10, 0.2, 0.04, -0.5);
    EXPECT_NEAR(derived_coefficients(fear, 0.0, 1.0).r_invest, 0.02, 1e-16);
}

TEST(DerivedCoefficients, DefaultDriftMatchesClosedFormDrift)
{
    for (double G : {-0.6, -0.3, 0.1, 0.5, 2.0}) {
        for (double mu : {0.07, 0.12}) {
            const double r = 0.04;
            const auto spec = GreedFearDiffusionSpec::constant(mu, 0.25, r, G);
            const double expected = r - G * (mu - r);
            EXPECT_NEAR(derived_coefficients(spec, 0.0, 50.0).drift_R, expected, 1e-14);
            const double with_term = derived_coefficients(spec, 0.0, 50.0, true).drift_R;
            EXPECT_GT(std::abs(with_term - expected), 1e-4) << "G=" << G;
        }
    }
}

TEST(DerivedCoefficients, RejectsBadInputs)
{
    auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    EXPECT_THROW(derived_coefficients(spec, 0.0, 0.0), DomainError);
    spec.sigma = [](double, double) { return 0.0; };
    EXPECT_THROW(derived_coefficients(spec, 0.0, 1.0), DomainError);
    spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    spec.sigma_tau = [](double, double) { return -0.1; };
    EXPECT_THROW(derived_coefficients(spec, 0.0, 1.0), DomainError);
    EXPECT_THROW(GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, -1.0), DomainError);
}

TEST(MonteCarlo, ZeroPayoffNoReward)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.0);
    const auto res = price_fk_monte_carlo(spec, [](double) { return 0.0; }, 0.0, 100.0, 1.0, {1000, 10, 3});
    EXPECT_EQ(res.price, 0.0);
    EXPECT_EQ(res.std_error, 0.0);
}

TEST(MonteCarlo, ConstantPayoffIsDiscounted)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.0);
    const auto res = price_fk_monte_carlo(spec, [](double) { return 7.0; }, 0.25, 100.0, 1.5, {2000, 20, 9});
    EXPECT_NEAR(res.price, 7.0 * std::exp(-0.05 * 1.25), 1e-12);
    EXPECT_LT(res.std_error, 1e-12);
}

TEST(MonteCarlo, RewardTermAgreesWithClosedForm)
{
    for (double G : {-0.3, 0.1, 0.5}) {
        const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, G);
        const auto res = price_fk_monte_carlo(spec, [](double) { return 0.0; }, 0.0, 100.0, 2.0, {200, 100, 4});
        const double exact = closed_form_reward_term(2.0, 0.05, 0.2, 0.1, G);
        // trapezoid error on e^{-cs}: about exact·(c·dt)²/12
        const double c = 0.05 * (1.0 + G), dt = 0.02;
        EXPECT_NEAR(-res.price, exact, 1.05 * std::abs(exact) * c * c * dt * dt / 12.0 + 1e-15) << "G=" << G;
    }
}

TEST(MonteCarlo, NonFiniteCoefficientIsNamed)
{
    auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    spec.mu_tau = [](double, double x) { return x > 100.0 ? std::numeric_limits<double>::quiet_NaN() : 0.11; };
    try {
        price_fk_monte_carlo(spec, call(100.0), 0.0, 100.0, 1.0, {100, 10, 1});
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("mu_tau"), std::string::npos) << e.what();
    }
}

TEST(MonteCarlo, RejectsBadSettings)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    EXPECT_THROW(price_fk_monte_carlo(spec, call(100.0), 1.0, 100.0, 1.0, {}), DomainError);
    EXPECT_THROW(price_fk_monte_carlo(spec, call(100.0), 0.0, 100.0, 1.0, {0, 10, 1}), DomainError);
    EXPECT_THROW(price_fk_monte_carlo(spec, call(100.0), 0.0, 100.0, 1.0, {10, 0, 1}), DomainError);
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.2);
    MonteCarloSettings mc{20000, 20, 42, true, 1};
    const auto one = price_fk_monte_carlo(spec, call(95.0), 0.0, 100.0, 1.0, mc);
    for (unsigned w : {2u, 3u, 8u}) {
        mc.workers = w;
        const auto many = price_fk_monte_carlo(spec, call(95.0), 0.0, 100.0, 1.0, mc);
        EXPECT_EQ(one.price, many.price);
        EXPECT_EQ(one.std_error, many.std_error);
    }
    mc.seed = 43;
    EXPECT_NE(price_fk_monte_carlo(spec, call(95.0), 0.0, 100.0, 1.0, mc).price, one.price);
}

TEST(MonteCarlo, MatchesClosedFormAtMillionPaths)
{
    for (double G : {-0.3, 0.1, 0.5}) {
        const auto spec = GreedFearDiffusionSpec::constant(0.10, 0.2, 0.05, G);
        const auto res = price_fk_monte_carlo(spec, call(100.0), 0.0, 100.0, 1.0, {1000000, 50, 2024});
        const double cf = price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.10, G);
        EXPECT_LT(std::abs(res.price - cf), 3.0 * res.std_error) << "G=" << G << " mc=" << res.price << " cf=" << cf;
    }
}

TEST(MonteCarlo, ZScoresAcrossSeeds)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.10, 0.2, 0.05, 0.1);
    const double cf = price_call_closed_form(100.0, 105.0, 0.0, 1.0, 0.05, 0.2, 0.10, 0.1);
    int excursions = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto res = price_fk_monte_carlo(spec, call(105.0), 0.0, 100.0, 1.0, {20000, 10, seed});
        if (std::abs(res.price - cf) / res.std_error >= 3.0) ++excursions;
    }
    EXPECT_LE(excursions, 1);
}

TEST(MonteCarlo, PlainSamplingWithoutAntithetics)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.10, 0.25, 0.03, -0.2);
    const auto res = price_fk_monte_carlo(spec, call(90.0), 0.0, 100.0, 0.5, {100000, 10, 5, false});
    const double cf = price_call_closed_form(100.0, 90.0, 0.0, 0.5, 0.03, 0.25, 0.10, -0.2);
    EXPECT_LT(std::abs(res.price - cf), 4.0 * res.std_error);
}

TEST(ClosedForm, BlackScholesReference)
{
    EXPECT_NEAR(price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.10, 0.0), 10.4506, 1e-4);
    EXPECT_NEAR(price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.10, 0.0),
                bs_oracle(100.0, 100.0, 1.0, 0.05, 0.2, 0.0), 1e-6);
    EXPECT_NEAR(black_scholes_call(100.0, 100.0, 1.0, 0.05, 0.2, 0.02), 9.227005508154036, 1e-10);
}

TEST(ClosedForm, ZeroGreedCollapsesToBlackScholes)
{
    for (double moneyness : {0.7, 0.9, 1.0, 1.1, 1.4}) {
        for (double sigma : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            for (double T : {0.1, 1.0, 5.0}) {
                const double K = 100.0 * moneyness;
                EXPECT_NEAR(price_call_closed_form(100.0, K, 0.0, T, 0.03, sigma, 0.08, 0.0),
                            bs_oracle(100.0, K, T, 0.03, sigma, 0.0), 1e-10)
                    << moneyness << " " << sigma << " " << T;
            }
        }
    }
}

TEST(ClosedForm, TinyStrikeGivesSpot)
{
    EXPECT_NEAR(price_call_closed_form(100.0, 1e-12, 0.0, 1.0, 0.05, 0.2, 0.1, 0.0), 100.0, 1e-9);
}

TEST(ClosedForm, MatchesLognormalQuadrature)
{
    for (double G : {-0.3, 0.1, 0.5}) {
        for (double K : {80.0, 100.0, 125.0}) {
            EXPECT_NEAR(price_call_closed_form(100.0, K, 0.2, 1.2, 0.05, 0.2, 0.10, G),
                        fk_quadrature(100.0, K, 1.0, 0.05, 0.2, 0.10, G), 1e-8)
                << "G=" << G << " K=" << K;
        }
    }
}

TEST(ClosedForm, RewardTermExample)
{
    // h = 0.009 at G = 0.1; rate 0.055
    EXPECT_NEAR(closed_form_reward_term(1.0, 0.05, 0.2, 0.10, 0.1), 0.009 * (1.0 - std::exp(-0.055)) / 0.055, 1e-16);
    EXPECT_EQ(closed_form_reward_term(1.0, 0.05, 0.2, 0.10, 0.0), 0.0);
}

TEST(ClosedForm, MonotoneAndConvexInStrike)
{
    for (double G : {-0.3, 0.0, 0.4}) {
        std::vector<double> c;
        for (int i = 0; i <= 40; ++i) c.push_back(price_call_closed_form(100.0, 60.0 + 2.0 * i, 0.0, 1.0, 0.05, 0.2, 0.1, G));
        for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i], c[i - 1]);
        for (std::size_t i = 1; i + 1 < c.size(); ++i) EXPECT_GE(c[i - 1] - 2.0 * c[i] + c[i + 1], -1e-12);
    }
}

TEST(ClosedForm, RejectsBadInputs)
{
    EXPECT_THROW(price_call_closed_form(100.0, 100.0, 1.0, 1.0, 0.05, 0.2, 0.1, 0.1), DomainError);
    EXPECT_THROW(price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, -0.2, 0.1, 0.1), DomainError);
    EXPECT_THROW(price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.1, -1.5), DomainError);
}

TEST(Hedge, Example)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    EXPECT_NEAR(hedge_ratios(spec, 0.0, 100.0, 10.0, 0.6, 1.0).a, 0.6015, 1e-14);
}

TEST(Hedge, ZeroGreedIsDelta)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.3, 0.05, 0.0);
    EXPECT_DOUBLE_EQ(hedge_ratios(spec, 0.5, 80.0, 4.0, 0.37, 1.02).a, 0.37);
}

TEST(Hedge, PortfolioIdentity)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double G = -0.9 + 2.0 * u(rng);
        const auto spec = GreedFearDiffusionSpec::constant(0.02 + 0.2 * u(rng), 0.05 + 0.5 * u(rng), 0.01 + 0.05 * u(rng), G);
        const double S = 10.0 + 200.0 * u(rng), f = 30.0 * u(rng), fx = u(rng), beta = 1.0 + u(rng);
        const auto hr = hedge_ratios(spec, 0.0, S, f, fx, beta);
        EXPECT_NEAR(hr.a * S + hr.b * beta, f * (1.0 + G), 1e-12 * std::max(1.0, std::abs(f)));
    }
}

TEST(Hedge, BondFromRate)
{
    const auto spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1);
    const auto implicit = hedge_ratios(spec, 2.0, 100.0, 12.0, 0.55);
    const auto explicit_beta = hedge_ratios(spec, 2.0, 100.0, 12.0, 0.55, std::exp(0.1));
    EXPECT_NEAR(implicit.b, explicit_beta.b, 1e-12);
    EXPECT_DOUBLE_EQ(implicit.a, explicit_beta.a);
}
