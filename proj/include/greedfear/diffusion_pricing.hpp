#pragma once

#include <cstdint>
#include <functional>

namespace greedfear {

/// Coefficient as a function of (time, price).
using Coefficient = std::function<double(double, double)>;

/// Itô market for the greed–fear hedger: the stock's (μ, σ), the traded instrument's (μ^τ, σ^τ),
/// the riskless rate r and the greed–fear functional 𝒢 > -1.
struct GreedFearDiffusionSpec {
    Coefficient mu;
    Coefficient sigma;
    Coefficient mu_tau;
    Coefficient sigma_tau;
    Coefficient r;
    Coefficient G;

    /// Constant case: μ^τ = (1+𝒢)μ, σ^τ = σ.
    static GreedFearDiffusionSpec constant(double mu, double sigma, double r, double G);
};

struct DerivedCoefficients {
    double r_invest;    ///< r(1+𝒢)
    double sharpe;      ///< (μ - r)/σ
    double sharpe_tau;  ///< (μ^τ - r)/σ^τ
    double div_yield;   ///< (θ^τ σ^τ² - θσ²)/σ, plus 𝒢r when requested
    double drift_R;     ///< r_invest - div_yield
    double reward_h;    ///< (θ^τ)² 𝒢
};

/// Throws DomainError when σ or σ^τ is not positive, x <= 0, or 𝒢 <= -1.
DerivedCoefficients derived_coefficients(const GreedFearDiffusionSpec& spec, double t, double x,
                                         bool include_Gr_term = false);

struct MonteCarloSettings {
    std::int64_t n_paths = 100000;
    int n_steps = 50;
    std::uint64_t seed = 1;
    bool antithetic = true;
    unsigned workers = 0;  ///< 0 picks hardware concurrency; results do not depend on it
};

struct MonteCarloResult {
    double price;
    double std_error;
};

/// Feynman–Kac estimate of e^{-∫r_inv} g(X_T) - ∫ e^{-∫r_inv} h ds with dX/X = R ds + σ dB,
/// log-Euler steps and trapezoid time integrals. Each path draws from its own stream keyed by
/// (seed, path index) and partial sums are combined in a fixed order, so the result is the same
/// for any worker count. With antithetic pairs the standard error is taken over pair averages.
MonteCarloResult price_fk_monte_carlo(const GreedFearDiffusionSpec& spec, const std::function<double(double)>& payoff,
                                      double t, double x, double T, const MonteCarloSettings& mc,
                                      bool include_Gr_term = false);

/// Standard normal cdf.
double norm_cdf(double x);

/// Black–Scholes call on a stock with continuous yield q.
double black_scholes_call(double S, double K, double tau, double r, double sigma, double q = 0.0);

/// Constant-coefficient greed–fear call, discounted at r(1+𝒢) with drift r - 𝒢(μ-r):
/// S e^{-𝒢μτ} Φ(D¹) - K e^{-r(1+𝒢)τ} Φ(D²) - h (1 - e^{-r(1+𝒢)τ}) / (r(1+𝒢)),
/// h = ((1+𝒢)μ - r)² 𝒢 / σ², D¹ = [ln(S/K) + (r - 𝒢(μ-r) + σ²/2)τ] / (σ√τ), D² = D¹ - σ√τ.
double price_call_closed_form(double S, double K, double t, double T, double r, double sigma, double mu, double G);

/// Running-reward deduction h (1 - e^{-r(1+𝒢)τ}) / (r(1+𝒢)) in the closed form.
double closed_form_reward_term(double tau, double r, double sigma, double mu, double G);

struct HedgeRatios {
    double a;  ///< stock units
    double b;  ///< bond units
};

/// a = σ f_x / σ^τ + 𝒢(μ^τ - r)/((σ^τ)² S); b solves a S + b β = f(1+𝒢), β = bond value at t.
HedgeRatios hedge_ratios(const GreedFearDiffusionSpec& spec, double t, double S, double f, double f_x, double beta);

/// Same with β = exp(∫₀ᵗ r(s, S) ds), the rate read along the current price.
HedgeRatios hedge_ratios(const GreedFearDiffusionSpec& spec, double t, double S, double f, double f_x);

}  // namespace greedfear
