#include "greedfear/diffusion_pricing.hpp"

#include "greedfear/errors.hpp"
#include "greedfear/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

namespace greedfear {

namespace {

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

double checked(const Coefficient& c, const char* name, double t, double x)
{
    const double v = c(t, x);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "coefficient " << name << " is not finite at (t = " << t << ", x = " << x << ")";
        throw NumericError(msg.str());
    }
    return v;
}

// SplitMix64: a counter-keyed stream per path so results do not depend on scheduling.
struct SplitMix64 {
    using result_type = std::uint64_t;
    std::uint64_t state;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()()
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index)
{
    SplitMix64 mixer{seed};
    const std::uint64_t a = mixer();
    SplitMix64 keyed{a ^ (index * 0xD1342543DE82EF95ull)};
    keyed();
    return keyed;
}

struct Moments {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0) return;
        const std::int64_t total = n + o.n;
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        n = total;
    }
};

}  // namespace

GreedFearDiffusionSpec GreedFearDiffusionSpec::constant(double mu, double sigma, double r, double G)
{
    require(sigma > 0.0, "sigma must be positive");
    require(r > 0.0, "r must be positive");
    require(G > -1.0, "greed-fear functional must exceed -1");
    auto k = [](double v) { return [v](double, double) { return v; }; };
    return {k(mu), k(sigma), k((1.0 + G) * mu), k(sigma), k(r), k(G)};
}

DerivedCoefficients derived_coefficients(const GreedFearDiffusionSpec& spec, double t, double x, bool include_Gr_term)
{
    require(x > 0.0, "price must be positive");
    const double mu = checked(spec.mu, "mu", t, x);
    const double sigma = checked(spec.sigma, "sigma", t, x);
    const double mu_tau = checked(spec.mu_tau, "mu_tau", t, x);
    const double sigma_tau = checked(spec.sigma_tau, "sigma_tau", t, x);
    const double r = checked(spec.r, "r", t, x);
    const double G = checked(spec.G, "G", t, x);
    require(sigma > 0.0, "sigma must be positive");
    require(sigma_tau > 0.0, "sigma_tau must be positive");
    require(G > -1.0, "greed-fear functional must exceed -1");

    DerivedCoefficients c{};
    c.r_invest = r * (1.0 + G);
    c.sharpe = (mu - r) / sigma;
    c.sharpe_tau = (mu_tau - r) / sigma_tau;
    c.div_yield = (c.sharpe_tau * sigma_tau * sigma_tau - c.sharpe * sigma * sigma) / sigma;
    if (include_Gr_term) c.div_yield += G * r;
    c.drift_R = c.r_invest - c.div_yield;
    c.reward_h = c.sharpe_tau * c.sharpe_tau * G;
    return c;
}

MonteCarloResult price_fk_monte_carlo(const GreedFearDiffusionSpec& spec, const std::function<double(double)>& payoff,
                                      double t, double x, double T, const MonteCarloSettings& mc, bool include_Gr_term)
{
    require(T > t, "maturity must exceed the valuation time");
    require(x > 0.0, "price must be positive");
    require(mc.n_paths >= 1 && mc.n_steps >= 1, "Monte Carlo needs n_paths >= 1 and n_steps >= 1");

    const int n = mc.n_steps;
    const double dt = (T - t) / n;
    const double sqdt = std::sqrt(dt);
    const std::int64_t samples = mc.antithetic ? (mc.n_paths + 1) / 2 : mc.n_paths;

    // One path given its normals; sign flips them for the antithetic partner.
    auto run_path = [&](const std::vector<double>& z, double sign) {
        double logx = std::log(x);
        double X = x;
        auto c = derived_coefficients(spec, t, X, include_Gr_term);
        double integral_r = 0.0;
        double reward = 0.0;
        double disc_h = c.reward_h;
        for (int k = 0; k < n; ++k) {
            const double s = t + k * dt;
            const double sig = checked(spec.sigma, "sigma", s, X);
            logx += (c.drift_R - 0.5 * sig * sig) * dt + sig * sqdt * sign * z[k];
            X = std::exp(logx);
            if (!std::isfinite(X) || X <= 0.0) {
                std::ostringstream msg;
                msg << "price path left (0, inf) at t = " << s + dt << " (drift_R = " << c.drift_R
                    << ", sigma = " << sig << ")";
                throw NumericError(msg.str());
            }
            const auto next = derived_coefficients(spec, s + dt, X, include_Gr_term);
            const double r_prev = c.r_invest;
            integral_r += 0.5 * (r_prev + next.r_invest) * dt;
            const double disc_h_next = std::exp(-integral_r) * next.reward_h;
            reward += 0.5 * (disc_h + disc_h_next) * dt;
            disc_h = disc_h_next;
            c = next;
        }
        const double g = payoff(X);
        if (!std::isfinite(g)) throw NumericError("payoff is not finite at the terminal price");
        return std::exp(-integral_r) * g - reward;
    };

    constexpr std::int64_t chunk = 1024;
    const std::int64_t n_chunks = (samples + chunk - 1) / chunk;
    std::vector<Moments> partial(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> next_chunk{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        std::vector<double> z(static_cast<std::size_t>(n));
        std::normal_distribution<double> normal;
        try {
            for (std::int64_t ci = next_chunk++; ci < n_chunks; ci = next_chunk++) {
                Moments m;
                const std::int64_t end = std::min(samples, (ci + 1) * chunk);
                for (std::int64_t i = ci * chunk; i < end; ++i) {
                    auto rng = stream_for(mc.seed, static_cast<std::uint64_t>(i));
                    normal.reset();
                    for (auto& v : z) v = normal(rng);
                    const double v = mc.antithetic ? 0.5 * (run_path(z, 1.0) + run_path(z, -1.0)) : run_path(z, 1.0);
                    m.add(v);
                }
                partial[static_cast<std::size_t>(ci)] = m;
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next_chunk = n_chunks;
        }
    };

    unsigned workers = mc.workers ? mc.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n_chunks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Moments total;
    for (const auto& m : partial) total.merge(m);
    const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    return {total.mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(total.n))};
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double black_scholes_call(double S, double K, double tau, double r, double sigma, double q)
{
    require(S > 0.0 && K > 0.0, "spot and strike must be positive");
    require(tau > 0.0, "time to maturity must be positive");
    require(sigma > 0.0, "sigma must be positive");
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(S / K) + (r - q + 0.5 * sigma * sigma) * tau) / sd;
    return S * std::exp(-q * tau) * norm_cdf(d1) - K * std::exp(-r * tau) * norm_cdf(d1 - sd);
}

double closed_form_reward_term(double tau, double r, double sigma, double mu, double G)
{
    const double h = std::pow((1.0 + G) * mu - r, 2) * G / (sigma * sigma);
    const double rate = r * (1.0 + G);
    return h * -std::expm1(-rate * tau) / rate;
}

double price_call_closed_form(double S, double K, double t, double T, double r, double sigma, double mu, double G)
{
    require(T > t, "maturity must exceed the valuation time");
    require(r > 0.0, "r must be positive");
    require(G > -1.0, "greed-fear functional must exceed -1");
    const double tau = T - t;
    // Dividend-yield form with q = 𝒢(μ - r), then the extra e^{-𝒢rτ} from discounting at r(1+𝒢).
    const double base = black_scholes_call(S, K, tau, r, sigma, G * (mu - r));
    return std::exp(-G * r * tau) * base - closed_form_reward_term(tau, r, sigma, mu, G);
}

HedgeRatios hedge_ratios(const GreedFearDiffusionSpec& spec, double t, double S, double f, double f_x, double beta)
{
    require(S > 0.0, "price must be positive");
    require(beta > 0.0, "bond value must be positive");
    const double sigma = checked(spec.sigma, "sigma", t, S);
    const double sigma_tau = checked(spec.sigma_tau, "sigma_tau", t, S);
    const double mu_tau = checked(spec.mu_tau, "mu_tau", t, S);
    const double r = checked(spec.r, "r", t, S);
    const double G = checked(spec.G, "G", t, S);
    require(sigma_tau > 0.0, "sigma_tau must be positive");
    const double a = sigma * f_x / sigma_tau + G * (mu_tau - r) / (sigma_tau * sigma_tau * S);
    const double b = (f * (1.0 + G) - a * S) / beta;
    return {a, b};
}

HedgeRatios hedge_ratios(const GreedFearDiffusionSpec& spec, double t, double S, double f, double f_x)
{
    require(t >= 0.0, "time must be nonnegative");
    const double accrued =
        t == 0.0 ? 0.0 : integrate([&](double s) { return checked(spec.r, "r", s, S); }, 0.0, t);
    return hedge_ratios(spec, t, S, f, f_x, std::exp(accrued));
}

}  // namespace greedfear
