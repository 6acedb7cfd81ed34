#include "greedfear/binomial_pricing.hpp"

#include "greedfear/diffusion_pricing.hpp"
#include "greedfear/errors.hpp"

#include <cmath>
#include <sstream>

namespace greedfear {

namespace {

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

void check_fields(const GreedFearBinomialSpec& s)
{
    require(s.S0 > 0.0, "S0 must be positive");
    require(s.sigma >= 0.0, "sigma must be nonnegative");
    require(s.r > 0.0 && s.r < s.mu, "r must lie in (0, mu)");
    require(s.maturity > 0.0, "maturity must be positive");
    require(s.n_steps >= 1, "n_steps must be at least 1");
    require(std::isfinite(s.A), "A must be finite");
}

bool step_ok(const GreedFearBinomialSpec& s, int n)
{
    const double dt = s.maturity / n;
    const double sq = std::sqrt(dt);
    if (1.0 + s.mu * dt - s.sigma * sq <= 0.0) return false;
    if (s.sigma == 0.0) return true;
    return std::abs((s.mu + (s.mu - s.r) * s.A - s.r) / s.sigma) * sq < 1.0;
}

}  // namespace

double GreedFearBinomialSpec::up() const { return 1.0 + mu * dt() + sigma * std::sqrt(dt()); }
double GreedFearBinomialSpec::down() const { return 1.0 + mu * dt() - sigma * std::sqrt(dt()); }
double GreedFearBinomialSpec::theta() const { return (mu + implied_dividend_yield() - r) / sigma; }

int minimal_steps(const GreedFearBinomialSpec& spec)
{
    check_fields(spec);
    // Both conditions hold for all n past some point; double up to it, then bisect.
    int hi = 1;
    while (!step_ok(spec, hi)) {
        if (hi > (1 << 29)) throw ConfigurationError("no valid step count below 2^30");
        hi *= 2;
    }
    int lo = hi / 2;
    if (lo == 0 || step_ok(spec, lo)) return lo == 0 ? 1 : lo;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (step_ok(spec, mid) ? hi : lo) = mid;
    }
    return hi;
}

void validate(const GreedFearBinomialSpec& spec)
{
    check_fields(spec);
    if (!step_ok(spec, spec.n_steps)) {
        std::ostringstream msg;
        msg << "n_steps = " << spec.n_steps
            << " gives a nonpositive down factor or branch weights outside (0, 1); use n_steps >= "
            << minimal_steps(spec);
        throw ConfigurationError(msg.str());
    }
}

BinomialLattice build_tree(const GreedFearBinomialSpec& spec)
{
    validate(spec);
    const double lu = std::log(spec.up());
    const double ld = std::log(spec.down());
    std::vector<Eigen::ArrayXd> levels;
    levels.reserve(static_cast<std::size_t>(spec.n_steps) + 1);
    for (int k = 0; k <= spec.n_steps; ++k) {
        const Eigen::ArrayXd j = Eigen::ArrayXd::LinSpaced(k + 1, 0.0, k);
        levels.emplace_back(spec.S0 * (j * lu + (k - j) * ld).exp());
    }
    return BinomialLattice(std::move(levels));
}

BranchWeights branch_weights(const GreedFearBinomialSpec& spec)
{
    validate(spec);
    require(spec.sigma > 0.0, "branch weights need sigma > 0");
    const double half_spread = 0.5 * spec.theta() * std::sqrt(spec.dt());
    return {0.5 - half_spread, 0.5 + half_spread};
}

double node_greed_fear(double A, double sigma, double C_up, double C_dn, double dt)
{
    return A * sigma * (C_up - C_dn) * std::sqrt(dt);
}

double hedge_ratio_node(double C_up, double C_dn, double S_up, double S_dn, double G_node)
{
    const double spread = S_up - S_dn;
    if (spread == 0.0) throw ConfigurationError("degenerate tree: up and down prices coincide");
    return (C_up - C_dn) / spread + G_node * (S_up + S_dn) / (spread * spread);
}

double price_binomial(const GreedFearBinomialSpec& spec, const std::function<double(double)>& payoff)
{
    const auto w = branch_weights(spec);
    const int n = spec.n_steps;
    const double disc = std::exp(-spec.r * spec.dt());
    const Eigen::ArrayXd j = Eigen::ArrayXd::LinSpaced(n + 1, 0.0, n);
    const Eigen::ArrayXd terminal = spec.S0 * (j * std::log(spec.up()) + (n - j) * std::log(spec.down())).exp();

    Eigen::ArrayXd value = terminal.unaryExpr(payoff);
    Eigen::ArrayXd next(n + 1);
    for (int k = n - 1; k >= 0; --k) {
        next.head(k + 1) = disc * (w.up * value.segment(1, k + 1) + w.down * value.head(k + 1));
        value.swap(next);
    }
    return value(0);
}

double price_closed_form_dividend(double S, double K, double t, double T, double r, double sigma, double D_y)
{
    require(T > t, "maturity must exceed the valuation time");
    require(r > 0.0, "r must be positive");
    return black_scholes_call(S, K, T - t, r, sigma, D_y);
}

double price_put_closed_form_dividend(double S, double K, double t, double T, double r, double sigma, double D_y)
{
    require(T > t, "maturity must exceed the valuation time");
    require(r > 0.0, "r must be positive");
    const double tau = T - t;
    const double sd = sigma * std::sqrt(tau);
    require(S > 0.0 && K > 0.0 && sigma > 0.0, "spot, strike and sigma must be positive");
    const double d1 = (std::log(S / K) + (r - D_y + 0.5 * sigma * sigma) * tau) / sd;
    return K * std::exp(-r * tau) * norm_cdf(sd - d1) - S * std::exp(-D_y * tau) * norm_cdf(-d1);
}

}  // namespace greedfear
