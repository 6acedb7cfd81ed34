#include "greedfear/levy_pricing.hpp"

#include "greedfear/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace greedfear {

namespace {

constexpr double kTailMass = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

// Complex log-mgf ψ(z) = ln E e^{zL(1)}; ψ(iθ) is the log-cf.
Complex psi(const LevyModel& model, Complex z)
{
    if (const auto* l = std::get_if<LogisticLevy>(&model)) {
        return l->m * z + log_gamma(1.0 + l->rho * z) + log_gamma(1.0 - l->rho * z);
    }
    const auto& g = std::get<NegGumbelLevy>(model);
    return g.mu * z + log_gamma(1.0 + g.varrho * z);
}

double psi_real(const LevyModel& model, double h)
{
    if (const auto* l = std::get_if<LogisticLevy>(&model)) {
        return l->m * h + std::lgamma(1.0 + l->rho * h) + std::lgamma(1.0 - l->rho * h);
    }
    const auto& g = std::get<NegGumbelLevy>(model);
    return g.mu * h + std::lgamma(1.0 + g.varrho * h);
}

bool interior(const MgfDomain& d, double h) { return h > d.lo && h < d.hi; }

// Chernoff bounds: P(X > a) <= exp(Λ(s) - s a) for s > 0, P(X < a) <= exp(Λ(-s) + s a).
std::pair<double, double> chernoff_window(const std::function<double(double)>& cgf, double s_up, double s_down)
{
    const double log_eps = std::log(kTailMass);
    auto scan = [&](double s_max, int sign) {
        s_max = std::min(s_max, 1e4);
        double best = sign > 0 ? kInf : -kInf;
        constexpr int n = 400;
        for (int i = 0; i < n; ++i) {
            // Geometric grid from s_max·1e-6 up to 0.999·s_max.
            const double s = 0.999 * s_max * std::pow(1e-6, 1.0 - static_cast<double>(i) / (n - 1));
            const double lam = cgf(sign * s);
            if (!std::isfinite(lam)) continue;
            const double a = sign > 0 ? (lam - log_eps) / s : (log_eps - lam) / s;
            best = sign > 0 ? std::min(best, a) : std::max(best, a);
        }
        return best;
    };
    return {scan(s_down, -1), scan(s_up, 1)};
}

std::string describe_model(const LevyModel& model)
{
    std::ostringstream out;
    if (const auto* l = std::get_if<LogisticLevy>(&model)) {
        out << "logistic Levy (m = " << l->m << ", rho = " << l->rho << ")";
    } else {
        const auto& g = std::get<NegGumbelLevy>(model);
        out << "negative-Gumbel Levy (mu = " << g.mu << ", varrho = " << g.varrho << ")";
    }
    return out.str();
}

}  // namespace

LogisticLevy::LogisticLevy(double m_, double rho_) : m(m_), rho(rho_)
{
    require(std::isfinite(m) && rho > 0.0 && std::isfinite(rho), "logistic Levy model needs finite m and rho > 0");
}

NegGumbelLevy::NegGumbelLevy(double mu_, double varrho_) : mu(mu_), varrho(varrho_)
{
    require(std::isfinite(mu) && varrho > 0.0 && std::isfinite(varrho),
            "negative-Gumbel Levy model needs finite mu and varrho > 0");
}

LevyMarket::LevyMarket(LevyModel model_, double spot_, double rate_) : model(std::move(model_)), spot(spot_), rate(rate_)
{
    require(spot > 0.0 && std::isfinite(spot), "spot must be positive");
    require(rate > 0.0 && std::isfinite(rate), "riskless rate must be positive");
}

Call::Call(double k) : strike(k) { require(k > 0.0 && std::isfinite(k), "strike must be positive"); }

Put::Put(double k) : strike(k) { require(k > 0.0 && std::isfinite(k), "strike must be positive"); }

EuropeanClaim::EuropeanClaim(Payoff payoff_, double maturity_) : payoff(std::move(payoff_)), maturity(maturity_)
{
    require(maturity > 0.0 && std::isfinite(maturity), "maturity must be positive");
    if (const auto* c = std::get_if<Custom>(&payoff)) require(static_cast<bool>(c->g), "custom payoff is empty");
}

Complex logistic_levy_cf(double m, double rho, double t, double theta)
{
    require(t > 0.0, "time must be positive");
    const Complex i(0.0, 1.0);
    return std::exp(t * (i * m * theta + log_beta(Complex(1.0, rho * theta), Complex(1.0, -rho * theta))));
}

Complex levy_cf(const LevyModel& model, double t, double theta)
{
    require(t > 0.0, "time must be positive");
    if (const auto* l = std::get_if<LogisticLevy>(&model)) return logistic_levy_cf(l->m, l->rho, t, theta);
    return std::exp(t * psi(model, Complex(0.0, theta)));
}

MgfDomain levy_mgf_domain(const LevyModel& model)
{
    if (const auto* l = std::get_if<LogisticLevy>(&model)) return {-1.0 / l->rho, 1.0 / l->rho};
    return {-1.0 / std::get<NegGumbelLevy>(model).varrho, kInf};
}

double levy_log_mgf(const LevyModel& model, double h)
{
    const MgfDomain d = levy_mgf_domain(model);
    if (!interior(d, h)) {
        std::ostringstream msg;
        msg << describe_model(model) << " mgf is finite only for h in " << d.describe() << ", got h = " << h;
        throw DomainError(msg.str());
    }
    return psi_real(model, h);
}

double levy_mgf(const LevyModel& model, double t, double h)
{
    require(t > 0.0, "time must be positive");
    return std::exp(t * levy_log_mgf(model, h));
}

EsscherLaw::EsscherLaw(const LevyModel& model, double t, double h) : model_(model), t_(t), h_(h)
{
    require(t > 0.0 && std::isfinite(t), "time must be positive");
    const MgfDomain d = levy_mgf_domain(model);
    const double psi_h = levy_log_mgf(model, h);

    auto cgf_at = [&](double base) {
        const double psi_b = psi_real(model, base);
        return [this, base, psi_b](double s) { return t_ * (psi_real(model_, base + s) - psi_b); };
    };
    auto [lo, hi] = chernoff_window(cgf_at(h), d.hi - h, h - d.lo);
    // Widen for payoffs growing like e^x: e^x f_h is proportional to f_{h+1}.
    if (interior(d, h + 1.0)) {
        const auto [lo1, hi1] = chernoff_window(cgf_at(h + 1.0), d.hi - h - 1.0, h + 1.0 - d.lo);
        lo = std::min(lo, lo1);
        hi = std::max(hi, hi1);
    }
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw NumericError("could not bound the tails of the Esscher law");
    }
    lo_ = lo;
    hi_ = hi;

    const LevyModel m = model;
    CharFn phi = [m, t, h, psi_h](double theta) { return std::exp(t * (psi(m, Complex(h, theta)) - psi_h)); };
    density_ = std::make_unique<CfDensity>(phi, 0.5 * (lo_ + hi_), 0.5 * (hi_ - lo_));
    mass_ = mass_between(lo_, hi_);
}

double EsscherLaw::pdf(double x) const { return (*density_)(x); }

double EsscherLaw::log_mgf(double s) const { return t_ * (levy_log_mgf(model_, h_ + s) - psi_real(model_, h_)); }

double EsscherLaw::mass_between(double a, double b) const
{
    if (!(b > a)) return 0.0;
    QuadratureSettings qs;
    qs.abs_tol = 1e-14;
    qs.rel_tol = 1e-12;
    qs.max_subdivisions = 4000;
    return integrate([this](double x) { return pdf(x); }, a, b, qs);
}

double EsscherLaw::prob_above(double k) const
{
    if (k >= hi_) return 0.0;
    if (k <= lo_) return 1.0;
    return std::clamp(mass_between(k, hi_) / mass_, 0.0, 1.0);
}

double EsscherLaw::prob_below(double k) const
{
    if (k >= hi_) return 1.0;
    if (k <= lo_) return 0.0;
    return std::clamp(mass_between(lo_, k) / mass_, 0.0, 1.0);
}

double EsscherLaw::expectation(const std::function<double(double)>& g, std::vector<double> breaks) const
{
    breaks.push_back(lo_);
    breaks.push_back(hi_);
    std::sort(breaks.begin(), breaks.end());
    QuadratureSettings qs;
    qs.abs_tol = 1e-13;
    qs.rel_tol = 1e-12;
    qs.max_subdivisions = 4000;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(breaks[i], lo_), b = std::min(breaks[i + 1], hi_);
        if (b > a) sum += integrate([&](double x) { return g(x) * pdf(x); }, a, b, qs);
    }
    return sum / mass_;
}

std::shared_ptr<const EsscherLaw> EsscherLawCache::get(const LevyModel& model, double t, double h)
{
    const auto params = std::visit(
        [](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LogisticLevy>) return std::pair{m.m, m.rho};
            else return std::pair{m.mu, m.varrho};
        },
        model);
    const Key key{model.index(), params.first, params.second, t, h};
    {
        std::shared_lock lock(mutex_);
        if (auto it = laws_.find(key); it != laws_.end()) return it->second;
    }
    // Built outside the lock; a racing writer may build the same law, the first insert wins.
    auto law = std::make_shared<const EsscherLaw>(model, t, h);
    std::unique_lock lock(mutex_);
    return laws_.emplace(key, std::move(law)).first->second;
}

std::size_t EsscherLawCache::size() const
{
    std::shared_lock lock(mutex_);
    return laws_.size();
}

void EsscherLawCache::clear()
{
    std::unique_lock lock(mutex_);
    laws_.clear();
}

EsscherLawCache& default_esscher_cache()
{
    static EsscherLawCache cache;
    return cache;
}

double esscher_pdf(const LevyModel& model, double t, double h, double x)
{
    return default_esscher_cache().get(model, t, h)->pdf(x);
}

EsscherSolution solve_martingale_h(const LevyMarket& market)
{
    const auto* l = std::get_if<LogisticLevy>(&market.model);
    if (!l) throw ModelError("Esscher parameter is solved for the logistic Levy model only");
    if (!(l->rho < 1.0)) {
        std::ostringstream msg;
        msg << "logistic Levy model needs rho < 1 for an Esscher martingale measure, got rho = " << l->rho;
        throw ModelError(msg.str());
    }
    const double a = -1.0 / l->rho, b = 1.0 / l->rho - 1.0;
    const double r = market.rate;
    auto f = [&](double h) { return psi_real(market.model, h + 1.0) - psi_real(market.model, h) - r; };
    // ψ is convex with poles at both ends, so f runs from -inf to +inf; step in from the poles.
    const double pad = 1e-9 * (b - a);
    double h = 0.0;
    try {
        h = find_root(f, a + pad, b - pad, 1e-15);
    } catch (const BracketError& e) {
        throw ModelError(std::string("no Esscher parameter solves the martingale condition: ") + e.what());
    }
    const double residual = f(h);
    if (!(std::abs(residual) < 1e-10)) {
        std::ostringstream msg;
        msg << "Esscher root residual " << residual << " exceeds 1e-10";
        throw ModelError(msg.str());
    }
    return {h, residual, MgfDomain{a, b}};
}

double neggumbel_rn_location(double r, double varrho)
{
    require(varrho > 0.0, "varrho must be positive");
    return r - std::lgamma(1.0 + varrho);
}

namespace {

LevyQuote price_with(const LevyModel& model, double h, const LevyMarket& market, const EuropeanClaim& claim,
                     double parameter, EsscherLawCache& cache)
{
    const double T = claim.maturity;
    const double disc = std::exp(-market.rate * T);
    const double S0 = market.spot;
    const auto q = cache.get(model, T, h);

    double price = 0.0;
    if (const auto* c = std::get_if<Call>(&claim.payoff)) {
        const double k = std::log(c->strike / S0);
        const auto share = cache.get(model, T, h + 1.0);
        price = S0 * share->prob_above(k) - disc * c->strike * q->prob_above(k);
    } else if (const auto* p = std::get_if<Put>(&claim.payoff)) {
        const double k = std::log(p->strike / S0);
        const auto share = cache.get(model, T, h + 1.0);
        price = disc * p->strike * q->prob_below(k) - S0 * share->prob_below(k);
    } else {
        const auto& g = std::get<Custom>(claim.payoff).g;
        price = disc * q->expectation([&](double x) { return g(S0 * std::exp(x)); });
    }
    return {price, parameter, q->total_mass()};
}

}  // namespace

LevyQuote price_logistic(const LevyMarket& market, const EuropeanClaim& claim)
{
    return price_logistic(market, claim, default_esscher_cache());
}

LevyQuote price_logistic(const LevyMarket& market, const EuropeanClaim& claim, EsscherLawCache& cache)
{
    const auto* l = std::get_if<LogisticLevy>(&market.model);
    if (!l) throw ModelError("price_logistic needs a logistic Levy market");
    if (!(l->rho < 0.5)) {
        std::ostringstream msg;
        msg << "logistic Levy pricing needs rho < 1/2 so that h_q and h_q + 1 share the mgf strip, got rho = "
            << l->rho;
        throw ModelError(msg.str());
    }
    const EsscherSolution sol = solve_martingale_h(market);
    return price_with(market.model, sol.h_q, market, claim, sol.h_q, cache);
}

double price_call_logistic(const LevyMarket& market, double strike, double maturity)
{
    return price_logistic(market, EuropeanClaim(Call(strike), maturity)).price;
}

LevyQuote price_ecc_neggumbel(const LevyMarket& market, const EuropeanClaim& claim)
{
    return price_ecc_neggumbel(market, claim, default_esscher_cache());
}

LevyQuote price_ecc_neggumbel(const LevyMarket& market, const EuropeanClaim& claim, EsscherLawCache& cache)
{
    const auto* g = std::get_if<NegGumbelLevy>(&market.model);
    if (!g) throw ModelError("price_ecc_neggumbel needs a negative-Gumbel Levy market");
    const double mu_q = neggumbel_rn_location(market.rate, g->varrho);
    return price_with(NegGumbelLevy(mu_q, g->varrho), 0.0, market, claim, mu_q, cache);
}

}  // namespace greedfear
