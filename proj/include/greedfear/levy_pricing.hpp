#pragma once

#include "greedfear/distributions.hpp"
#include "greedfear/numerics.hpp"

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>
#include <variant>

namespace greedfear {

/// L(1) ~ Logistic(m, ρ)
struct LogisticLevy {
    double m;
    double rho;
    LogisticLevy(double m, double rho);
};

/// L(1) ~ NegGumbel(μ, ϱ)
struct NegGumbelLevy {
    double mu;
    double varrho;
    NegGumbelLevy(double mu, double varrho);
};

using LevyModel = std::variant<LogisticLevy, NegGumbelLevy>;

struct LevyMarket {
    LevyModel model;
    double spot;
    double rate;
    LevyMarket(LevyModel model, double spot, double rate);
};

struct Call {
    double strike;
    explicit Call(double strike);
};

struct Put {
    double strike;
    explicit Put(double strike);
};

/// Payoff g(S_T); g must grow at most linearly in S_T.
struct Custom {
    std::function<double(double)> g;
};

using Payoff = std::variant<Call, Put, Custom>;

struct EuropeanClaim {
    Payoff payoff;
    double maturity;
    EuropeanClaim(Payoff payoff, double maturity);
};

struct EsscherSolution {
    double h_q;
    double residual;  ///< ln M(h+1) - ln M(h) - r at h_q
    MgfDomain domain;
};

/// (e^{imθ} B(1+iρθ, 1-iρθ))^t
Complex logistic_levy_cf(double m, double rho, double t, double theta);

/// Characteristic function of L(t).
Complex levy_cf(const LevyModel& model, double t, double theta);

/// Interval of h where M(h) = E e^{hL(1)} is finite.
MgfDomain levy_mgf_domain(const LevyModel& model);

/// ln E e^{hL(1)}; throws DomainError naming the interval when h is outside it.
double levy_log_mgf(const LevyModel& model, double h);

/// E e^{hL(t)} = M(h)^t
double levy_mgf(const LevyModel& model, double t, double h);

/// Law of L(t) under the Esscher measure with parameter h, density e^{hx} M(h)^{-t} f_t(x).
/// The density comes from inverting the tilted cf e^{t(ψ(h+iθ) - ψ(h))}, with ψ the complex log-mgf,
/// on a window bounded by Chernoff estimates of the 1e-15 tail points. Immutable once built.
class EsscherLaw {
public:
    EsscherLaw(const LevyModel& model, double t, double h);

    double pdf(double x) const;
    /// Mass above k, normalized by the total recovered mass.
    double prob_above(double k) const;
    double prob_below(double k) const;
    /// Total mass recovered on [lower, upper]; 1 up to inversion error.
    double total_mass() const noexcept { return mass_; }
    /// Chernoff estimate of the cumulant generating function t(ψ(h+s) - ψ(h)).
    double log_mgf(double s) const;

    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }
    double t() const noexcept { return t_; }
    double h() const noexcept { return h_; }

    /// E[g(X)] over the window, split at the given interior points.
    double expectation(const std::function<double(double)>& g, std::vector<double> breaks = {}) const;

private:
    double mass_between(double a, double b) const;

    LevyModel model_;
    double t_;
    double h_;
    double lo_;
    double hi_;
    double mass_ = 1.0;
    std::unique_ptr<CfDensity> density_;
};

/// Thread-safe store of Esscher laws keyed by (model, t, h); concurrent readers, single writer.
class EsscherLawCache {
public:
    std::shared_ptr<const EsscherLaw> get(const LevyModel& model, double t, double h);
    std::size_t size() const;
    void clear();

private:
    using Key = std::tuple<std::size_t, double, double, double, double>;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const EsscherLaw>> laws_;
};

/// Process-wide cache used by the free pricing functions.
EsscherLawCache& default_esscher_cache();

/// e^{hx} M(h)^{-t} f_t(x), evaluated through the cached Esscher law.
double esscher_pdf(const LevyModel& model, double t, double h, double x);

/// Root h_q of ln M(h+1) - ln M(h) = r on (-1/ρ, 1/ρ - 1). Needs ρ < 1; throws ModelError otherwise
/// or when no root is found.
EsscherSolution solve_martingale_h(const LevyMarket& market);

/// μ_q = r - ln Γ(1+ϱ), the location that makes e^{-rt}S(t) a martingale.
double neggumbel_rn_location(double r, double varrho);

struct LevyQuote {
    double price;
    double parameter;  ///< h_q for the logistic model, μ_q for the negative-Gumbel model
    double mass;       ///< recovered risk-neutral mass, 1 up to inversion error
};

/// C(0) = S0 Q_{h+1}(L(T) > k) - e^{-rT} K Q_h(L(T) > k), k = ln(K/S0). Requires ρ < 1/2.
LevyQuote price_logistic(const LevyMarket& market, const EuropeanClaim& claim);
/// Same, drawing laws from the given cache instead of the process-wide one.
LevyQuote price_logistic(const LevyMarket& market, const EuropeanClaim& claim, EsscherLawCache& cache);
double price_call_logistic(const LevyMarket& market, double strike, double maturity);

/// e^{-rT} E g(S0 e^{L(T)}) with L(1) ~ NegGumbel(μ_q, ϱ); the market's μ is replaced by μ_q.
LevyQuote price_ecc_neggumbel(const LevyMarket& market, const EuropeanClaim& claim);
LevyQuote price_ecc_neggumbel(const LevyMarket& market, const EuropeanClaim& claim, EsscherLawCache& cache);

}  // namespace greedfear
