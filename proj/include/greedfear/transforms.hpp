#pragma once

#include "greedfear/distributions.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace greedfear {

// Value functions

/// v(x) = x^α for x >= 0, -λ(-x)^β for x < 0.
struct TkValue {
    double alpha;
    double beta;
    double lambda;
    TkValue(double alpha, double beta, double lambda);
};

/// w(x) = a ln x + c for x > 0, -λ ln(-x) - ν for x < 0. At x = 0 the result is -inf.
struct LogFormValue {
    double a;
    double c;
    double lambda;
    double nu;
    LogFormValue(double a, double c, double lambda, double nu);
};

/// x ↦ quantile(post, cdf(prior, x)); closed_form is set when the pair has a known shortcut.
struct ComposedValue {
    DistributionSpec prior;
    DistributionSpec post;
    std::function<double(double)> closed_form;
    std::string form = "generic";

    double eval_generic(double x) const;
};

using ValueFunction = std::variant<TkValue, LogFormValue, ComposedValue>;

double eval_value_function(const ValueFunction& vf, double x);

/// Composition that carries the posterior law `post` back to the prior `prior`.
ValueFunction value_function_from_cdfs(const DistributionSpec& prior, const DistributionSpec& post);

struct LogFormFit {
    double a;
    double c;
};

/// Log-form coefficients matching x^α in value and slope at x = 1/2.
LogFormFit fit_logform_to_tk(double alpha);

/// Characteristic function of the log-form posterior built on a Laplace(0, b) prior:
/// e^{iθ(c + ν + (a - λ) ln b)} Γ(1 + iaθ) Γ(1 - iλθ). With a = λ this is Logistic(c + ν, a).
Complex logform_cf(const LogFormValue& lf, double b, double theta);

// Weighting functions

/// w(u) = u^γ / (u^γ + (1-u)^γ)^{1/γ}
struct TkWeighting {
    double gamma;
    explicit TkWeighting(double gamma);
};

/// w(u) = a u^γ / (a u^γ + (1-u)^γ)
struct GoldsteinEinhorn {
    double gamma;
    double a;
    GoldsteinEinhorn(double gamma, double a);
};

/// w(u) = exp(-(-δ ln u)^ρ)
struct Prelec {
    double delta;
    double rho;
    Prelec(double delta, double rho);
};

/// W(u) = 1 - exp(-(-δ ln(1-u))^ρ)
struct ModifiedPrelec {
    double delta;
    double rho;
    ModifiedPrelec(double delta, double rho);
};

/// w(u) = exp(-(η/γ)(1 - u^γ)); note w(0+) = e^{-η/γ} > 0.
struct PrelecExpPower {
    double gamma;
    double eta;
    PrelecExpPower(double gamma, double eta);
};

/// w(u) = (1 - γ ln u)^{-η/γ}
struct PrelecHyperLog {
    double gamma;
    double eta;
    PrelecHyperLog(double gamma, double eta);
};

/// w(u) = exp(-β((1-u)/u)^α)
struct Luce {
    double alpha;
    double beta;
    Luce(double alpha, double beta);
};

/// u ↦ cdf(post, quantile(prior, u)); closed_form is set when the pair has a known shortcut.
struct ComposedWeighting {
    DistributionSpec prior;
    DistributionSpec post;
    std::function<double(double)> closed_form;
    std::string form = "generic";

    double eval_generic(double u) const;
};

using WeightingFunction = std::variant<TkWeighting, GoldsteinEinhorn, Prelec, ModifiedPrelec, PrelecExpPower,
                                       PrelecHyperLog, Luce, ComposedWeighting>;

/// Throws DomainError unless 0 < u < 1.
double eval_wpf(const WeightingFunction& w, double u);

/// Solves w(u) = v for u by bracketed root finding; v is clamped to the attainable range.
double wpf_inverse(const WeightingFunction& w, double v);

/// Weighting function solving cdf(post) = w ∘ cdf(prior). Gumbel→Gumbel returns Prelec and
/// NegGumbel→NegGumbel returns ModifiedPrelec; other pairs return ComposedWeighting.
WeightingFunction wpf_from_cdfs(const DistributionSpec& prior, const DistributionSpec& post);

std::string wpf_name(const WeightingFunction& w);
std::string value_function_name(const ValueFunction& vf);

// Penalized cdfs and posterior statistics

/// x ↦ w(cdf(prior, x)), with the limits 0 and 1 outside the open unit interval.
class PenalizedCdf {
public:
    PenalizedCdf(WeightingFunction w, DistributionSpec prior);

    double operator()(double x) const;
    /// Quantile of the penalized law: prior quantile of w^{-1}(u).
    double quantile(double u) const;

    const WeightingFunction& weighting() const noexcept { return w_; }
    const DistributionSpec& prior() const noexcept { return prior_; }

private:
    WeightingFunction w_;
    DistributionSpec prior_;
};

PenalizedCdf penalized_cdf(const WeightingFunction& w, const DistributionSpec& prior);

struct PosteriorStats {
    double mean;
    double variance;
    double std;
    std::optional<double> information_ratio;  ///< mean / std, absent when std == 0
};

struct SupportHint {
    double lo;
    double hi;
};

/// Mean and variance from tail integrals E X = ∫_0^∞ (1-F) - ∫_{-∞}^0 F and
/// E X² = 2∫_0^∞ x(1-F) + 2∫_{-∞}^0 |x| F. The hint is widened until both tails hold < 1e-12.
/// Throws NumericError when a tail never gets that thin.
PosteriorStats posterior_stats(const std::function<double(double)>& cdf, SupportHint hint);

struct NegGumbelPosterior {
    double mu;
    double rho;
    double ir_shift;  ///< IR(posterior) - IR(prior) from the negative-Gumbel moment formulas
};

/// Negative-Gumbel law reached by applying ModifiedPrelec{δ, ρ} to NegGumbel{μ, ϱ}.
NegGumbelPosterior mpwpf_posterior(double mu, double varrho, double delta, double rho);

/// Information ratio mean/std of NegGumbel{μ, ϱ}.
double neggumbel_information_ratio(double mu, double varrho);

enum class Disposition { fearful, greedy, neutral, mixed };

std::string to_string(Disposition d);

/// Sign pattern of the second difference of w on u = i/200, i = 1..199. Concave then convex is
/// fearful, convex then concave is greedy, |w''| < 1e-9 everywhere is neutral, anything else mixed.
Disposition classify_disposition(const WeightingFunction& w);

/// True iff cdf(a, x) <= cdf(b, x) + 1e-12 on an even grid spanning both laws' 1e-6..1-1e-6
/// quantile ranges. Throws DomainError for fewer than 100 grid points.
bool fosd_check(const DistributionSpec& a, const DistributionSpec& b, int grid_points = 1000);

}  // namespace greedfear
