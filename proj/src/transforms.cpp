#include "greedfear/transforms.hpp"

#include "greedfear/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace greedfear {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

const double sqrt2 = std::sqrt(2.0);

std::function<double(double)> closed_wpf(const DistributionSpec& prior, const DistributionSpec& post,
                                         std::string& form)
{
    if (auto* p = std::get_if<Logistic>(&prior)) {
        const double mu = p->m, rho = p->rho;
        if (auto* q = std::get_if<Logistic>(&post)) {
            const double c = std::exp(-(mu - q->m) / q->rho), b = rho / q->rho;
            form = "logistic_logistic";
            return [c, b](double u) { return 1.0 / (1.0 + c * std::pow((1.0 - u) / u, b)); };
        }
        if (auto* q = std::get_if<Gumbel>(&post)) {
            const double c = std::exp(-(mu - q->mu) / q->rho), b = rho / q->rho;
            form = "logistic_gumbel";
            return [c, b](double u) { return std::exp(-c * std::pow((1.0 - u) / u, b)); };
        }
    }
    if (auto* p = std::get_if<DoublePareto>(&prior)) {
        const double rho = p->rho;
        if (auto* q = std::get_if<DoublePareto>(&post)) {
            const double g = (1.0 - q->rho) / (1.0 - rho);
            form = "double_pareto_double_pareto";
            return [g](double u) {
                return u < 0.5 ? 0.5 * std::pow(2.0 * u, g) : 1.0 - 0.5 * std::pow(2.0 * (1.0 - u), g);
            };
        }
        if (auto* q = std::get_if<Laplace>(&post); q && q->m == 0.0) {
            const double e = 1.0 / (1.0 - rho), b = q->b;
            form = "double_pareto_laplace";
            return [e, b](double u) {
                if (u < 0.5) return 0.5 * std::exp((1.0 - std::pow(2.0 * u, e)) / b);
                return 1.0 - 0.5 * std::exp((1.0 - std::pow(2.0 * (1.0 - u), e)) / b);
            };
        }
    }
    if (auto* p = std::get_if<Cauchy>(&prior)) {
        const double c = p->c;
        if (auto* q = std::get_if<Cauchy>(&post)) {
            const double r = c / q->c;
            form = "cauchy_cauchy";
            return [r](double u) {
                return 0.5 + std::atan(r * std::tan(constants::pi * u - constants::pi / 2)) / constants::pi;
            };
        }
        if (auto* q = std::get_if<Gumbel>(&post)) {
            const double mu2 = q->mu, rho2 = q->rho;
            form = "cauchy_gumbel";
            return [c, mu2, rho2](double u) {
                return std::exp(-std::exp(-(c * std::tan(constants::pi * u - constants::pi / 2) - mu2) / rho2));
            };
        }
    }
    if (auto* p = std::get_if<Laplace>(&prior)) {
        if (auto* q = std::get_if<Laplace>(&post); q && q->m == p->m) {
            const double e = p->b / q->b;
            form = "laplace_laplace";
            return [e](double u) {
                return u < 0.5 ? 0.5 * std::pow(2.0 * u, e) : 1.0 - 0.5 * std::pow(2.0 - 2.0 * u, e);
            };
        }
    }
    if (auto* p = std::get_if<Gaussian>(&prior)) {
        const double mu = p->mu, s = p->sigma;
        if (auto* q = std::get_if<Gaussian>(&post)) {
            const double mu2 = q->mu, s2 = q->sigma;
            form = "gaussian_gaussian";
            return [mu, s, mu2, s2](double u) {
                return 0.5 * erfc((mu2 - mu + sqrt2 * s * erfc_inv(2.0 * u)) / (sqrt2 * s2));
            };
        }
        if (auto* q = std::get_if<NegGumbel>(&post)) {
            const double mu2 = q->mu, rho2 = q->rho;
            form = "gaussian_neg_gumbel";
            return [mu, s, mu2, rho2](double u) {
                return -std::expm1(-std::exp((mu - mu2 - sqrt2 * s * erfc_inv(2.0 * u)) / rho2));
            };
        }
        if (auto* q = std::get_if<Logistic>(&post)) {
            const double m2 = q->m, rho2 = q->rho;
            form = "gaussian_logistic";
            return [mu, s, m2, rho2](double u) {
                return 1.0 / (1.0 + std::exp((m2 - mu + sqrt2 * s * erfc_inv(2.0 * u)) / rho2));
            };
        }
    }
    return {};
}

std::function<double(double)> closed_value(const DistributionSpec& prior, const DistributionSpec& post,
                                           std::string& form)
{
    if (auto* p = std::get_if<Laplace>(&prior)) {
        const double m = p->m, b = p->b;
        if (auto* q = std::get_if<Gaussian>(&post)) {
            const double mu = q->mu, s = q->sigma;
            form = "laplace_gaussian";
            return [m, b, mu, s](double x) {
                const double d = x - m;
                const double z = sqrt2 * s * erfc_inv(std::exp(-std::abs(d) / b));
                return d >= 0.0 ? mu + z : mu - z;
            };
        }
        if (auto* q = std::get_if<DoublePareto>(&post)) {
            const double k = 1.0 / ((q->rho - 1.0) * b);
            form = "laplace_double_pareto";
            return [m, k](double x) {
                const double d = x - m;
                const double y = std::expm1(std::abs(d) * k);
                return d >= 0.0 ? y : -y;
            };
        }
    }
    if (auto* p = std::get_if<DoublePareto>(&prior)) {
        const double rho = p->rho;
        if (auto* q = std::get_if<Laplace>(&post)) {
            const double m = q->m, k = q->b * (rho - 1.0);
            form = "double_pareto_laplace";
            return [m, k](double x) {
                const double y = k * std::log1p(std::abs(x));
                return x >= 0.0 ? m + y : m - y;
            };
        }
        if (auto* q = std::get_if<DoublePareto>(&post)) {
            const double e = (1.0 - rho) / (1.0 - q->rho);
            form = "double_pareto_double_pareto";
            return [e](double x) {
                const double y = std::expm1(e * std::log1p(std::abs(x)));
                return x >= 0.0 ? y : -y;
            };
        }
    }
    return {};
}

}  // namespace

TkValue::TkValue(double alpha_, double beta_, double lambda_) : alpha(alpha_), beta(beta_), lambda(lambda_)
{
    require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0 && lambda > 1.0,
            "tk value function needs alpha, beta in (0, 1) and lambda > 1");
}

LogFormValue::LogFormValue(double a_, double c_, double lambda_, double nu_) : a(a_), c(c_), lambda(lambda_), nu(nu_)
{
    require(a > 0.0 && lambda > 0.0 && std::isfinite(c) && std::isfinite(nu),
            "log-form value function needs a, lambda > 0 and finite c, nu");
}

double ComposedValue::eval_generic(double x) const
{
    const double u = cdf(prior, x);
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "x = " << x << " lies outside the interior of the prior support";
        throw DomainError(msg.str());
    }
    return quantile(post, u);
}

double eval_value_function(const ValueFunction& vf, double x)
{
    return std::visit(overloaded{
                          [x](const TkValue& v) {
                              return x >= 0.0 ? std::pow(x, v.alpha) : -v.lambda * std::pow(-x, v.beta);
                          },
                          [x](const LogFormValue& v) {
                              if (x > 0.0) return v.a * std::log(x) + v.c;
                              if (x < 0.0) return -v.lambda * std::log(-x) - v.nu;
                              return -std::numeric_limits<double>::infinity();
                          },
                          [x](const ComposedValue& v) { return v.closed_form ? v.closed_form(x) : v.eval_generic(x); },
                      },
                      vf);
}

ValueFunction value_function_from_cdfs(const DistributionSpec& prior, const DistributionSpec& post)
{
    ComposedValue out{prior, post, {}, "generic"};
    out.closed_form = closed_value(prior, post, out.form);
    return out;
}

LogFormFit fit_logform_to_tk(double alpha)
{
    require(alpha > 0.0 && alpha <= 1.0, "fit_logform_to_tk needs alpha in (0, 1]");
    const double s = std::pow(2.0, -alpha);
    return {alpha * s, s * (1.0 + alpha * std::log(2.0))};
}

Complex logform_cf(const LogFormValue& lf, double b, double theta)
{
    require(b > 0.0, "log-form cf needs a Laplace scale b > 0");
    const Complex i(0.0, 1.0);
    const double shift = lf.c + lf.nu + (lf.a - lf.lambda) * std::log(b);
    return std::exp(i * theta * shift + log_gamma(Complex(1.0, lf.a * theta)) +
                    log_gamma(Complex(1.0, -lf.lambda * theta)));
}

TkWeighting::TkWeighting(double g) : gamma(g) { require(gamma > 0.0, "tk weighting needs gamma > 0"); }

GoldsteinEinhorn::GoldsteinEinhorn(double g, double a_) : gamma(g), a(a_)
{
    require(gamma > 0.0 && a > 1.0, "goldstein_einhorn needs gamma > 0 and a > 1");
}

Prelec::Prelec(double d, double r) : delta(d), rho(r) { require(delta > 0.0 && rho > 0.0, "prelec needs delta, rho > 0"); }

ModifiedPrelec::ModifiedPrelec(double d, double r) : delta(d), rho(r)
{
    require(delta > 0.0 && rho > 0.0, "modified_prelec needs delta, rho > 0");
}

PrelecExpPower::PrelecExpPower(double g, double e) : gamma(g), eta(e)
{
    require(gamma > 0.0 && eta > 0.0, "prelec_exp_power needs gamma, eta > 0");
}

PrelecHyperLog::PrelecHyperLog(double g, double e) : gamma(g), eta(e)
{
    require(gamma > 0.0 && eta > 0.0, "prelec_hyper_log needs gamma, eta > 0");
}

Luce::Luce(double a, double b) : alpha(a), beta(b) { require(alpha > 0.0 && beta > 0.0, "luce needs alpha, beta > 0"); }

double ComposedWeighting::eval_generic(double u) const { return cdf(post, quantile(prior, u)); }

namespace {

// w at u given s = 1 - u and both logarithms, so either tail keeps its digits.
double eval_wpf_logs(const WeightingFunction& w, double u, double s, double log_u, double log_s)
{
    return std::visit(overloaded{
                          [&](const TkWeighting& f) {
                              const double a = std::pow(u, f.gamma), b = std::pow(s, f.gamma);
                              return a / std::pow(a + b, 1.0 / f.gamma);
                          },
                          [&](const GoldsteinEinhorn& f) {
                              const double a = f.a * std::pow(u, f.gamma);
                              return a / (a + std::pow(s, f.gamma));
                          },
                          [&](const Prelec& f) { return std::exp(-std::pow(-f.delta * log_u, f.rho)); },
                          [&](const ModifiedPrelec& f) { return -std::expm1(-std::pow(-f.delta * log_s, f.rho)); },
                          [&](const PrelecExpPower& f) { return std::exp(f.eta / f.gamma * std::expm1(f.gamma * log_u)); },
                          [&](const PrelecHyperLog& f) { return std::pow(1.0 - f.gamma * log_u, -f.eta / f.gamma); },
                          [&](const Luce& f) { return std::exp(-f.beta * std::pow(s / u, f.alpha)); },
                          [&](const ComposedWeighting& f) {
                              if (u <= 0.0 || s <= 0.0) return u <= 0.0 ? 0.0 : 1.0;
                              return f.closed_form ? f.closed_form(u) : f.eval_generic(u);
                          },
                      },
                      w);
}

double eval_wpf_pair(const WeightingFunction& w, double u, double s)
{
    const double log_u = u < 0.5 ? std::log(u) : std::log1p(-s);
    const double log_s = s < 0.5 ? std::log(s) : std::log1p(-u);
    return eval_wpf_logs(w, u, s, log_u, log_s);
}

}  // namespace

double eval_wpf(const WeightingFunction& w, double u)
{
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "weighting functions take u in (0, 1), got u = " << u;
        throw DomainError(msg.str());
    }
    return eval_wpf_pair(w, u, 1.0 - u);
}

double wpf_inverse(const WeightingFunction& w, double v)
{
    // Logit coordinates resolve both ends of (0, 1); the residual is taken on a log scale
    // so that targets near 0 or 1 are matched in relative terms.
    auto to_u = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
    const double t_lo = -700.0, t_hi = 36.0;
    const double v_lo = eval_wpf(w, to_u(t_lo)), v_hi = eval_wpf(w, to_u(t_hi));
    if (v <= v_lo) return to_u(t_lo);
    if (v >= v_hi) return to_u(t_hi);
    const bool lower = v < 0.5;
    const double target = lower ? std::log(v) : std::log1p(-v);
    const double t = find_root(
        [&](double x) {
            const double y = eval_wpf(w, to_u(x));
            // Clamp so that an underflowed w still gives a finite, correctly signed residual.
            return lower ? std::max(std::log(y), -800.0) - target : target - std::max(std::log1p(-y), -800.0);
        },
        t_lo, t_hi, 1e-14);
    return to_u(t);
}

WeightingFunction wpf_from_cdfs(const DistributionSpec& prior, const DistributionSpec& post)
{
    if (auto* p = std::get_if<Gumbel>(&prior)) {
        if (auto* q = std::get_if<Gumbel>(&post)) return Prelec(std::exp((q->mu - p->mu) / p->rho), p->rho / q->rho);
    }
    if (auto* p = std::get_if<NegGumbel>(&prior)) {
        if (auto* q = std::get_if<NegGumbel>(&post))
            return ModifiedPrelec(std::exp((p->mu - q->mu) / p->rho), p->rho / q->rho);
    }
    ComposedWeighting out{prior, post, {}, "generic"};
    out.closed_form = closed_wpf(prior, post, out.form);
    return out;
}

std::string wpf_name(const WeightingFunction& w)
{
    static const char* names[] = {"tk",        "goldstein_einhorn", "prelec", "modified_prelec", "prelec_exp_power",
                                  "prelec_hyper_log", "luce",       "composed"};
    return names[w.index()];
}

std::string value_function_name(const ValueFunction& vf)
{
    static const char* names[] = {"tk", "logform", "composed"};
    return names[vf.index()];
}

PenalizedCdf::PenalizedCdf(WeightingFunction w, DistributionSpec prior) : w_(std::move(w)), prior_(std::move(prior)) {}

double PenalizedCdf::operator()(double x) const
{
    const double u = cdf(prior_, x);
    const double s = sf(prior_, x);
    const double log_u = u < 0.5 ? log_cdf(prior_, x) : std::log1p(-s);
    const double log_s = s < 0.5 ? log_sf(prior_, x) : std::log1p(-u);
    if (!(log_u > -INFINITY)) return 0.0;
    if (!(log_s > -INFINITY)) return 1.0;
    return eval_wpf_logs(w_, u, s, log_u, log_s);
}

double PenalizedCdf::quantile(double u) const
{
    require(u > 0.0 && u < 1.0, "penalized quantile needs u in (0, 1)");
    return greedfear::quantile(prior_, wpf_inverse(w_, u));
}

PenalizedCdf penalized_cdf(const WeightingFunction& w, const DistributionSpec& prior) { return {w, prior}; }

PosteriorStats posterior_stats(const std::function<double(double)>& F, SupportHint hint)
{
    require(hint.lo < hint.hi, "support hint needs lo < hi");
    constexpr double tail = 1e-12;
    constexpr int max_widenings = 60;

    double lo = hint.lo, hi = hint.hi;
    double step = std::max(hi - lo, 1.0);
    for (int k = 0; 1.0 - F(hi) > tail; ++k) {
        if (k == max_widenings) throw NumericError("upper tail of the penalized law does not fall below 1e-12", hi);
        hi += step;
        step *= 2.0;
    }
    step = std::max(hint.hi - hint.lo, 1.0);
    for (int k = 0; F(lo) > tail; ++k) {
        if (k == max_widenings) throw NumericError("lower tail of the penalized law does not fall below 1e-12", lo);
        lo -= step;
        step *= 2.0;
    }
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);

    // Break points: the origin, the hint endpoints, and quantiles found by bisection, so that no
    // panel can step over a narrow stretch where the tail mass sits.
    std::vector<double> cuts{lo, 0.0, hi};
    for (double c : {hint.lo, hint.hi})
        if (c > lo && c < hi) cuts.push_back(c);
    for (double p : {1e-9, 1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1.0 - 1e-6, 1.0 - 1e-9}) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
            const double mid = 0.5 * (a + b);
            (F(mid) < p ? a : b) = mid;
        }
        if (b > lo && b < hi) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    QuadratureSettings qs;
    qs.abs_tol = 1e-13;
    qs.rel_tol = 1e-12;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (a >= 0.0) {
            m1 += integrate([&](double x) { return 1.0 - F(x); }, a, b, qs);
            m2 += 2.0 * integrate([&](double x) { return x * (1.0 - F(x)); }, a, b, qs);
        } else {
            m1 -= integrate(F, a, b, qs);
            m2 += 2.0 * integrate([&](double x) { return -x * F(x); }, a, b, qs);
        }
    }
    PosteriorStats out{};
    out.mean = m1;
    out.variance = std::max(m2 - m1 * m1, 0.0);
    out.std = std::sqrt(out.variance);
    if (out.std > 0.0) out.information_ratio = out.mean / out.std;
    return out;
}

double neggumbel_information_ratio(double mu, double varrho)
{
    require(varrho > 0.0, "negative-Gumbel scale must be positive");
    return (mu - varrho * constants::euler_mascheroni) / (constants::pi * varrho / std::sqrt(6.0));
}

NegGumbelPosterior mpwpf_posterior(double mu, double varrho, double delta, double rho)
{
    require(varrho > 0.0 && delta > 0.0 && rho > 0.0, "mpwpf_posterior needs varrho, delta, rho > 0");
    NegGumbelPosterior out{};
    out.mu = mu - varrho * std::log(delta);
    out.rho = varrho / rho;
    out.ir_shift = neggumbel_information_ratio(out.mu, out.rho) - neggumbel_information_ratio(mu, varrho);
    return out;
}

std::string to_string(Disposition d)
{
    switch (d) {
    case Disposition::fearful: return "fearful";
    case Disposition::greedy: return "greedy";
    case Disposition::neutral: return "neutral";
    case Disposition::mixed: return "mixed";
    }
    return "mixed";
}

Disposition classify_disposition(const WeightingFunction& w)
{
    constexpr int n = 200;
    constexpr double h = 1.0 / n;
    std::vector<double> v(n + 1);
    for (int i = 1; i < n; ++i) v[i] = eval_wpf(w, i * h);

    std::vector<int> runs;
    for (int i = 2; i < n - 1; ++i) {
        const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        if (std::abs(d2) < 1e-9) continue;
        const int s = d2 > 0.0 ? 1 : -1;
        if (runs.empty() || runs.back() != s) runs.push_back(s);
    }
    if (runs.empty()) return Disposition::neutral;
    if (runs == std::vector<int>{-1, 1}) return Disposition::fearful;
    if (runs == std::vector<int>{1, -1}) return Disposition::greedy;
    return Disposition::mixed;
}

bool fosd_check(const DistributionSpec& a, const DistributionSpec& b, int grid_points)
{
    require(grid_points >= 100, "fosd_check needs at least 100 grid points");
    const double lo = std::min(quantile(a, 1e-6), quantile(b, 1e-6));
    const double hi = std::max(quantile(a, 1.0 - 1e-6), quantile(b, 1.0 - 1e-6));
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + (hi - lo) * i / (grid_points - 1);
        if (cdf(a, x) > cdf(b, x) + 1e-12) return false;
    }
    return true;
}

}  // namespace greedfear
