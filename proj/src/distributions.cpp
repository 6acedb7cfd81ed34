#include "greedfear/distributions.hpp"

#include "greedfear/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace greedfear {

namespace {

constexpr double kPi = constants::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);
// Skewness of the largest-extreme Gumbel law.
const double kGumbelSkew = 12.0 * std::sqrt(6.0) * constants::zeta3 / (kPi * kPi * kPi);

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw DomainError(what);
    }
}

void require_finite(double v, const char* name)
{
    require(std::isfinite(v), std::string(name) + " must be finite");
}

void require_positive(double v, const char* name)
{
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be positive and finite");
}

void check_unit(double u)
{
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "quantile level must lie in (0, 1), got " << u;
        throw DomainError(msg.str());
    }
}

// πx / sinh(πx) without overflow.
double pix_over_sinh(double x)
{
    const double a = kPi * std::abs(x);
    if (a < 1e-8) {
        return 1.0 - a * a / 6.0;
    }
    return 2.0 * a * std::exp(-a) / -std::expm1(-2.0 * a);
}

MomentSummary from_raw(double m1, double m2, double m3, double m4)
{
    const double var = m2 - m1 * m1;
    const double mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    const double mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
    return {m1, var, mu3 / std::pow(var, 1.5), mu4 / (var * var) - 3.0};
}

// Moments from a raw-moment source that may run out (heavy tails).
template <class Raw>
MomentSummary from_partial_raw(Raw raw)
{
    MomentSummary out;
    const auto m1 = raw(1);
    if (!m1) {
        return out;
    }
    out.mean = *m1;
    const auto m2 = raw(2);
    if (!m2) {
        return out;
    }
    const double var = *m2 - *m1 * *m1;
    out.variance = var;
    const auto m3 = raw(3);
    if (!m3) {
        return out;
    }
    out.skewness = (*m3 - 3.0 * *m1 * *m2 + 2.0 * std::pow(*m1, 3)) / std::pow(var, 1.5);
    const auto m4 = raw(4);
    if (!m4) {
        return out;
    }
    out.excess_kurtosis =
        (*m4 - 4.0 * *m1 * *m3 + 6.0 * *m1 * *m1 * *m2 - 3.0 * std::pow(*m1, 4)) / (var * var) - 3.0;
    return out;
}

// cf of Y^{1/γ}, Y ~ Gamma(δ, 1), on a contour rotated into the decaying sector.
Complex gen_gamma_cf(double gamma, double delta, double theta)
{
    if (theta == 0.0) {
        return 1.0;
    }
    if (theta < 0.0) {
        return std::conj(gen_gamma_cf(gamma, delta, -theta));
    }
    const double beta = std::copysign(std::min(kPi / 4.0, 0.5 * kPi * std::abs(gamma)), gamma);
    const Complex rot = std::polar(1.0, beta);
    const Complex rot_g = std::polar(1.0, beta / gamma);
    const Complex i(0.0, 1.0);
    // s = w^{1/δ} along arg s = β; s^{δ-1} ds = dw / δ.
    auto integrand = [&](double w) {
        if (w == 0.0) {
            return Complex(1.0, 0.0);
        }
        const double s = std::pow(w, 1.0 / delta);
        return std::exp(-s * rot + i * theta * std::pow(s, 1.0 / gamma) * rot_g);
    };
    QuadratureSettings q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    q.max_subdivisions = 5000;
    const double re = integrate([&](double w) { return integrand(w).real(); }, 0.0, kInf, q);
    const double im = integrate([&](double w) { return integrand(w).imag(); }, 0.0, kInf, q);
    return std::polar(1.0, beta * delta) * Complex(re, im) / std::tgamma(delta + 1.0);
}

double gen_gamma_log_pdf(double gamma, double delta, double x)
{
    return std::log(std::abs(gamma)) - std::lgamma(delta) + (gamma * delta - 1.0) * std::log(x) - std::pow(x, gamma);
}

// E e^{sX} for a density on (0, ∞).
double positive_mgf(const std::function<double(double)>& density, double s)
{
    QuadratureSettings q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    q.max_subdivisions = 5000;
    auto f = [&](double x) {
        const double p = x <= 0.0 ? 0.0 : density(x);
        return p == 0.0 ? 0.0 : std::exp(s * x + std::log(p));
    };
    return integrate(f, 0.0, kInf, q);
}

std::string fmt(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace

bool MgfDomain::contains(double s) const
{
    const bool above = lo_closed ? s >= lo : s > lo;
    const bool below = hi_closed ? s <= hi : s < hi;
    return above && below;
}

std::string MgfDomain::describe() const
{
    if (lo == hi && lo_closed && hi_closed) {
        return "{" + fmt(lo) + "}";
    }
    return std::string(lo_closed ? "[" : "(") + fmt(lo) + ", " + fmt(hi) + (hi_closed ? "]" : ")");
}

// Laplace

Laplace::Laplace(double m_, double b_) : m(m_), b(b_)
{
    require_finite(m, "Laplace location m");
    require_positive(b, "Laplace scale b");
}

double Laplace::pdf(double x) const
{
    return std::exp(-std::abs(x - m) / b) / (2.0 * b);
}

double Laplace::cdf(double x) const
{
    const double z = (x - m) / b;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double Laplace::sf(double x) const
{
    const double z = (x - m) / b;
    return z < 0.0 ? 1.0 - 0.5 * std::exp(z) : 0.5 * std::exp(-z);
}

double Laplace::quantile(double u) const
{
    check_unit(u);
    return u < 0.5 ? m + b * std::log(2.0 * u) : m - b * std::log(2.0 * (1.0 - u));
}

Complex Laplace::cf(double t) const
{
    return std::polar(1.0 / (1.0 + b * b * t * t), m * t);
}

double Laplace::mgf_unchecked(double s) const
{
    return std::exp(m * s) / (1.0 - b * b * s * s);
}

MgfDomain Laplace::mgf_domain() const
{
    return {-1.0 / b, 1.0 / b};
}

MomentSummary Laplace::moments() const
{
    return {m, 2.0 * b * b, 0.0, 3.0};
}

// Logistic

Logistic::Logistic(double m_, double rho_) : m(m_), rho(rho_)
{
    require_finite(m, "logistic location m");
    require_positive(rho, "logistic scale rho");
}

double Logistic::pdf(double x) const
{
    const double e = std::exp(-std::abs(x - m) / rho);
    return e / (rho * (1.0 + e) * (1.0 + e));
}

double Logistic::cdf(double x) const
{
    const double z = (x - m) / rho;
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double Logistic::sf(double x) const
{
    return cdf(2.0 * m - x);
}

double Logistic::log_cdf(double x) const
{
    const double z = (x - m) / rho;
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double Logistic::log_sf(double x) const { return log_cdf(2.0 * m - x); }

double Logistic::quantile(double u) const
{
    check_unit(u);
    return m + rho * (std::log(u) - std::log1p(-u));
}

Complex Logistic::cf(double t) const
{
    return std::polar(pix_over_sinh(rho * t), m * t);
}

double Logistic::mgf_unchecked(double s) const
{
    const double a = kPi * rho * s;
    const double ratio = std::abs(a) < 1e-8 ? 1.0 + a * a / 6.0 : a / std::sin(a);
    return std::exp(m * s) * ratio;
}

MgfDomain Logistic::mgf_domain() const
{
    return {-1.0 / rho, 1.0 / rho};
}

MomentSummary Logistic::moments() const
{
    return {m, rho * rho * kPi * kPi / 3.0, 0.0, 1.2};
}

// Gumbel

Gumbel::Gumbel(double mu_, double rho_) : mu(mu_), rho(rho_)
{
    require_finite(mu, "Gumbel location mu");
    require_positive(rho, "Gumbel scale rho");
}

double Gumbel::pdf(double x) const
{
    const double z = (x - mu) / rho;
    return std::exp(-z - std::exp(-z)) / rho;
}

double Gumbel::cdf(double x) const
{
    return std::exp(-std::exp(-(x - mu) / rho));
}

double Gumbel::sf(double x) const
{
    return -std::expm1(-std::exp(-(x - mu) / rho));
}

double Gumbel::log_cdf(double x) const { return -std::exp(-(x - mu) / rho); }

double Gumbel::log_sf(double x) const
{
    const double e = std::exp(-(x - mu) / rho);
    return e < 0.5 ? std::log(-std::expm1(-e)) : std::log1p(-std::exp(-e));
}

double Gumbel::quantile(double u) const
{
    check_unit(u);
    return mu - rho * std::log(-std::log(u));
}

Complex Gumbel::cf(double t) const
{
    return std::exp(Complex(0.0, mu * t) + log_gamma(Complex(1.0, -rho * t)));
}

double Gumbel::mgf_unchecked(double s) const
{
    return std::exp(mu * s + std::lgamma(1.0 - rho * s));
}

MgfDomain Gumbel::mgf_domain() const
{
    return {-kInf, 1.0 / rho};
}

MomentSummary Gumbel::moments() const
{
    return {mu + rho * constants::euler_mascheroni, kPi * kPi * rho * rho / 6.0, kGumbelSkew, 2.4};
}

// NegGumbel

NegGumbel::NegGumbel(double mu_, double rho_) : mu(mu_), rho(rho_)
{
    require_finite(mu, "negative-Gumbel location mu");
    require_positive(rho, "negative-Gumbel scale rho");
}

double NegGumbel::pdf(double x) const
{
    const double z = (x - mu) / rho;
    return std::exp(z - std::exp(z)) / rho;
}

double NegGumbel::cdf(double x) const
{
    return -std::expm1(-std::exp((x - mu) / rho));
}

double NegGumbel::sf(double x) const
{
    return std::exp(-std::exp((x - mu) / rho));
}

double NegGumbel::log_cdf(double x) const
{
    const double e = std::exp((x - mu) / rho);
    return e < 0.5 ? std::log(-std::expm1(-e)) : std::log1p(-std::exp(-e));
}

double NegGumbel::log_sf(double x) const { return -std::exp((x - mu) / rho); }

double NegGumbel::quantile(double u) const
{
    check_unit(u);
    return mu + rho * std::log(-std::log1p(-u));
}

Complex NegGumbel::cf(double t) const
{
    return std::exp(Complex(0.0, mu * t) + log_gamma(Complex(1.0, rho * t)));
}

double NegGumbel::mgf_unchecked(double s) const
{
    return std::exp(mu * s + std::lgamma(1.0 + rho * s));
}

MgfDomain NegGumbel::mgf_domain() const
{
    return {-1.0 / rho, kInf};
}

MomentSummary NegGumbel::moments() const
{
    return {mu - rho * constants::euler_mascheroni, kPi * kPi * rho * rho / 6.0, -kGumbelSkew, 2.4};
}

// DoublePareto

DoublePareto::DoublePareto(double rho_) : rho(rho_)
{
    require(std::isfinite(rho) && rho > 1.0, "double-Pareto shape rho must exceed 1");
}

double DoublePareto::pdf(double x) const
{
    return 0.5 * (rho - 1.0) * std::pow(1.0 + std::abs(x), -rho);
}

double DoublePareto::cdf(double x) const
{
    const double tail = 0.5 * std::pow(1.0 + std::abs(x), 1.0 - rho);
    return x < 0.0 ? tail : 1.0 - tail;
}

double DoublePareto::sf(double x) const
{
    return cdf(-x);
}

double DoublePareto::quantile(double u) const
{
    check_unit(u);
    const double e = 1.0 / (1.0 - rho);
    return u < 0.5 ? 1.0 - std::pow(2.0 * u, e) : std::pow(2.0 * (1.0 - u), e) - 1.0;
}

Complex DoublePareto::cf(double t) const
{
    if (t == 0.0) {
        return 1.0;
    }
    // Contour rotated onto the imaginary axis: a non-oscillating Laplace-type integral.
    const double a = std::abs(t);
    auto g = [&](double s) { return std::exp(-a * s) * std::pow(1.0 + s * s, -0.5 * rho) * std::sin(rho * std::atan(s)); };
    QuadratureSettings q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    q.max_subdivisions = 5000;
    return (rho - 1.0) * integrate(g, 0.0, kInf, q);
}

double DoublePareto::mgf_unchecked(double) const
{
    return 1.0;
}

MgfDomain DoublePareto::mgf_domain() const
{
    return {0.0, 0.0, true, true};
}

std::optional<double> DoublePareto::abs_moment(int k) const
{
    if (k < 0 || static_cast<double>(k) >= rho - 1.0) {
        return std::nullopt;
    }
    return (rho - 1.0) * std::tgamma(k + 1.0) * std::exp(std::lgamma(rho - k - 1.0) - std::lgamma(rho));
}

MomentSummary DoublePareto::moments() const
{
    return from_partial_raw([this](int k) -> std::optional<double> {
        const auto a = abs_moment(k);
        if (!a) {
            return std::nullopt;
        }
        return k % 2 == 1 ? 0.0 : *a;
    });
}

// Cauchy

Cauchy::Cauchy(double c_) : c(c_)
{
    require_positive(c, "Cauchy scale c");
}

double Cauchy::pdf(double x) const
{
    return c / (kPi * (c * c + x * x));
}

double Cauchy::cdf(double x) const
{
    return 0.5 + std::atan(x / c) / kPi;
}

double Cauchy::sf(double x) const
{
    return x > 0.0 ? std::atan(c / x) / kPi : 0.5 + std::atan(-x / c) / kPi;
}

double Cauchy::quantile(double u) const
{
    check_unit(u);
    return c * std::tan(kPi * (u - 0.5));
}

Complex Cauchy::cf(double t) const
{
    return std::exp(-c * std::abs(t));
}

double Cauchy::mgf_unchecked(double) const
{
    return 1.0;
}

MgfDomain Cauchy::mgf_domain() const
{
    return {0.0, 0.0, true, true};
}

MomentSummary Cauchy::moments() const
{
    return {};
}

// Gaussian

Gaussian::Gaussian(double mu_, double sigma_) : mu(mu_), sigma(sigma_)
{
    require_finite(mu, "Gaussian mean mu");
    require_positive(sigma, "Gaussian standard deviation sigma");
}

double Gaussian::pdf(double x) const
{
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

double Gaussian::cdf(double x) const
{
    return 0.5 * std::erfc(-(x - mu) / (sigma * kSqrt2));
}

double Gaussian::sf(double x) const
{
    return 0.5 * std::erfc((x - mu) / (sigma * kSqrt2));
}

double Gaussian::quantile(double u) const
{
    check_unit(u);
    return mu - sigma * kSqrt2 * erfc_inv(2.0 * u);
}

Complex Gaussian::cf(double t) const
{
    return std::polar(std::exp(-0.5 * sigma * sigma * t * t), mu * t);
}

double Gaussian::mgf_unchecked(double s) const
{
    return std::exp(mu * s + 0.5 * sigma * sigma * s * s);
}

MgfDomain Gaussian::mgf_domain() const
{
    return {-kInf, kInf};
}

MomentSummary Gaussian::moments() const
{
    return {mu, sigma * sigma, 0.0, 0.0};
}

// Weibull

Weibull::Weibull(double gamma_, double delta_) : gamma(gamma_), delta(delta_)
{
    require_positive(gamma, "Weibull shape gamma");
    require_positive(delta, "Weibull scale delta");
}

double Weibull::pdf(double x) const
{
    if (x <= 0.0) {
        return 0.0;
    }
    const double z = x / delta;
    return gamma / delta * std::pow(z, gamma - 1.0) * std::exp(-std::pow(z, gamma));
}

double Weibull::cdf(double x) const
{
    return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / delta, gamma));
}

double Weibull::sf(double x) const
{
    return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / delta, gamma));
}

double Weibull::quantile(double u) const
{
    check_unit(u);
    return delta * std::pow(-std::log1p(-u), 1.0 / gamma);
}

Complex Weibull::cf(double t) const
{
    return gen_gamma_cf(gamma, 1.0, delta * t);
}

double Weibull::mgf_unchecked(double s) const
{
    if (s == 0.0) {
        return 1.0;
    }
    if (gamma == 1.0) {
        return 1.0 / (1.0 - delta * s);
    }
    return positive_mgf([this](double x) { return pdf(x); }, s);
}

MgfDomain Weibull::mgf_domain() const
{
    if (gamma > 1.0) {
        return {-kInf, kInf};
    }
    if (gamma == 1.0) {
        return {-kInf, 1.0 / delta};
    }
    return {-kInf, 0.0, false, true};
}

MomentSummary Weibull::moments() const
{
    auto raw = [this](int k) { return std::pow(delta, k) * std::tgamma(1.0 + k / gamma); };
    return from_raw(raw(1), raw(2), raw(3), raw(4));
}

// GenGamma

GenGamma::GenGamma(double gamma_, double delta_) : gamma(gamma_), delta(delta_)
{
    require(std::isfinite(gamma) && gamma != 0.0, "generalized-gamma shape gamma must be finite and nonzero");
    require_positive(delta, "generalized-gamma shape delta");
}

double GenGamma::pdf(double x) const
{
    if (x <= 0.0) {
        return 0.0;
    }
    return std::exp(gen_gamma_log_pdf(gamma, delta, x));
}

double GenGamma::cdf(double x) const
{
    if (x <= 0.0) {
        return 0.0;
    }
    const double y = std::pow(x, gamma);
    return gamma > 0.0 ? boost::math::gamma_p(delta, y) : boost::math::gamma_q(delta, y);
}

double GenGamma::sf(double x) const
{
    if (x <= 0.0) {
        return 1.0;
    }
    const double y = std::pow(x, gamma);
    return gamma > 0.0 ? boost::math::gamma_q(delta, y) : boost::math::gamma_p(delta, y);
}

double GenGamma::quantile(double u) const
{
    check_unit(u);
    const double y = gamma > 0.0 ? boost::math::gamma_p_inv(delta, u) : boost::math::gamma_q_inv(delta, u);
    return std::pow(y, 1.0 / gamma);
}

Complex GenGamma::cf(double t) const
{
    return gen_gamma_cf(gamma, delta, t);
}

double GenGamma::mgf_unchecked(double s) const
{
    if (s == 0.0) {
        return 1.0;
    }
    if (gamma == 1.0) {
        return std::pow(1.0 - s, -delta);
    }
    return positive_mgf([this](double x) { return pdf(x); }, s);
}

MgfDomain GenGamma::mgf_domain() const
{
    if (gamma > 1.0) {
        return {-kInf, kInf};
    }
    if (gamma == 1.0) {
        return {-kInf, 1.0};
    }
    return {-kInf, 0.0, false, true};
}

std::optional<double> GenGamma::raw_moment(int k) const
{
    const double a = delta + k / gamma;
    if (!(a > 0.0)) {
        return std::nullopt;
    }
    return std::exp(std::lgamma(a) - std::lgamma(delta));
}

MomentSummary GenGamma::moments() const
{
    return from_partial_raw([this](int k) { return raw_moment(k); });
}

// Uniform

Uniform::Uniform(double lo_, double hi_) : lo(lo_), hi(hi_)
{
    require_finite(lo, "uniform lower bound");
    require_finite(hi, "uniform upper bound");
    require(hi > lo, "uniform bounds must satisfy lo < hi");
}

double Uniform::pdf(double x) const
{
    return (x >= lo && x <= hi) ? 1.0 / (hi - lo) : 0.0;
}

double Uniform::cdf(double x) const
{
    if (x <= lo) {
        return 0.0;
    }
    if (x >= hi) {
        return 1.0;
    }
    return (x - lo) / (hi - lo);
}

double Uniform::sf(double x) const
{
    return cdf(lo + hi - x);
}

double Uniform::quantile(double u) const
{
    check_unit(u);
    return lo + u * (hi - lo);
}

Complex Uniform::cf(double t) const
{
    const double w = 0.5 * (hi - lo) * t;
    const double sinc = std::abs(w) < 1e-8 ? 1.0 - w * w / 6.0 : std::sin(w) / w;
    return std::polar(1.0, 0.5 * (hi + lo) * t) * sinc;
}

double Uniform::mgf_unchecked(double s) const
{
    const double w = s * (hi - lo);
    if (std::abs(w) < 1e-8) {
        return std::exp(s * lo) * (1.0 + 0.5 * w);
    }
    return std::exp(s * lo) * std::expm1(w) / w;
}

MgfDomain Uniform::mgf_domain() const
{
    return {-kInf, kInf};
}

MomentSummary Uniform::moments() const
{
    const double w = hi - lo;
    return {0.5 * (lo + hi), w * w / 12.0, 0.0, -1.2};
}

// Dispatch

double pdf(const DistributionSpec& d, double x)
{
    return std::visit([x](const auto& f) { return f.pdf(x); }, d);
}

double cdf(const DistributionSpec& d, double x)
{
    return std::visit([x](const auto& f) { return f.cdf(x); }, d);
}

double sf(const DistributionSpec& d, double x)
{
    return std::visit([x](const auto& f) { return f.sf(x); }, d);
}

double log_cdf(const DistributionSpec& d, double x)
{
    return std::visit(
        [x](const auto& f) {
            if constexpr (requires { f.log_cdf(x); }) return f.log_cdf(x);
            else return std::log(f.cdf(x));
        },
        d);
}

double log_sf(const DistributionSpec& d, double x)
{
    return std::visit(
        [x](const auto& f) {
            if constexpr (requires { f.log_sf(x); }) return f.log_sf(x);
            else return std::log(f.sf(x));
        },
        d);
}

double quantile(const DistributionSpec& d, double u)
{
    return std::visit([u](const auto& f) { return f.quantile(u); }, d);
}

Complex cf(const DistributionSpec& d, double theta)
{
    return std::visit([theta](const auto& f) { return f.cf(theta); }, d);
}

MgfDomain mgf_domain(const DistributionSpec& d)
{
    return std::visit([](const auto& f) { return f.mgf_domain(); }, d);
}

double mgf(const DistributionSpec& d, double s)
{
    const MgfDomain dom = mgf_domain(d);
    if (!std::isfinite(s) || !dom.contains(s)) {
        std::ostringstream msg;
        msg << family_name(d) << " mgf is finite only for s in " << dom.describe() << ", got s = " << s;
        throw DomainError(msg.str());
    }
    return std::visit([s](const auto& f) { return f.mgf_unchecked(s); }, d);
}

MomentSummary moments(const DistributionSpec& d)
{
    return std::visit([](const auto& f) { return f.moments(); }, d);
}

bool is_infinitely_divisible(const DistributionSpec& d)
{
    return std::visit([](const auto& f) { return f.infinitely_divisible(); }, d);
}

std::vector<double> sample(const DistributionSpec& d, std::size_t n, std::uint64_t seed)
{
    if (n < 1) {
        throw DomainError("sample size must be at least 1");
    }
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (double& x : out) {
        x = quantile(d, open_unit(gen()));
    }
    return out;
}

std::string family_name(const DistributionSpec& d)
{
    static const char* names[] = {"laplace",  "logistic", "gumbel",  "neg_gumbel", "double_pareto",
                                  "cauchy",   "gaussian", "weibull", "gen_gamma",  "uniform"};
    return names[d.index()];
}

}  // namespace greedfear
