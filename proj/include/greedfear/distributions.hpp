#pragma once

#include "greedfear/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace greedfear {

/// Interval of s where E e^{sX} is finite. Endpoints may be infinite.
struct MgfDomain {
    double lo;
    double hi;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double s) const;
    std::string describe() const;
};

/// Mean, variance, skewness and excess kurtosis; std::nullopt marks an undefined moment.
struct MomentSummary {
    std::optional<double> mean;
    std::optional<double> variance;
    std::optional<double> skewness;
    std::optional<double> excess_kurtosis;
};

// Each family validates its parameters on construction and throws DomainError otherwise.

/// f(x) = e^{-|x-m|/b} / (2b)
struct Laplace {
    double m;
    double b;
    Laplace(double m, double b);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

/// F(x) = 1 / (1 + e^{-(x-m)/ρ})
struct Logistic {
    double m;
    double rho;
    Logistic(double m, double rho);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double log_cdf(double x) const;
    double log_sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

/// Largest-extreme Gumbel, F(x) = exp(-e^{-(x-μ)/ρ})
struct Gumbel {
    double mu;
    double rho;
    Gumbel(double mu, double rho);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double log_cdf(double x) const;
    double log_sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

/// Smallest-extreme Gumbel, F(x) = 1 - exp(-e^{(x-μ)/ρ})
struct NegGumbel {
    double mu;
    double rho;
    NegGumbel(double mu, double rho);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double log_cdf(double x) const;
    double log_sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

/// f(x) = (ρ-1)(1+|x|)^{-ρ} / 2, ρ > 1
struct DoublePareto {
    double rho;
    explicit DoublePareto(double rho);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
    /// E|X|^k, defined for k < ρ - 1
    std::optional<double> abs_moment(int k) const;
};

/// f(x) = c / (π(c² + x²))
struct Cauchy {
    double c;
    explicit Cauchy(double c);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

struct Gaussian {
    double mu;
    double sigma;
    Gaussian(double mu, double sigma);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return true; }
};

/// F(x) = 1 - exp(-(x/δ)^γ), x > 0
struct Weibull {
    double gamma;
    double delta;
    Weibull(double gamma, double delta);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return gamma <= 1.0; }
};

/// f(x) = |γ| x^{γδ-1} e^{-x^γ} / Γ(δ), x > 0, γ ≠ 0
struct GenGamma {
    double gamma;
    double delta;
    GenGamma(double gamma, double delta);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return std::abs(gamma) <= 1.0; }
    /// E X^k = Γ(δ + k/γ) / Γ(δ), defined while δ + k/γ > 0
    std::optional<double> raw_moment(int k) const;
};

struct Uniform {
    double lo;
    double hi;
    Uniform(double lo, double hi);
    double pdf(double x) const;
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    Complex cf(double t) const;
    double mgf_unchecked(double s) const;
    MgfDomain mgf_domain() const;
    MomentSummary moments() const;
    bool infinitely_divisible() const { return false; }
};

using DistributionSpec =
    std::variant<Laplace, Logistic, Gumbel, NegGumbel, DoublePareto, Cauchy, Gaussian, Weibull, GenGamma, Uniform>;

double pdf(const DistributionSpec& d, double x);
double cdf(const DistributionSpec& d, double x);
/// Survival function 1 - cdf, computed without cancellation in the upper tail.
double sf(const DistributionSpec& d, double x);
/// ln cdf and ln sf; finite where cdf or sf underflow for the double-exponential and logistic families.
double log_cdf(const DistributionSpec& d, double x);
double log_sf(const DistributionSpec& d, double x);
/// Throws DomainError unless 0 < u < 1.
double quantile(const DistributionSpec& d, double u);
Complex cf(const DistributionSpec& d, double theta);
/// Throws DomainError naming the convergence interval when s lies outside it.
double mgf(const DistributionSpec& d, double s);
MgfDomain mgf_domain(const DistributionSpec& d);
MomentSummary moments(const DistributionSpec& d);
bool is_infinitely_divisible(const DistributionSpec& d);

/// Inverse-transform sample of size n from a 64-bit Mersenne Twister seeded with seed.
std::vector<double> sample(const DistributionSpec& d, std::size_t n, std::uint64_t seed);

/// Lower-case family tag used in JSON ("laplace", "neg_gumbel", ...).
std::string family_name(const DistributionSpec& d);

/// Uniform draw in the open interval (0, 1) from 53 random bits.
inline double open_unit(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace greedfear
