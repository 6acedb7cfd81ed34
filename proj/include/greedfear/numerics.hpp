#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace greedfear {

using Complex = std::complex<double>;
using RealFn = std::function<double(double)>;
using CharFn = std::function<Complex(double)>;

namespace constants {
inline constexpr double euler_mascheroni = 0.57721566490153286061;
inline constexpr double zeta3 = 1.20205690315959428540;
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    /// Throws DomainError unless both tolerances are positive and max_subdivisions >= 1.
    void validate() const;
};

/// Log-gamma on the continuous branch (imaginary part tracks arg Γ without 2π wraps for Re z > 0).
/// Throws DomainError at the poles z = 0, -1, -2, ...
Complex log_gamma(Complex z);

/// log B(a, b) = log Γ(a) + log Γ(b) - log Γ(a + b).
Complex log_beta(Complex a, Complex b);

double erfc(double x);
/// Inverse of erfc on the open interval (0, 2).
double erfc_inv(double y);

/// Global adaptive Gauss–Kronrod (21-point) integration.
///
/// Either limit may be infinite; half-lines are mapped onto (0, 1] with x = a + (1 - t) / t.
/// The worst segment is bisected until the summed error estimate is below
/// max(abs_tol, rel_tol * |estimate|). Throws NumericError carrying the partial estimate when
/// max_subdivisions is exhausted or the integrand returns a non-finite value.
double integrate(const RealFn& f, double a, double b, const QuadratureSettings& settings = {});

/// Safeguarded Illinois/bisection root finder on a sign-changing bracket.
/// Stops when |f(x)| < tol or the bracket is narrower than tol. Throws BracketError without a sign change.
double find_root(const RealFn& f, double lo, double hi, double tol = 1e-12);

struct InversionResult {
    double value = 0.0;    ///< density, clamped at zero
    double clamped = 0.0;  ///< magnitude removed by the clamp (0 when the raw value was nonnegative)
};

/// Density recovered from a characteristic function by Fourier inversion.
///
/// phi is sampled once on adaptive Gauss–Legendre panels covering [0, cutoff], where cutoff is the
/// first point with |phi| < 1e-12. Panels are refined until they integrate e^{-iθ(x-center)} phi
/// accurately for every |x - center| <= half_width, so repeated evaluation inside that window is a
/// weighted cosine sum. Evaluation outside the window stays valid but loses accuracy.
/// When phi decays only algebraically the panels stop where |phi| < 1e-10 and the remaining tail
/// is added by integration by parts (or direct quadrature for x close to 0).
/// Instances are immutable after construction and safe to share between threads.
class CfDensity {
public:
    CfDensity(const CharFn& phi, double center, double half_width, const QuadratureSettings& settings = {});

    InversionResult evaluate(double x) const;
    double operator()(double x) const { return evaluate(x).value; }

    double cutoff() const noexcept { return cutoff_; }
    double center() const noexcept { return center_; }
    double half_width() const noexcept { return half_width_; }
    std::size_t node_count() const noexcept { return theta_.size(); }

private:
    double tail(double x) const;

    CharFn phi_;
    double center_;
    double half_width_;
    double cutoff_ = 0.0;
    double limit_ = 0.0;  // end of the panel range; below cutoff_ for algebraically decaying phi
    bool slow_decay_ = false;
    Complex phi_at_limit_;
    Complex dphi_at_limit_;
    double tail_rate_ = 0.0;  // phase velocity of phi at the limit
    QuadratureSettings settings_;
    std::vector<double> theta_;
    std::vector<Complex> weighted_;  // w_j e^{-iθ_j center} phi(θ_j)
};

/// f(x) = (1/2π) ∫ e^{-iθx} phi(θ) dθ at a single point; negative values are clamped to zero.
/// Throws NumericError when |phi| does not fall below 1e-12 before θ = 1e6.
InversionResult invert_cf(const CharFn& phi, double x, const QuadratureSettings& settings = {});

inline double cf_to_pdf(const CharFn& phi, double x, const QuadratureSettings& settings = {})
{
    return invert_cf(phi, x, settings).value;
}

/// Smallest θ on a geometric scan with |phi| < 1e-12 at θ and two points beyond it.
double cf_truncation_point(const CharFn& phi, double threshold = 1e-12, double limit = 1e6);

}  // namespace greedfear
