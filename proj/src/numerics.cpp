#include "greedfear/numerics.hpp"

#include "greedfear/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>

namespace greedfear {

namespace {

constexpr double kPi = constants::pi;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

Complex lanczos_log_gamma(Complex z)
{
    z -= 1.0;
    Complex series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        series += kLanczos[i] / (z + static_cast<double>(i));
    }
    const Complex t = z + kLanczosG + 0.5;
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

// log sin(πz) without overflow for large |Im z|.
Complex log_sin_pi(Complex z)
{
    if (std::abs(z.imag()) < 10.0) {
        return std::log(std::sin(kPi * z));
    }
    const bool upper = z.imag() > 0.0;
    const Complex w = upper ? z : std::conj(z);
    const Complex i(0.0, 1.0);
    const Complex v = -i * kPi * w + i * (kPi / 2.0) - std::log(2.0) + std::log(1.0 - std::exp(2.0 * i * kPi * w));
    return upper ? v : std::conj(v);
}

bool is_pole(Complex z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk21(const RealFn& f, double a, double b)
{
    double err = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    // The single-panel path reports the error of the rule mapped to [-1, 1].
    err *= 0.5 * (b - a);
    if (!std::isfinite(value)) {
        throw NumericError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return {a, b, value, err};
}

double adaptive(const RealFn& f, double a, double b, const QuadratureSettings& s)
{
    std::priority_queue<Segment> heap;
    Segment first = gk21(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int subdivisions = 0;
    while (total_err > std::max(s.abs_tol, s.rel_tol * std::abs(total))) {
        if (subdivisions >= s.max_subdivisions) {
            std::ostringstream msg;
            msg << "integration did not converge after " << s.max_subdivisions
                << " subdivisions (estimate " << total << ", error " << total_err << ")";
            throw NumericError(msg.str(), total, total_err);
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw NumericError("integration segment cannot be split further", total, total_err);
        }
        Segment left = gk21(f, worst.a, mid);
        Segment right = gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Recompute the sum from the leaves to shed accumulated rounding.
    double sum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        heap.pop();
    }
    return sum;
}

constexpr int kPanelOrder = 20;
using Legendre = boost::math::quadrature::gauss<double, kPanelOrder>;

// Nodes and weights of the 20-point rule on [-1, 1].
struct Rule {
    std::array<double, kPanelOrder> x{};
    std::array<double, kPanelOrder> w{};
    Rule()
    {
        const auto& abscissa = Legendre::abscissa();
        const auto& weights = Legendre::weights();
        // Boost stores the nonnegative half; an even order has no zero node.
        std::size_t k = 0;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            x[k] = abscissa[i];
            w[k++] = weights[i];
            x[k] = -abscissa[i];
            w[k++] = weights[i];
        }
    }
};

const Rule& rule()
{
    static const Rule r;
    return r;
}

struct PanelSamples {
    std::array<double, kPanelOrder> theta{};
    std::array<Complex, kPanelOrder> weighted{};
};

}  // namespace

void QuadratureSettings::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw DomainError("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw DomainError("max_subdivisions must be at least 1");
    }
}

Complex log_gamma(Complex z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("log_gamma argument must be finite");
    }
    if (is_pole(z)) {
        throw DomainError("log_gamma pole at z = " + std::to_string(z.real()));
    }
    if (z.real() >= 0.5) {
        return lanczos_log_gamma(z);
    }
    if (z.real() > -30.0) {
        // Upward recurrence keeps the branch continuous in Im z.
        const int n = static_cast<int>(std::ceil(0.5 - z.real()));
        Complex shift = 0.0;
        for (int k = 0; k < n; ++k) {
            shift += std::log(z + static_cast<double>(k));
        }
        return lanczos_log_gamma(z + static_cast<double>(n)) - shift;
    }
    return std::log(kPi) - log_sin_pi(z) - lanczos_log_gamma(1.0 - z);
}

Complex log_beta(Complex a, Complex b)
{
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double erfc(double x)
{
    return std::erfc(x);
}

double erfc_inv(double y)
{
    if (!(y > 0.0 && y < 2.0)) {
        throw DomainError("erfc_inv argument must lie in (0, 2), got " + std::to_string(y));
    }
    return boost::math::erfc_inv(y);
}

double integrate(const RealFn& f, double a, double b, const QuadratureSettings& settings)
{
    settings.validate();
    if (std::isnan(a) || std::isnan(b)) {
        throw DomainError("integration limits must not be NaN");
    }
    if (a == b) {
        return 0.0;
    }
    if (a > b) {
        return -integrate(f, b, a, settings);
    }
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) {
        QuadratureSettings half = settings;
        half.abs_tol = settings.abs_tol / 2.0;
        return integrate(f, a, 0.0, half) + integrate(f, 0.0, b, half);
    }
    if (hi_inf) {
        auto g = [&](double t) { return f(a + (1.0 - t) / t) / (t * t); };
        return adaptive(g, 0.0, 1.0, settings);
    }
    if (lo_inf) {
        auto g = [&](double t) { return f(b - (1.0 - t) / t) / (t * t); };
        return adaptive(g, 0.0, 1.0, settings);
    }
    return adaptive(f, a, b, settings);
}

double find_root(const RealFn& f, double lo, double hi, double tol)
{
    if (!(tol > 0.0)) {
        throw DomainError("root tolerance must be positive");
    }
    if (lo > hi) {
        std::swap(lo, hi);
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if (!std::isfinite(flo) || !std::isfinite(fhi) || std::signbit(flo) == std::signbit(fhi)) {
        std::ostringstream msg;
        msg << "no sign change on [" << lo << ", " << hi << "]: f(lo) = " << flo << ", f(hi) = " << fhi;
        throw BracketError(msg.str());
    }
    // Illinois false position with a bisection fallback when progress stalls.
    int stale_side = 0;
    double width = hi - lo;
    for (int iter = 0; iter < 500; ++iter) {
        double x = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(x > lo && x < hi)) {
            x = 0.5 * (lo + hi);
        }
        const double fx = f(x);
        if (!std::isfinite(fx)) {
            throw NumericError("root function is not finite at x = " + std::to_string(x), x);
        }
        if (std::abs(fx) < tol || fx == 0.0) {
            return x;
        }
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
            if (stale_side == -1) {
                fhi *= 0.5;
            }
            stale_side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (stale_side == 1) {
                flo *= 0.5;
            }
            stale_side = 1;
        }
        if (hi - lo < tol) {
            return std::abs(flo) < std::abs(fhi) ? lo : hi;
        }
        if (hi - lo > 0.5 * width) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (std::abs(fm) < tol || fm == 0.0) {
                return mid;
            }
            if (std::signbit(fm) == std::signbit(flo)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
            stale_side = 0;
        }
        width = hi - lo;
    }
    return 0.5 * (lo + hi);
}

double cf_truncation_point(const CharFn& phi, double threshold, double limit)
{
    const double step = std::pow(2.0, 0.25);
    auto small = [&](double t) { return std::abs(phi(t)) < threshold; };
    for (double t = 1.0 / 64.0; t < limit; t *= step) {
        if (small(t) && small(t * 1.1) && small(t * 1.3)) {
            return t;
        }
    }
    if (small(limit)) {
        return limit;
    }
    std::ostringstream msg;
    msg << "characteristic function does not fall below " << threshold << " before theta = " << limit;
    throw NumericError(msg.str());
}

CfDensity::CfDensity(const CharFn& phi, double center, double half_width, const QuadratureSettings& settings)
    : phi_(phi), center_(center), half_width_(std::abs(half_width)), settings_(settings)
{
    settings.validate();
    if (!std::isfinite(center) || !std::isfinite(half_width)) {
        throw DomainError("inversion window must be finite");
    }
    cutoff_ = cf_truncation_point(phi_);
    // Algebraic decay: stop the panels earlier and add the tail analytically.
    slow_decay_ = std::abs(phi_(2.0 * cutoff_)) > 1e-3 * std::abs(phi_(cutoff_));
    limit_ = slow_decay_ ? std::min(cutoff_, cf_truncation_point(phi_, 1e-10)) : cutoff_;

    const Rule& r = rule();
    auto sample = [&](double a, double b) {
        PanelSamples p;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int j = 0; j < kPanelOrder; ++j) {
            const double t = mid + half * r.x[j];
            const Complex v = phi_(t);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw NumericError("characteristic function is not finite at theta = " + std::to_string(t));
            }
            p.theta[j] = t;
            p.weighted[j] = half * r.w[j] * v * std::polar(1.0, -t * center_);
        }
        return p;
    };
    auto panel_sum = [](const PanelSamples& p, double d) {
        double s = 0.0;
        for (int j = 0; j < kPanelOrder; ++j) {
            s += (std::polar(1.0, -p.theta[j] * d) * p.weighted[j]).real();
        }
        return s;
    };

    std::vector<double> offsets{0.0};
    if (half_width_ > 0.0) {
        offsets = {-half_width_, -0.5 * half_width_, 0.0, 0.5 * half_width_, half_width_};
    }
    const double panel_tol = 1e-15;
    const double min_width = limit_ * 1e-12;
    const std::size_t max_nodes = 20'000'000;

    struct Pending {
        double a;
        double b;
        PanelSamples coarse;
    };
    std::vector<Pending> stack;
    const double h0 = std::min(limit_, 4.0 * kPi / (half_width_ + 1.0));
    const int n0 = static_cast<int>(std::ceil(limit_ / h0));
    for (int k = n0 - 1; k >= 0; --k) {
        const double a = limit_ * k / n0;
        const double b = limit_ * (k + 1) / n0;
        stack.push_back({a, b, sample(a, b)});
    }
    while (!stack.empty()) {
        Pending p = std::move(stack.back());
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        PanelSamples left = sample(p.a, mid);
        PanelSamples right = sample(mid, p.b);
        bool ok = true;
        for (double d : offsets) {
            const double coarse = panel_sum(p.coarse, d);
            const double fine = panel_sum(left, d) + panel_sum(right, d);
            if (std::abs(coarse - fine) > panel_tol + 1e-13 * std::abs(fine)) {
                ok = false;
                break;
            }
        }
        if (ok || (p.b - p.a) < min_width) {
            for (const PanelSamples* s : {&left, &right}) {
                theta_.insert(theta_.end(), s->theta.begin(), s->theta.end());
                weighted_.insert(weighted_.end(), s->weighted.begin(), s->weighted.end());
            }
            if (theta_.size() > max_nodes) {
                throw NumericError("characteristic-function inversion needs too many panels");
            }
        } else {
            stack.push_back({mid, p.b, std::move(right)});
            stack.push_back({p.a, mid, std::move(left)});
        }
    }

    phi_at_limit_ = phi_(limit_);
    const double dt = std::min(1e-4 * limit_, 1e-3);
    dphi_at_limit_ = (phi_(limit_ + dt) - phi_(limit_ - dt)) / (2.0 * dt);
    tail_rate_ = std::abs(phi_at_limit_) > 0.0 ? (dphi_at_limit_ / phi_at_limit_).imag() : 0.0;
}

double CfDensity::tail(double x) const
{
    if (!slow_decay_) {
        return 0.0;
    }
    // Beyond the limit phi behaves like e^{iωθ} g(θ) with g slowly varying.
    const double y = x - tail_rate_;
    if (std::abs(y) * limit_ >= 20.0) {
        // Two integration-by-parts terms of ∫_L^∞ e^{-iθy} g(θ) dθ.
        const Complex iy(0.0, y);
        const Complex rot = std::polar(1.0, -tail_rate_ * limit_);
        const Complex g = phi_at_limit_ * rot;
        const Complex dg = (dphi_at_limit_ - Complex(0.0, tail_rate_) * phi_at_limit_) * rot;
        const Complex e = std::polar(1.0, -limit_ * y);
        return (e * (g / iy + dg / (iy * iy))).real();
    }
    QuadratureSettings s;
    s.abs_tol = 1e-14;
    s.rel_tol = 1e-10;
    s.max_subdivisions = 20000;
    auto f = [&](double t) { return (std::polar(1.0, -t * x) * phi_(t)).real(); };
    return integrate(f, limit_, std::numeric_limits<double>::infinity(), s);
}

InversionResult CfDensity::evaluate(double x) const
{
    if (!std::isfinite(x)) {
        return {0.0, 0.0};
    }
    const double d = x - center_;
    double sum = 0.0;
    for (std::size_t j = 0; j < theta_.size(); ++j) {
        const double a = -theta_[j] * d;
        sum += std::cos(a) * weighted_[j].real() - std::sin(a) * weighted_[j].imag();
    }
    const double raw = (sum + tail(x)) / kPi;
    if (raw < 0.0) {
        return {0.0, -raw};
    }
    return {raw, 0.0};
}

InversionResult invert_cf(const CharFn& phi, double x, const QuadratureSettings& settings)
{
    return CfDensity(phi, x, 0.0, settings).evaluate(x);
}

}  // namespace greedfear
