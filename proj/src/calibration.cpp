#include "greedfear/calibration.hpp"

#include "greedfear/binomial_pricing.hpp"
#include "greedfear/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace greedfear {

namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& what)
{
    std::ostringstream msg;
    msg << "line " << line << ": " << what;
    throw ParseError(msg.str());
}

double parse_field(const std::string& raw, int line, const char* name)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size())
        parse_fail(line, std::string("malformed ") + name + " '" + s + "'");
    if (!std::isfinite(v) || v <= 0.0) parse_fail(line, std::string(name) + " must be positive, got " + s);
    return v;
}

double radical_inverse(int i, int base)
{
    double f = 1.0, result = 0.0;
    while (i > 0) {
        f /= base;
        result += f * (i % base);
        i /= base;
    }
    return result;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

struct MultistartOutcome {
    NelderMeadResult best;
    int n_skipped;
};

// Nelder–Mead from Halton points of the free coordinates; the fixed ones are held at their bound.
MultistartOutcome multistart(const std::function<ObjectiveValue(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, double tol, int max_iter,
                             int starts)
{
    const Eigen::Index dim = lower.size();
    if (upper.size() != dim || dim == 0) throw DomainError("parameter box must be nonempty with matching bounds");
    std::vector<Eigen::Index> free;
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (!(lower(k) <= upper(k)) || !std::isfinite(lower(k)) || !std::isfinite(upper(k)))
            throw DomainError("parameter box bounds must be finite and ordered");
        if (upper(k) > lower(k)) free.push_back(k);
    }
    if (static_cast<std::size_t>(free.size()) > std::size(kPrimes))
        throw DomainError("at most 12 free parameters are supported");
    if (starts < 1) throw DomainError("multistart must be at least 1");

    if (free.empty()) {
        const auto v = f(lower);
        return {{lower, v.value, 0, true}, v.n_skipped};
    }

    const auto n = static_cast<Eigen::Index>(free.size());
    Eigen::VectorXd lo(n), hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lo(i) = lower(free[i]);
        hi(i) = upper(free[i]);
    }
    auto embed = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd x = lower;
        for (Eigen::Index i = 0; i < n; ++i) x(free[i]) = y(i);
        return x;
    };
    // A dropped quote would otherwise make a region of vanishing model prices look like a perfect fit,
    // so the search charges it the relative error of a zero price.
    auto reduced = [&](const Eigen::VectorXd& y) {
        const auto v = f(embed(y));
        return v.value + v.n_skipped;
    };

    NelderMeadResult best{{}, INFINITY, 0, false};
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd y0(n);
        for (Eigen::Index i = 0; i < n; ++i) y0(i) = lo(i) + (hi(i) - lo(i)) * radical_inverse(s + 1, kPrimes[i]);
        const Eigen::VectorXd step = 0.1 * (hi - lo);
        auto run = nelder_mead(reduced, y0, step, lo, hi, tol, max_iter);
        if (run.value < best.value) best = std::move(run);
    }
    best.x = embed(best.x);
    const auto at_best = f(best.x);
    best.value = at_best.value;
    return {best, at_best.n_skipped};
}

}  // namespace

std::vector<OptionQuote> parse_quotes(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<OptionQuote> quotes;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) fields.push_back(cell);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (!header_seen) {
            if (fields.size() != 3 || trim(fields[0]) != "strike" || trim(fields[1]) != "maturity" ||
                trim(fields[2]) != "mid_price")
                parse_fail(line_no, "expected header 'strike,maturity,mid_price'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 3) parse_fail(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
        quotes.push_back({parse_field(fields[0], line_no, "strike"), parse_field(fields[1], line_no, "maturity"),
                          parse_field(fields[2], line_no, "mid_price")});
    }
    if (!header_seen) throw ParseError("missing header 'strike,maturity,mid_price'");
    if (quotes.empty()) throw ParseError("no quotes");
    return quotes;
}

std::vector<OptionQuote> load_quotes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("file not found: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_quotes(buffer.str());
}

ObjectiveValue objective_detail(const std::vector<OptionQuote>& quotes,
                                const std::function<double(const OptionQuote&)>& model_price)
{
    ObjectiveValue out{0.0, 0};
    for (const auto& q : quotes) {
        const double model = model_price(q);
        if (std::abs(model) < 1e-10) {
            ++out.n_skipped;
            continue;
        }
        const double rel = (q.mid_price - model) / q.mid_price;
        out.value += rel * rel;
    }
    return out;
}

double objective(const std::vector<OptionQuote>& quotes, double S0, double r, double sigma, double D_y)
{
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    return objective_detail(quotes, [&](const OptionQuote& q) {
               return price_closed_form_dividend(S0, q.strike, 0.0, q.maturity, r, sigma, D_y);
           }).value;
}

CalibrationResult calibrate_sigma_dy(const std::vector<OptionQuote>& quotes, double S0, double r,
                                     const CalibrationSettings& settings)
{
    if (quotes.size() < 2) throw ConfigurationError("at least 2 quotes are needed to identify (sigma, D_y)");
    std::set<double> strikes;
    for (const auto& q : quotes) {
        strikes.insert(q.strike);
        if (!(q.mid_price < S0)) throw DomainError("call quote at or above the spot price");
    }
    if (strikes.size() < 2) throw ConfigurationError("quotes need at least 2 distinct strikes to identify (sigma, D_y)");
    const auto& sb = settings.sigma_bounds;
    const auto& db = settings.dy_bounds;
    if (!(sb.lo > 0.0 && sb.lo <= sb.hi && db.lo <= db.hi)) throw DomainError("calibration bounds must be ordered, sigma > 0");
    if (!(settings.tol > 0.0)) throw DomainError("tol must be positive");

    auto f = [&](const Eigen::VectorXd& x) {
        return objective_detail(quotes, [&](const OptionQuote& q) {
            return price_closed_form_dividend(S0, q.strike, 0.0, q.maturity, r, x(0), x(1));
        });
    };
    const auto out = multistart(f, Eigen::Vector2d(sb.lo, db.lo), Eigen::Vector2d(sb.hi, db.hi), settings.tol,
                                settings.max_iter, settings.multistart);
    return {out.best.x(0), out.best.x(1), out.best.value, out.best.iterations, out.best.converged, out.n_skipped};
}

GenericCalibrationResult calibrate_generic(const std::vector<OptionQuote>& quotes, const QuotePricer& pricer,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           const GenericCalibrationSettings& settings)
{
    if (quotes.empty()) throw ConfigurationError("no quotes to calibrate against");
    if (!(settings.tol > 0.0)) throw DomainError("tol must be positive");
    auto f = [&](const Eigen::VectorXd& x) {
        return objective_detail(quotes, [&](const OptionQuote& q) { return pricer(x, q); });
    };
    const auto out = multistart(f, lower, upper, settings.tol, settings.max_iter, settings.multistart);
    bool edge = false;
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
        if (upper(k) > lower(k) && (out.best.x(k) <= lower(k) || out.best.x(k) >= upper(k))) edge = true;
    }
    return {out.best.x, out.best.value, out.best.iterations, out.best.converged, edge, out.n_skipped};
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             double tol, int max_iter)
{
    const Eigen::Index n = x0.size();
    auto clamp = [&](Eigen::VectorXd x) { return Eigen::VectorXd(x.cwiseMax(lower).cwiseMin(upper)); };
    auto eval = [&](const Eigen::VectorXd& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : INFINITY;
    };

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n) + 1, clamp(x0));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& v = simplex[static_cast<std::size_t>(i) + 1];
        v(i) += (v(i) + step(i) <= upper(i)) ? step(i) : -step(i);
        v = clamp(v);
    }
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);
    std::vector<std::size_t> order(simplex.size());

    auto size = [&] {
        double s = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i)
            s = std::max(s, (simplex[order[i]] - simplex[order[0]]).cwiseAbs().maxCoeff());
        return s;
    };

    int it = 0;
    bool converged = false;
    for (;; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        if (size() < tol) {
            converged = true;
            break;
        }
        if (it >= max_iter) break;

        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = clamp(centroid + (centroid - simplex[worst]));
        const double fr = eval(xr);
        if (fr < values[order[0]]) {
            const Eigen::VectorXd xe = clamp(centroid + 2.0 * (centroid - simplex[worst]));
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Eigen::VectorXd xc =
            outside ? clamp(centroid + 0.5 * (xr - centroid)) : clamp(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        const Eigen::VectorXd best = simplex[order[0]];
        for (std::size_t i = 1; i < order.size(); ++i) {
            auto& v = simplex[order[i]];
            v = best + 0.5 * (v - best);
            values[order[i]] = eval(v);
        }
    }
    return {simplex[order[0]], values[order[0]], it, converged};
}

}  // namespace greedfear
