#include "greedfear/cli.hpp"

#include "greedfear/binomial_pricing.hpp"
#include "greedfear/calibration.hpp"
#include "greedfear/diffusion_pricing.hpp"
#include "greedfear/levy_pricing.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

namespace greedfear::cli {

using nlohmann::json;

namespace {

// Checks the key set of a spec object and pulls numeric parameters out of it.
class SpecReader {
public:
    SpecReader(const json& j, const char* what) : j_(j), what_(what)
    {
        if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
        if (!j.contains("family") || !j["family"].is_string())
            throw ParseError(std::string(what) + " needs a string 'family'");
        family_ = j["family"].get<std::string>();
    }

    const std::string& family() const { return family_; }

    double num(const char* key)
    {
        seen_.insert(key);
        if (!j_.contains(key)) throw ParseError(family_ + " " + what_ + " needs '" + key + "'");
        if (!j_[key].is_number()) throw ParseError(family_ + " " + what_ + ": '" + key + "' must be a number");
        return j_[key].get<double>();
    }

    const json& object(const char* key)
    {
        seen_.insert(key);
        if (!j_.contains(key)) throw ParseError(family_ + " " + what_ + " needs '" + key + "'");
        return j_[key];
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (key != "family" && !seen_.count(key))
                throw ParseError(family_ + " " + what_ + " has unknown key '" + key + "'");
        }
    }

private:
    const json& j_;
    std::string what_;
    std::string family_;
    std::set<std::string> seen_;
};

template <class T, class... Keys>
T build(SpecReader& r, Keys... keys)
{
    T value(r.num(keys)...);
    r.finish();
    return value;
}

json parse_json_text(const std::string& text, const char* flag)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(flag) + " is not valid JSON: " + e.what());
    }
}

json moments_json(const MomentSummary& m)
{
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"mean", opt(m.mean)},
            {"variance", opt(m.variance)},
            {"skewness", opt(m.skewness)},
            {"excess_kurtosis", opt(m.excess_kurtosis)}};
}

void flatten(const json& j, const std::string& prefix, std::vector<std::string>& keys, std::vector<std::string>& values)
{
    for (const auto& [key, value] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten(value, name, keys, values);
            continue;
        }
        keys.push_back(name);
        if (value.is_number()) values.push_back(format_number(value.get<double>()));
        else if (value.is_null()) values.emplace_back();
        else if (value.is_string()) values.push_back(value.get<std::string>());
        else values.push_back(value.dump());
    }
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void emit(const json& result, const std::string& format, std::ostream& out)
{
    if (format == "json") {
        out << result.dump() << "\n";
        return;
    }
    std::vector<std::string> keys, values;
    flatten(result, "", keys, values);
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << csv_escape(keys[i]);
    out << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << csv_escape(values[i]);
    out << "\n";
}

json coefficients_json(const DerivedCoefficients& c)
{
    return {{"r_invest", c.r_invest}, {"sharpe", c.sharpe},   {"sharpe_tau", c.sharpe_tau},
            {"div_yield", c.div_yield}, {"drift_R", c.drift_R}, {"reward_h", c.reward_h}};
}

std::function<double(double)> vanilla(double K, bool put)
{
    if (put) return [K](double s) { return std::max(K - s, 0.0); };
    return [K](double s) { return std::max(s - K, 0.0); };
}

}  // namespace

json to_json(const DistributionSpec& d)
{
    json j{{"family", family_name(d)}};
    std::visit(
        [&j](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Laplace>) j.update({{"m", f.m}, {"b", f.b}});
            else if constexpr (std::is_same_v<T, Logistic>) j.update({{"m", f.m}, {"rho", f.rho}});
            else if constexpr (std::is_same_v<T, Gumbel> || std::is_same_v<T, NegGumbel>)
                j.update({{"mu", f.mu}, {"rho", f.rho}});
            else if constexpr (std::is_same_v<T, DoublePareto>) j["rho"] = f.rho;
            else if constexpr (std::is_same_v<T, Cauchy>) j["c"] = f.c;
            else if constexpr (std::is_same_v<T, Gaussian>) j.update({{"mu", f.mu}, {"sigma", f.sigma}});
            else if constexpr (std::is_same_v<T, Weibull> || std::is_same_v<T, GenGamma>)
                j.update({{"gamma", f.gamma}, {"delta", f.delta}});
            else j.update({{"lo", f.lo}, {"hi", f.hi}});
        },
        d);
    return j;
}

DistributionSpec distribution_from_json(const json& j)
{
    SpecReader r(j, "distribution");
    const auto& f = r.family();
    if (f == "laplace") return build<Laplace>(r, "m", "b");
    if (f == "logistic") return build<Logistic>(r, "m", "rho");
    if (f == "gumbel") return build<Gumbel>(r, "mu", "rho");
    if (f == "neg_gumbel") return build<NegGumbel>(r, "mu", "rho");
    if (f == "double_pareto") return build<DoublePareto>(r, "rho");
    if (f == "cauchy") return build<Cauchy>(r, "c");
    if (f == "gaussian") return build<Gaussian>(r, "mu", "sigma");
    if (f == "weibull") return build<Weibull>(r, "gamma", "delta");
    if (f == "gen_gamma") return build<GenGamma>(r, "gamma", "delta");
    if (f == "uniform") return build<Uniform>(r, "lo", "hi");
    throw ParseError("unknown distribution family '" + f + "'");
}

json to_json(const WeightingFunction& w)
{
    json j{{"family", wpf_name(w)}};
    std::visit(
        [&j](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, TkWeighting>) j["gamma"] = f.gamma;
            else if constexpr (std::is_same_v<T, GoldsteinEinhorn>) j.update({{"gamma", f.gamma}, {"a", f.a}});
            else if constexpr (std::is_same_v<T, Prelec> || std::is_same_v<T, ModifiedPrelec>)
                j.update({{"delta", f.delta}, {"rho", f.rho}});
            else if constexpr (std::is_same_v<T, PrelecExpPower> || std::is_same_v<T, PrelecHyperLog>)
                j.update({{"gamma", f.gamma}, {"eta", f.eta}});
            else if constexpr (std::is_same_v<T, Luce>) j.update({{"alpha", f.alpha}, {"beta", f.beta}});
            else j.update({{"prior", to_json(f.prior)}, {"post", to_json(f.post)}});
        },
        w);
    return j;
}

WeightingFunction weighting_from_json(const json& j)
{
    SpecReader r(j, "weighting function");
    const auto& f = r.family();
    if (f == "tk") return build<TkWeighting>(r, "gamma");
    if (f == "goldstein_einhorn") return build<GoldsteinEinhorn>(r, "gamma", "a");
    if (f == "prelec") return build<Prelec>(r, "delta", "rho");
    if (f == "modified_prelec") return build<ModifiedPrelec>(r, "delta", "rho");
    if (f == "prelec_exp_power") return build<PrelecExpPower>(r, "gamma", "eta");
    if (f == "prelec_hyper_log") return build<PrelecHyperLog>(r, "gamma", "eta");
    if (f == "luce") return build<Luce>(r, "alpha", "beta");
    if (f == "composed") {
        auto prior = distribution_from_json(r.object("prior"));
        auto post = distribution_from_json(r.object("post"));
        r.finish();
        return wpf_from_cdfs(prior, post);
    }
    throw ParseError("unknown weighting family '" + f + "'");
}

json to_json(const ValueFunction& vf)
{
    json j{{"family", value_function_name(vf)}};
    std::visit(
        [&j](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, TkValue>)
                j.update({{"alpha", f.alpha}, {"beta", f.beta}, {"lambda", f.lambda}});
            else if constexpr (std::is_same_v<T, LogFormValue>)
                j.update({{"a", f.a}, {"c", f.c}, {"lambda", f.lambda}, {"nu", f.nu}});
            else j.update({{"prior", to_json(f.prior)}, {"post", to_json(f.post)}});
        },
        vf);
    return j;
}

ValueFunction value_function_from_json(const json& j)
{
    SpecReader r(j, "value function");
    const auto& f = r.family();
    if (f == "tk") return build<TkValue>(r, "alpha", "beta", "lambda");
    if (f == "logform") return build<LogFormValue>(r, "a", "c", "lambda", "nu");
    if (f == "composed") {
        auto prior = distribution_from_json(r.object("prior"));
        auto post = distribution_from_json(r.object("post"));
        r.finish();
        return value_function_from_cdfs(prior, post);
    }
    throw ParseError("unknown value-function family '" + f + "'");
}

std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string emit_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) throw UsageError("table grid is empty");
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw UsageError("table row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
    return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Behavioral option pricing: distributions, weighting functions, pricers and calibration", "greedfear"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "json";
    app.add_option("--out", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    // dist eval
    auto* dist = app.add_subcommand("dist", "Distribution queries")->require_subcommand(1);
    auto* dist_eval = dist->add_subcommand("eval", "Evaluate one function of a distribution");
    std::string spec_text, what;
    double x = 0.0;
    dist_eval->add_option("--spec", spec_text, "Distribution as JSON")->required();
    dist_eval->add_option("--what", what, "pdf, cdf, sf, quantile, cf, mgf or moments")
        ->required()
        ->check(CLI::IsMember({"pdf", "cdf", "sf", "quantile", "cf", "mgf", "moments"}));
    auto* dist_x = dist_eval->add_option("--x", x, "Argument (u for quantile, θ for cf, s for mgf)");

    // transform eval | table | stats | disposition
    auto* transform = app.add_subcommand("transform", "Value and weighting functions")->require_subcommand(1);
    std::string wpf_text, vf_text, prior_text;
    auto* tr_eval = transform->add_subcommand("eval", "Evaluate a weighting or value function");
    auto* ev_wpf = tr_eval->add_option("--wpf", wpf_text, "Weighting function as JSON");
    auto* ev_vf = tr_eval->add_option("--vf", vf_text, "Value function as JSON")->excludes(ev_wpf);
    tr_eval->add_option("--x", x, "Argument")->required();

    auto* tr_table = transform->add_subcommand("table", "Tabulate a weighting or value function");
    auto* tb_wpf = tr_table->add_option("--wpf", wpf_text, "Weighting function as JSON");
    auto* tb_vf = tr_table->add_option("--vf", vf_text, "Value function as JSON")->excludes(tb_wpf);
    int points = 99;
    double lo = -2.0, hi = 2.0;
    std::vector<double> grid;
    tr_table->add_option("--points", points, "Grid size: u = i/(points+1), or an even grid on [lo, hi] for --vf")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    tr_table->add_option("--lo", lo, "Left end of the value-function grid")->capture_default_str();
    tr_table->add_option("--hi", hi, "Right end of the value-function grid")->capture_default_str();
    tr_table->add_option("--grid", grid, "Explicit grid points")->delimiter(',');
    std::string table_format = "csv";
    tr_table->add_option("--out", table_format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    auto* tr_stats = transform->add_subcommand("stats", "Posterior mean, std and information ratio of w ∘ F");
    tr_stats->add_option("--wpf", wpf_text, "Weighting function as JSON")->required();
    tr_stats->add_option("--prior", prior_text, "Prior distribution as JSON")->required();
    auto* st_lo = tr_stats->add_option("--lo", lo, "Initial left end of the support window");
    auto* st_hi = tr_stats->add_option("--hi", hi, "Initial right end of the support window");

    auto* tr_disp = transform->add_subcommand("disposition", "Greedy, fearful, neutral or mixed");
    tr_disp->add_option("--wpf", wpf_text, "Weighting function as JSON")->required();

    // price ...
    auto* price = app.add_subcommand("price", "Option pricers")->require_subcommand(1);
    double s0 = 0, k = 0, r = 0, t = 0, m = 0, rho = 0, varrho = 0, sigma = 0, mu = 0, g = 0, a = 0;
    bool put = false;
    auto common = [&](CLI::App* c) {
        c->add_option("--s0", s0, "Spot price")->required();
        c->add_option("--k", k, "Strike")->required();
        c->add_option("--r", r, "Riskless rate")->required();
        c->add_option("--t", t, "Maturity")->required();
    };
    auto* p_ll = price->add_subcommand("levy-logistic", "Esscher price under a logistic Levy model");
    common(p_ll);
    p_ll->add_option("--m", m, "Location of L(1)")->required();
    p_ll->add_option("--rho", rho, "Scale of L(1)")->required();
    p_ll->add_flag("--put", put, "Price a put instead of a call");

    auto* p_ng = price->add_subcommand("levy-neggumbel", "Price under a negative-Gumbel Levy model");
    common(p_ng);
    p_ng->add_option("--varrho", varrho, "Scale of L(1)")->required();
    p_ng->add_flag("--put", put, "Price a put instead of a call");

    auto* p_bs = price->add_subcommand("greedfear-bs", "Closed-form greed-fear call");
    common(p_bs);
    p_bs->add_option("--sigma", sigma, "Volatility")->required();
    p_bs->add_option("--mu", mu, "Stock drift")->required();
    p_bs->add_option("--g", g, "Greed-fear functional, > -1")->required();

    auto* p_mc = price->add_subcommand("greedfear-mc", "Feynman-Kac Monte Carlo greed-fear price");
    common(p_mc);
    double mu_tau = NAN, sigma_tau = NAN, elasticity = 0.0;
    MonteCarloSettings mc;
    bool no_antithetic = false, gr_term = false;
    p_mc->add_option("--sigma", sigma, "Volatility at the spot")->required();
    p_mc->add_option("--mu", mu, "Stock drift")->required();
    p_mc->add_option("--g", g, "Greed-fear functional, > -1")->required();
    p_mc->add_option("--mu-tau", mu_tau, "Drift of the traded instrument (default (1+g)mu)");
    p_mc->add_option("--sigma-tau", sigma_tau, "Volatility of the traded instrument (default sigma)");
    p_mc->add_option("--elasticity", elasticity, "Both volatilities scale as (x/s0)^elasticity")->capture_default_str();
    p_mc->add_option("--paths", mc.n_paths, "Number of paths")->capture_default_str();
    p_mc->add_option("--steps", mc.n_steps, "Time steps")->capture_default_str();
    p_mc->add_option("--seed", mc.seed, "Random seed")->capture_default_str();
    p_mc->add_option("--workers", mc.workers, "Threads, 0 for all cores")->capture_default_str();
    p_mc->add_flag("--no-antithetic", no_antithetic, "Disable antithetic pairs");
    p_mc->add_flag("--include-gr-term", gr_term, "Add g*r to the dividend yield");
    p_mc->add_flag("--put", put, "Price a put instead of a call");

    auto* p_bin = price->add_subcommand("binomial", "Greed-fear binomial tree");
    common(p_bin);
    int n = 0;
    p_bin->add_option("--mu", mu, "Stock drift, above r")->required();
    p_bin->add_option("--sigma", sigma, "Volatility")->required();
    p_bin->add_option("--a", a, "Greed-fear coefficient")->required();
    p_bin->add_option("--n", n, "Number of steps")->required();
    p_bin->add_flag("--put", put, "Price a put instead of a call");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Fit model parameters to call quotes");
    std::string quotes_path, model = "bs-dy";
    int multistart = 8;
    cal->add_option("--quotes", quotes_path, "CSV with strike,maturity,mid_price")->required();
    cal->add_option("--s0", s0, "Spot price")->required();
    cal->add_option("--r", r, "Riskless rate")->required();
    cal->add_option("--model", model, "bs-dy or levy-logistic")
        ->check(CLI::IsMember({"bs-dy", "levy-logistic"}))
        ->capture_default_str();
    cal->add_option("--multistart", multistart, "Nelder-Mead starting points")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        json result;
        if (dist_eval->parsed()) {
            const auto d = distribution_from_json(parse_json_text(spec_text, "--spec"));
            if (what != "moments" && dist_x->count() == 0) throw UsageError("--x is required for --what " + what);
            if (what == "pdf") result = {{"value", pdf(d, x)}};
            else if (what == "cdf") result = {{"value", cdf(d, x)}};
            else if (what == "sf") result = {{"value", sf(d, x)}};
            else if (what == "quantile") result = {{"value", quantile(d, x)}};
            else if (what == "mgf") result = {{"value", mgf(d, x)}};
            else if (what == "cf") {
                const auto c = cf(d, x);
                result = {{"re", c.real()}, {"im", c.imag()}};
            } else result = moments_json(moments(d));
        } else if (tr_eval->parsed()) {
            if (ev_wpf->count()) result = {{"value", eval_wpf(weighting_from_json(parse_json_text(wpf_text, "--wpf")), x)}};
            else if (ev_vf->count())
                result = {{"value", eval_value_function(value_function_from_json(parse_json_text(vf_text, "--vf")), x)}};
            else throw UsageError("one of --wpf or --vf is required");
        } else if (tr_table->parsed()) {
            std::vector<std::vector<double>> rows;
            std::vector<std::string> header;
            if (tb_wpf->count()) {
                const auto w = weighting_from_json(parse_json_text(wpf_text, "--wpf"));
                if (grid.empty())
                    for (int i = 1; i <= points; ++i) grid.push_back(static_cast<double>(i) / (points + 1));
                for (double u : grid) rows.push_back({u, eval_wpf(w, u)});
                header = {"u", "w"};
            } else if (tb_vf->count()) {
                const auto vf = value_function_from_json(parse_json_text(vf_text, "--vf"));
                if (grid.empty()) {
                    if (!(hi > lo)) throw UsageError("--hi must exceed --lo");
                    for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
                }
                for (double v : grid) rows.push_back({v, eval_value_function(vf, v)});
                header = {"x", "v"};
            } else {
                throw UsageError("one of --wpf or --vf is required");
            }
            if (table_format == "csv") {
                out << emit_table(header, rows);
            } else {
                out << json{{"columns", header}, {"rows", rows}}.dump() << "\n";
            }
            return 0;
        } else if (tr_stats->parsed()) {
            const auto w = weighting_from_json(parse_json_text(wpf_text, "--wpf"));
            const auto prior = distribution_from_json(parse_json_text(prior_text, "--prior"));
            const SupportHint hint{st_lo->count() ? lo : quantile(prior, 1e-3), st_hi->count() ? hi : quantile(prior, 1.0 - 1e-3)};
            const auto s = posterior_stats(penalized_cdf(w, prior), hint);
            result = {{"mean", s.mean},
                      {"variance", s.variance},
                      {"std", s.std},
                      {"information_ratio", s.information_ratio ? json(*s.information_ratio) : json(nullptr)}};
        } else if (tr_disp->parsed()) {
            result = {{"disposition", to_string(classify_disposition(weighting_from_json(parse_json_text(wpf_text, "--wpf"))))}};
        } else if (p_ll->parsed()) {
            const LevyMarket market(LogisticLevy(m, rho), s0, r);
            const auto q = put ? price_logistic(market, EuropeanClaim(Put(k), t))
                               : price_logistic(market, EuropeanClaim(Call(k), t));
            result = {{"price", q.price}, {"h_q", q.parameter}, {"mass", q.mass}};
        } else if (p_ng->parsed()) {
            const LevyMarket market(NegGumbelLevy(0.0, varrho), s0, r);
            const auto q = put ? price_ecc_neggumbel(market, EuropeanClaim(Put(k), t))
                               : price_ecc_neggumbel(market, EuropeanClaim(Call(k), t));
            result = {{"price", q.price}, {"mu_q", q.parameter}, {"mass", q.mass}};
        } else if (p_bs->parsed()) {
            const auto spec = GreedFearDiffusionSpec::constant(mu, sigma, r, g);
            result = {{"price", price_call_closed_form(s0, k, 0.0, t, r, sigma, mu, g)},
                      {"coefficients", coefficients_json(derived_coefficients(spec, 0.0, s0))}};
        } else if (p_mc->parsed()) {
            auto spec = GreedFearDiffusionSpec::constant(mu, sigma, r, g);
            if (!std::isnan(mu_tau)) spec.mu_tau = [mu_tau](double, double) { return mu_tau; };
            const double sig_tau = std::isnan(sigma_tau) ? sigma : sigma_tau;
            const double e = elasticity, base = s0;
            spec.sigma = [sigma, e, base](double, double xx) { return sigma * std::pow(xx / base, e); };
            spec.sigma_tau = [sig_tau, e, base](double, double xx) { return sig_tau * std::pow(xx / base, e); };
            mc.antithetic = !no_antithetic;
            const auto res = price_fk_monte_carlo(spec, vanilla(k, put), 0.0, s0, t, mc, gr_term);
            result = {{"price", res.price},
                      {"std_error", res.std_error},
                      {"coefficients", coefficients_json(derived_coefficients(spec, 0.0, s0, gr_term))}};
        } else if (p_bin->parsed()) {
            const GreedFearBinomialSpec spec{s0, mu, sigma, r, a, n, t};
            const double p = price_binomial(spec, vanilla(k, put));
            const auto w = branch_weights(spec);
            result = {{"price", p},
                      {"n", n},
                      {"dy_implied_by_A", spec.implied_dividend_yield()},
                      {"probability_bounds", {{"up", w.up}, {"down", w.down}}}};
        } else if (cal->parsed()) {
            const auto quotes = load_quotes(quotes_path);
            if (model == "bs-dy") {
                CalibrationSettings settings;
                settings.multistart = multistart;
                const auto c = calibrate_sigma_dy(quotes, s0, r, settings);
                result = {{"model", model},          {"sigma_impl", c.sigma_impl},     {"dy_impl", c.dy_impl},
                          {"objective", c.objective}, {"n_iterations", c.n_iterations}, {"converged", c.converged},
                          {"n_skipped", c.n_skipped}};
                if (c.n_skipped) err << "warning: " << c.n_skipped << " quote(s) left out, model price below 1e-10\n";
            } else {
                EsscherLawCache cache;
                Eigen::VectorXd last;
                auto pricer = [&](const Eigen::VectorXd& p, const OptionQuote& o) {
                    if (last.size() != p.size() || last != p) {
                        cache.clear();
                        last = p;
                    }
                    const LevyMarket market(LogisticLevy(p(0), p(1)), s0, r);
                    return price_logistic(market, EuropeanClaim(Call(o.strike), o.maturity), cache).price;
                };
                GenericCalibrationSettings settings;
                settings.multistart = multistart;
                settings.tol = 1e-8;
                const auto c = calibrate_generic(quotes, pricer, Eigen::Vector2d(-0.5, 0.01), Eigen::Vector2d(0.5, 0.49),
                                                 settings);
                result = {{"model", model},          {"m", c.params(0)},
                          {"rho", c.params(1)},      {"objective", c.objective},
                          {"n_iterations", c.n_iterations}, {"converged", c.converged},
                          {"on_boundary", c.on_boundary},   {"n_skipped", c.n_skipped}};
                if (c.n_skipped) err << "warning: " << c.n_skipped << " quote(s) left out, model price below 1e-10\n";
            }
        }
        emit(result, format, out);
        return 0;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        const char* kind = dynamic_cast<const NumericError*>(&e)         ? "numeric"
                           : dynamic_cast<const ModelError*>(&e)         ? "model"
                           : dynamic_cast<const ConfigurationError*>(&e) ? "configuration"
                                                                         : "error";
        json diag{{"error", kind}, {"message", e.what()}};
        if (const auto* ne = dynamic_cast<const NumericError*>(&e)) {
            diag["partial_estimate"] = ne->partial_estimate();
            diag["error_estimate"] = ne->error_estimate();
        }
        out << diag.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace greedfear::cli
