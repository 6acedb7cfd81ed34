#include "greedfear/binomial_pricing.hpp"
#include "greedfear/cli.hpp"
#include "greedfear/diffusion_pricing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace greedfear;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
    json parsed() const { return json::parse(out); }
};

Outcome run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, DistEvalLaplaceCdf)
{
    const auto r = run_cli({"dist", "eval", "--spec", R"({"family":"laplace","m":0,"b":1})", "--what", "cdf", "--x", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.parsed(), json({{"value", 0.5}}));
}

TEST(Cli, DistEvalMomentsAndCf)
{
    auto r = run_cli({"dist", "eval", "--spec", R"({"family":"cauchy","c":1})", "--what", "moments"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.parsed()["mean"].is_null());
    r = run_cli({"dist", "eval", "--spec", R"({"family":"gaussian","mu":0,"sigma":1})", "--what", "cf", "--x", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.parsed()["re"].get<double>(), std::exp(-0.5), 1e-15);
    r = run_cli({"dist", "eval", "--spec", R"({"family":"gaussian","mu":0,"sigma":1})", "--what", "pdf"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, BinomialExample)
{
    const auto r = run_cli({"price", "binomial", "--s0", "100", "--k", "100", "--mu", "0.10", "--r", "0.05", "--sigma",
                            "0.2", "--t", "1", "--a", "0", "--n", "2000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.parsed();
    EXPECT_NEAR(j["price"].get<double>(), 10.45, 0.02);
    EXPECT_EQ(j["n"].get<int>(), 2000);
    EXPECT_EQ(j["dy_implied_by_A"].get<double>(), 0.0);
    EXPECT_NEAR(j["probability_bounds"]["up"].get<double>() + j["probability_bounds"]["down"].get<double>(), 1.0, 1e-15);
}

TEST(Cli, BinomialTooCoarseIsModelFailure)
{
    const auto r = run_cli({"price", "binomial", "--s0", "100", "--k", "100", "--mu", "0.10", "--r", "0.05", "--sigma",
                            "0.2", "--t", "1", "--a", "50", "--n", "10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.parsed()["error"], "configuration");
    EXPECT_NE(r.parsed()["message"].get<std::string>().find("163"), std::string::npos);
}

TEST(Cli, CalibrateMissingFile)
{
    const auto r = run_cli({"calibrate", "--quotes", "missing.csv", "--s0", "100", "--r", "0.05"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("file not found"), std::string::npos) << r.err;
}

TEST(Cli, CalibrateFromFile)
{
    const auto path = (std::filesystem::temp_directory_path() / "gf_cli_quotes.csv").string();
    {
        std::ofstream f(path);
        f << "strike,maturity,mid_price\n";
        f.precision(17);
        for (double K : {85.0, 95.0, 100.0, 105.0, 115.0})
            f << K << ",0.5," << price_closed_form_dividend(100.0, K, 0.0, 0.5, 0.04, 0.3, 0.02) << "\n";
    }
    const auto r = run_cli({"calibrate", "--quotes", path, "--s0", "100", "--r", "0.04"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.parsed();
    EXPECT_NEAR(j["sigma_impl"].get<double>(), 0.3, 1e-6);
    EXPECT_NEAR(j["dy_impl"].get<double>(), 0.02, 1e-6);
    EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(Cli, GreedFearClosedFormAndMonteCarlo)
{
    auto r = run_cli({"price", "greedfear-bs", "--s0", "100", "--k", "100", "--r", "0.05", "--sigma", "0.2", "--mu",
                      "0.1", "--g", "0.1", "--t", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const double closed = r.parsed()["price"].get<double>();
    EXPECT_DOUBLE_EQ(closed, price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.1, 0.1));
    EXPECT_NEAR(r.parsed()["coefficients"]["drift_R"].get<double>(), 0.045, 1e-15);

    const std::vector<std::string> mc{"price", "greedfear-mc", "--s0", "100", "--k", "100", "--r", "0.05", "--sigma",
                                      "0.2", "--mu", "0.1", "--g", "0.1", "--t", "1", "--paths", "40000", "--seed", "7"};
    r = run_cli(mc);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.parsed();
    EXPECT_LT(std::abs(j["price"].get<double>() - closed), 4.0 * j["std_error"].get<double>());
    EXPECT_EQ(run_cli(mc).out, r.out);
}

TEST(Cli, LevyPricers)
{
    auto r = run_cli({"price", "levy-logistic", "--s0", "100", "--k", "100", "--r", "0.05", "--m", "0.02", "--rho", "0.12",
                      "--t", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GT(r.parsed()["price"].get<double>(), 0.0);
    r = run_cli({"price", "levy-logistic", "--s0", "100", "--k", "100", "--r", "0.05", "--m", "0.02", "--rho", "0.6",
                 "--t", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.out)["error"], "model");
    r = run_cli({"price", "levy-neggumbel", "--s0", "100", "--k", "100", "--r", "0.05", "--varrho", "0.15", "--t", "1",
                 "--put"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GT(r.parsed()["price"].get<double>(), 0.0);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"price", "binomial", "--s0", "100"}).code, 1);
    EXPECT_EQ(run_cli({"dist", "eval", "--spec", R"({"family":"laplace","m":0,"b":1})", "--what", "cdf", "--x", "0",
                       "--unknown", "1"})
                  .code,
              1);
    EXPECT_EQ(run_cli({"dist", "eval", "--spec", R"({"family":"laplace","m":0,"b":1,"z":2})", "--what", "cdf", "--x", "0"})
                  .code,
              1);
    EXPECT_EQ(run_cli({"dist", "eval", "--spec", R"({"family":"nope"})", "--what", "cdf", "--x", "0"}).code, 1);
    EXPECT_EQ(run_cli({"dist", "eval", "--spec", "{not json", "--what", "cdf", "--x", "0"}).code, 1);
    EXPECT_EQ(run_cli({"dist", "eval", "--spec", R"({"family":"laplace","m":0,"b":-1})", "--what", "cdf", "--x", "0"})
                  .code,
              1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, CsvOutput)
{
    const auto r = run_cli({"--out", "csv", "dist", "eval", "--spec", R"({"family":"logistic","m":0,"rho":1})", "--what",
                            "cdf", "--x", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], "value");
    EXPECT_EQ(l[1], cli::format_number(1.0 / (1.0 + std::exp(-1.0))));
    EXPECT_EQ(cli::format_number(1.0 / 3.0), "0.333333333333");
}

TEST(Cli, TransformTables)
{
    auto r = run_cli({"transform", "table", "--wpf", R"({"family":"tk","gamma":0.5})", "--points", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 6u);
    EXPECT_EQ(lines(r.out)[0], "u,w");

    r = run_cli({"transform", "table", "--wpf", R"({"family":"prelec","delta":1,"rho":1})", "--points", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (std::size_t i = 1; i < lines(r.out).size(); ++i) {
        const auto& l = lines(r.out)[i];
        const auto comma = l.find(',');
        EXPECT_EQ(std::stod(l.substr(0, comma)), std::stod(l.substr(comma + 1))) << l;
    }

    const double e1 = std::exp(-1.0);
    const auto w = Prelec(1.0, 0.5);
    const auto table = cli::emit_table({"u", "w"}, {{e1, eval_wpf(w, e1)}});
    EXPECT_EQ(lines(table)[1], cli::format_number(e1) + "," + cli::format_number(e1));
    EXPECT_THROW(cli::emit_table({"u", "w"}, {}), cli::UsageError);

    r = run_cli({"transform", "table", "--vf", R"({"family":"tk","alpha":0.88,"beta":0.88,"lambda":2.25})", "--points",
                 "3", "--lo", "-1", "--hi", "1", "--out", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.parsed()["rows"][0][1].get<double>(), -2.25, 1e-15);
}

TEST(Cli, TransformEvalStatsDisposition)
{
    auto r = run_cli({"transform", "eval", "--wpf", R"({"family":"prelec","delta":1,"rho":0.5})", "--x", "0.36787944117144233"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.parsed()["value"].get<double>(), std::exp(-1.0), 1e-15);
    r = run_cli({"transform", "eval", "--wpf", R"({"family":"tk","gamma":0.5})", "--x", "1.5"});
    EXPECT_EQ(r.code, 1);
    r = run_cli({"transform", "stats", "--wpf", R"({"family":"tk","gamma":0.5})", "--prior",
                 R"({"family":"uniform","lo":-1,"hi":1})"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.parsed()["mean"].get<double>(), 0.24645, 5e-4);
    r = run_cli({"transform", "disposition", "--wpf", R"({"family":"tk","gamma":0.61})"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.parsed()["disposition"], "fearful");
}

TEST(Serialization, DistributionsRoundTrip)
{
    const std::vector<DistributionSpec> specs{Laplace(0.1, 2.0),  Logistic(-1.0, 0.5), Gumbel(0.0, 1.5),
                                              NegGumbel(0.2, 0.3), DoublePareto(2.5),  Cauchy(0.7),
                                              Gaussian(1.0, 2.0),  Weibull(0.8, 1.2),  GenGamma(0.5, 2.0),
                                              Uniform(-1.0, 3.0)};
    for (const auto& d : specs) {
        const auto j = cli::to_json(d);
        const auto back = cli::distribution_from_json(json::parse(j.dump()));
        EXPECT_EQ(cli::to_json(back), j);
        EXPECT_EQ(back.index(), d.index());
    }
}

TEST(Serialization, WeightingAndValueRoundTrip)
{
    const std::vector<WeightingFunction> ws{TkWeighting(0.61),       GoldsteinEinhorn(0.7, 1.5), Prelec(1.2, 0.65),
                                            ModifiedPrelec(0.9, 0.8), PrelecExpPower(0.5, 0.4),  PrelecHyperLog(0.5, 2.0),
                                            Luce(0.7, 1.1),
                                            wpf_from_cdfs(Logistic(0.0, 1.0), Logistic(0.5, 2.0))};
    for (const auto& w : ws) {
        const auto j = cli::to_json(w);
        const auto back = cli::weighting_from_json(json::parse(j.dump()));
        EXPECT_EQ(cli::to_json(back), j);
        EXPECT_DOUBLE_EQ(eval_wpf(back, 0.3), eval_wpf(w, 0.3));
    }
    const std::vector<ValueFunction> vs{TkValue(0.88, 0.88, 2.25), LogFormValue(0.5, 0.1, 1.5, 0.2),
                                        value_function_from_cdfs(Laplace(0.0, 1.0), Gaussian(0.0, 1.0))};
    for (const auto& v : vs) {
        const auto j = cli::to_json(v);
        const auto back = cli::value_function_from_json(json::parse(j.dump()));
        EXPECT_EQ(cli::to_json(back), j);
        EXPECT_DOUBLE_EQ(eval_value_function(back, 0.7), eval_value_function(v, 0.7));
    }
}
