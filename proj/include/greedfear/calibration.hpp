#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace greedfear {

struct OptionQuote {
    double strike;
    double maturity;
    double mid_price;
};

/// Reads a CSV with header `strike,maturity,mid_price`. Throws ParseError naming the line for a missing
/// file, malformed or non-positive fields, or a file without quotes.
std::vector<OptionQuote> load_quotes(const std::string& path);

/// Same, from text already in memory.
std::vector<OptionQuote> parse_quotes(const std::string& text);

struct Interval {
    double lo;
    double hi;
};

struct CalibrationSettings {
    Interval sigma_bounds{1e-4, 5.0};
    Interval dy_bounds{-1.0, 1.0};
    double tol = 1e-10;
    int max_iter = 2000;
    int multistart = 8;
};

struct CalibrationResult {
    double sigma_impl;
    double dy_impl;
    double objective;
    int n_iterations;
    bool converged;
    int n_skipped;  ///< quotes left out because the model price was below 1e-10
};

struct ObjectiveValue {
    double value;
    int n_skipped;
};

/// Σ ((C_market - C_model)/C_market)² over quotes whose model price is at least 1e-10 in size.
ObjectiveValue objective_detail(const std::vector<OptionQuote>& quotes,
                                const std::function<double(const OptionQuote&)>& model_price);

/// Relative squared error sum with model prices from the dividend-yield closed form.
double objective(const std::vector<OptionQuote>& quotes, double S0, double r, double sigma, double D_y);

/// Implied (σ, D_y) by bounded Nelder–Mead from a fixed multistart grid. Needs two quotes on distinct
/// strikes (ConfigurationError otherwise) and mid prices below S0 (DomainError otherwise).
CalibrationResult calibrate_sigma_dy(const std::vector<OptionQuote>& quotes, double S0, double r,
                                     const CalibrationSettings& settings = {});

/// Model price of one quote given a parameter vector.
using QuotePricer = std::function<double(const Eigen::VectorXd& params, const OptionQuote& quote)>;

struct GenericCalibrationSettings {
    double tol = 1e-10;
    int max_iter = 2000;
    int multistart = 8;
};

struct GenericCalibrationResult {
    Eigen::VectorXd params;
    double objective;
    int n_iterations;
    bool converged;
    bool on_boundary;  ///< some coordinate sits on the box edge
    int n_skipped;
};

/// The same driver over an arbitrary box [lower, upper]; coordinates with lower = upper stay fixed.
GenericCalibrationResult calibrate_generic(const std::vector<OptionQuote>& quotes, const QuotePricer& pricer,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           const GenericCalibrationSettings& settings = {});

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value;
    int iterations;
    bool converged;  ///< largest vertex distance from the best one fell below tol
};

/// Nelder–Mead with standard coefficients; trial points are clamped into [lower, upper].
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             double tol, int max_iter);

}  // namespace greedfear
