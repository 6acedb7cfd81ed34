#pragma once

#include "greedfear/distributions.hpp"
#include "greedfear/errors.hpp"
#include "greedfear/transforms.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace greedfear::cli {

/// Bad command line or argument combination; maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

/// {"family": "laplace", "m": 0, "b": 1} and so on; family names match family_name().
nlohmann::json to_json(const DistributionSpec& d);
/// Rejects unknown families, unknown keys and missing or non-numeric parameters with ParseError.
DistributionSpec distribution_from_json(const nlohmann::json& j);

/// {"family": "prelec", "delta": 1, "rho": 0.5}; composed ones carry "prior" and "post".
nlohmann::json to_json(const WeightingFunction& w);
WeightingFunction weighting_from_json(const nlohmann::json& j);

/// {"family": "tk", "alpha": ..}, {"family": "logform", ..} or {"family": "composed", "prior", "post"}.
nlohmann::json to_json(const ValueFunction& vf);
ValueFunction value_function_from_json(const nlohmann::json& j);

/// 12 significant digits, shortest form.
std::string format_number(double x);

/// CSV with a header row and `\n` line endings. Throws UsageError for an empty grid.
std::string emit_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// Runs one command (arguments without the program name). JSON goes to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 for usage or input errors, 2 for numeric or model failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace greedfear::cli
