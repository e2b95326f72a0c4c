#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msgame/exact.hpp"
#include "msgame/model.hpp"

namespace msgame::cli {

/// Exit statuses of `run`.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;

/// Parameter names a family accepts, in grid order.
std::vector<std::string> family_parameters(const std::string& family);

/// Builds one instance of `family` from named parameter values. Parameters
/// not given take the family defaults. Throws ParseError or ValidationError.
Instance make_family_instance(const std::string& family, const std::map<std::string, std::string>& params);

struct SweepSpec {
    std::string family;
    /// Values per parameter; integer parameters also accept "a..b" ranges.
    std::map<std::string, std::vector<std::string>> grid;
    /// Any of greedy, optimal, poa, verify-bounds, spne. Greedy always runs.
    std::vector<std::string> operations{"greedy", "poa", "verify-bounds"};
    int precision = 6;
    std::optional<SearchLimits> limits;
};

struct SweepOutcome {
    std::string csv;
    std::size_t rows = 0;
    std::size_t failed_rows = 0;  ///< ceiling or bound violations
};

/// One CSV row per grid point, in lexicographic grid order (first parameter
/// slowest). Per-row solver refusals land in the status column. Throws
/// std::invalid_argument for an unknown family or an empty grid.
SweepOutcome sweep(const SweepSpec& spec);

/// Entry point for the command-line tool: simulate, optimal, spne, poa,
/// generate, verify-bounds, sweep. Returns 0 when the requested checks pass,
/// 1 when a check fails or a solver refuses, 2 on usage or parse errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace msgame::cli
