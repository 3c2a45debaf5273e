#pragma once

// nfconstruct command surface. run_cli is the whole program minus process
// setup, so tests can drive it with in-memory streams.

#include "normality/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nfcli {

enum ExitCode { kOk = 0, kCounterexample = 1, kInput = 2, kLemma = 3, kBudget = 4 };

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// 12 significant digits, round-half-even, plain positional notation.
std::string format_decimal(const normality::Rational& q, int significant = 12);

// Analysis checkpoints up to total (always ending at total when total > 0).
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t total, std::uint64_t start, std::uint64_t ratio);
std::vector<std::uint64_t> linear_checkpoints(std::uint64_t total, std::uint64_t step);

// `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace nfcli
