#pragma once

// nfrun/1 run files and nfdig/1 digit files.

#include "normality/construct.hpp"

#include <iosfwd>
#include <string>

namespace normality {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_run(std::ostream& out, const ConstructedReal& x);
ConstructedReal read_run(std::istream& in);

void write_digits(std::ostream& out, const DigitBlock& d);
DigitBlock read_digits(std::istream& in);

// Writes through a temporary file in the same directory and renames it into
// place, so a failed write never leaves a partial file. "-" means stdout.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);  // "-" means stdin

}  // namespace normality
