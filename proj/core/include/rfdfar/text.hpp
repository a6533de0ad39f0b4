#pragma once

// Small text helpers shared by the CSV readers and writers.

#include <string>
#include <string_view>
#include <vector>

namespace rfdfar::text {

/// Shortest decimal that parses back to exactly `v`. "inf", "-inf", "nan"
/// for non-finite values.
std::string format_double(double v);

/// Strict parse of a whole field; accepts the non-finite spellings above.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace rfdfar::text
