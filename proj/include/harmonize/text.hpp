#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace harmonize {

std::string_view trim(std::string_view s) noexcept;

/// Splits on `sep` and trims each piece. An all-blank input yields no pieces.
std::vector<std::string> split_trimmed(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Locale-independent decimal parse: optional sign, digits with an optional
/// period fraction, optional exponent. Surrounding whitespace is ignored.
/// Thousands separators, hex, inf and nan are rejected, as are values that
/// overflow a double. Underflow gives 0.
std::optional<double> parse_number(std::string_view s) noexcept;

/// Shortest text that parses back to the same double. Negative zero prints "0".
std::string format_number(double value);

/// Missing-cell rule shared by the engine, count_missing and summaries:
/// blank, "NA" or "NaN" after trimming. Case-sensitive.
bool is_missing(std::string_view raw) noexcept;

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace harmonize
