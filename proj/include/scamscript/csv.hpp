#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace scamscript::csv {

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string field(const std::string& text);

/// Fixed-point rendering; NaN and nullopt render as the empty string.
std::string number(double value, int decimals);
std::string number(const std::optional<double>& value, int decimals);

/// Writes one record terminated by "\n".
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Renders rows as a whitespace-aligned text table (first row is the header).
std::string aligned(const std::vector<std::vector<std::string>>& rows);

}  // namespace scamscript::csv
