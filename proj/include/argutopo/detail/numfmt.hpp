#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace argutopo::detail {

/// Fixed-precision rendering: 17 significant digits for double,
/// 9 for float. Both round-trip exactly through `parse_real`.
template <typename Real>
std::string format_real(Real value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                                    std::numeric_limits<Real>::max_digits10);
  return std::string(buf, result.ptr);
}

/// Shortest decimal that parses back to exactly `value`.
template <typename Real>
std::string format_shortest(Real value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

/// Parses the whole of `text` as a decimal real. Returns nullopt on junk,
/// trailing characters, or out-of-range values. A leading '+' is accepted.
template <typename Real>
std::optional<Real> parse_real(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  Real value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) return std::nullopt;
  return value;
}

}  // namespace argutopo::detail
