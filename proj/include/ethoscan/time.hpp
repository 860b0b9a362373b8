#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace ethoscan {

/// Calendar day in UTC.
struct Date {
  std::chrono::sys_days days{};

  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;
};

/// Second-resolution UTC instant.
struct Timestamp {
  std::chrono::sys_seconds seconds{};

  Date date() const { return Date{std::chrono::floor<std::chrono::days>(seconds)}; }

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// Throws Error(kFormat) on malformed input.
Date parse_date(std::string_view text);
// Accepts `YYYY-MM-DDTHH:MM:SS` followed by `Z`, `+HH:MM` or `-HH:MM`, with
// optional fractional seconds; the result is normalized to UTC.
Timestamp parse_timestamp(std::string_view text);

bool try_parse_date(std::string_view text, Date& out);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);  // always `...Z`

/// Signed number of days from `from` to `to`.
long long days_between(Date from, Date to);

Date today_utc();

}  // namespace ethoscan
