#include "ethoscan/time.hpp"

#include <cstdio>

#include "ethoscan/errors.hpp"

namespace ethoscan {
namespace {

using namespace std::chrono;

bool read_digits(std::string_view text, size_t pos, size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (size_t i = pos; i < pos + count; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

bool parse_ymd(std::string_view text, sys_days& out) {
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return false;
  if (!read_digits(text, 0, 4, y) || !read_digits(text, 5, 2, m) || !read_digits(text, 8, 2, d)) {
    return false;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = sys_days{ymd};
  return true;
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw Error(ErrorCode::kFormat, std::string("malformed ") + std::string(what) + ": '" +
                                      std::string(text) + "'");
}

}  // namespace

bool try_parse_date(std::string_view text, Date& out) {
  sys_days d;
  if (text.size() != 10 || !parse_ymd(text, d)) return false;
  out = Date{d};
  return true;
}

Date parse_date(std::string_view text) {
  Date d;
  if (!try_parse_date(text, d)) bad("date", text);
  return d;
}

Timestamp parse_timestamp(std::string_view text) {
  sys_days day_part;
  if (!parse_ymd(text, day_part) || text.size() < 19 || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    bad("timestamp", text);
  }
  int hh = 0, mm = 0, ss = 0;
  if (!read_digits(text, 11, 2, hh) || !read_digits(text, 14, 2, mm) ||
      !read_digits(text, 17, 2, ss) || hh > 23 || mm > 59 || ss > 60) {
    bad("timestamp", text);
  }
  size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  int offset_minutes = 0;
  if (pos == text.size()) bad("timestamp (missing zone)", text);
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh = 0, om = 0;
    bool colon = pos + 3 < text.size() && text[pos + 3] == ':';
    if (!read_digits(text, pos + 1, 2, oh) || !read_digits(text, pos + (colon ? 4 : 3), 2, om)) {
      bad("timestamp offset", text);
    }
    offset_minutes = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
    pos += colon ? 6 : 5;
  } else {
    bad("timestamp", text);
  }
  if (pos != text.size()) bad("timestamp", text);
  sys_seconds local = sys_seconds{day_part} + hours{hh} + minutes{mm} + seconds{ss};
  return Timestamp{local - minutes{offset_minutes}};
}

std::string format_date(Date d) {
  year_month_day ymd{d.days};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  auto day_part = floor<days>(t.seconds);
  hh_mm_ss<seconds> tod{t.seconds - day_part};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
  return format_date(Date{day_part}) + buf;
}

long long days_between(Date from, Date to) { return (to.days - from.days).count(); }

Date today_utc() { return Date{floor<days>(system_clock::now())}; }

}  // namespace ethoscan
