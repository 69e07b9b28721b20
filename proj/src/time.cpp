#include "rku/time.hpp"

#include <cctype>
#include <cstdio>

#include "rku/error.hpp"

namespace rku {

namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    value = value * 10 + (text[i] - '0');
  }
  out = value;
  return true;
}

}  // namespace

Clock system_clock() {
  return [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
}

Clock fixed_clock(Timestamp at) {
  return [at] { return at; };
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<seconds> tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

Timestamp parse_iso8601(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const bool shape = text.size() == 20 && read_digits(text, 0, 4, y) && text[4] == '-' &&
                     read_digits(text, 5, 2, mo) && text[7] == '-' && read_digits(text, 8, 2, d) &&
                     text[10] == 'T' && read_digits(text, 11, 2, h) && text[13] == ':' &&
                     read_digits(text, 14, 2, mi) && text[16] == ':' &&
                     read_digits(text, 17, 2, s) && text[19] == 'Z';
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!shape || !date.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::Validation, "malformed timestamp: " + std::string(text));
  }
  return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

Date date_of(Timestamp t) { return Date{std::chrono::floor<std::chrono::days>(t)}; }

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  using namespace std::chrono;
  const sys_days d{
      year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}};
  return d + hours{hour} + minutes{minute} + seconds{second};
}

std::string format_compact_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

bool parse_compact_date(std::string_view text, Date& out) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 8 || !read_digits(text, 0, 4, y) || !read_digits(text, 4, 2, m) ||
      !read_digits(text, 6, 2, d)) {
    return false;
  }
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return false;
  out = date;
  return true;
}

}  // namespace rku
