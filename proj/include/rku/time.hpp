#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace rku {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

/// Injectable source of "now"; production code uses system_clock().
using Clock = std::function<Timestamp()>;

Clock system_clock();
Clock fixed_clock(Timestamp at);

/// "2016-05-20T08:30:00Z"
std::string format_iso8601(Timestamp t);
/// Accepts exactly the format produced by format_iso8601. Throws Error(Validation).
Timestamp parse_iso8601(std::string_view text);

Date date_of(Timestamp t);
Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                         int second = 0);

/// "20160520"
std::string format_compact_date(Date d);
/// Returns false when text is not 8 digits forming a valid calendar date.
bool parse_compact_date(std::string_view text, Date& out);

}  // namespace rku
