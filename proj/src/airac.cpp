#include "routechoice/airac.hpp"

#include <charconv>
#include <cstdio>

#include "routechoice/error.hpp"

namespace routechoice {

using namespace std::chrono;

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidInput("invalid " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

// floor division for day offsets before the epoch
long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw InvalidInput("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const year_month_day ymd{year{parse_int(text.substr(0, 4), "year")},
                             month{static_cast<unsigned>(parse_int(text.substr(5, 2), "month"))},
                             day{static_cast<unsigned>(parse_int(text.substr(8, 2), "day"))}};
    if (!ymd.ok()) throw InvalidInput("invalid date '" + std::string(text) + "'");
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date AiracCalendar::default_epoch() { return sys_days{year{2016} / January / 7}; }

Date AiracCalendar::first_start_in_year(int y) const {
    const Date jan1 = sys_days{year{y} / January / 1};
    const long long offset = (jan1 - epoch_).count();
    const long long k = -floor_div(-offset, kCycleDays);  // ceil
    return epoch_ + days{k * kCycleDays};
}

AiracCycle AiracCalendar::cycle_of(Date d) const {
    const long long offset = (d - epoch_).count();
    const Date start = epoch_ + days{floor_div(offset, kCycleDays) * kCycleDays};
    const int y = static_cast<int>(year_month_day{start}.year());
    const long long n = (start - first_start_in_year(y)).count() / kCycleDays + 1;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d%02lld", y % 100, n);
    return AiracCycle{buf, start, start + days{kCycleDays}};
}

AiracCycle AiracCalendar::cycle(std::string_view id) const {
    if (id.size() != 4) throw InvalidInput("invalid AIRAC id '" + std::string(id) + "'");
    const int yy = parse_int(id.substr(0, 2), "AIRAC year");
    const int cc = parse_int(id.substr(2, 2), "AIRAC cycle");
    const int y = 2000 + yy;
    if (cc < 1) throw InvalidInput("invalid AIRAC id '" + std::string(id) + "'");
    const Date start = first_start_in_year(y) + days{(cc - 1) * kCycleDays};
    if (static_cast<int>(year_month_day{start}.year()) != y) {
        throw InvalidInput("AIRAC id '" + std::string(id) + "' does not exist");
    }
    return AiracCycle{std::string(id), start, start + days{kCycleDays}};
}

}  // namespace routechoice
