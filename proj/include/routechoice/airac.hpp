#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace routechoice {

using Date = std::chrono::sys_days;

// "YYYY-MM-DD"; throws InvalidInput on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

struct AiracCycle {
    std::string id;  // YYCC
    Date start;
    Date end;  // exclusive, start + 28 days

    bool contains(Date d) const { return d >= start && d < end; }
};

// Cycle arithmetic anchored on any known cycle start date. Cycle ids number
// the cycles whose start falls in a calendar year, from 01.
class AiracCalendar {
public:
    static constexpr int kCycleDays = 28;

    explicit AiracCalendar(Date epoch = default_epoch()) : epoch_(epoch) {}

    static Date default_epoch();  // 2016-01-07, start of 1601

    AiracCycle cycle_of(Date d) const;
    AiracCycle cycle(std::string_view id) const;
    std::string id_of(Date d) const { return cycle_of(d).id; }
    Date epoch() const { return epoch_; }

private:
    Date first_start_in_year(int year) const;

    Date epoch_;
};

}  // namespace routechoice
