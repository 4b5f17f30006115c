// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/common/time.hpp"

#include <cstdio>

#include "modelselect/common/error.hpp"

namespace modelselect {

using namespace std::chrono;

Timestamp parse_timestamp(std::string_view iso)
{
    std::string s(iso);
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    int h = 0;
    int mi = 0;
    int sec = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) {
        throw Error("invalid timestamp: '" + s + "'");
    }
    if (s.size() > 10) {
        int rest = 0;
        if ((s[10] != 'T' && s[10] != ' ') ||
            std::sscanf(s.c_str() + 11, "%2d:%2d:%2d%n", &h, &mi, &sec, &rest) != 3 || rest != 8) {
            throw Error("invalid timestamp: '" + s + "'");
        }
        std::string_view tail = std::string_view(s).substr(19);
        if (!tail.empty() && tail.front() == '.') {
            tail.remove_prefix(1);
            while (!tail.empty() && tail.front() >= '0' && tail.front() <= '9') {
                tail.remove_prefix(1);
            }
        }
        if (!(tail.empty() || tail == "Z" || tail == "+00:00")) {
            throw Error("invalid timestamp (only UTC accepted): '" + s + "'");
        }
    }
    year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) {
        throw Error("invalid timestamp: '" + s + "'");
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string format_timestamp(Timestamp t)
{
    auto day_point = floor<days>(t);
    year_month_day ymd{day_point};
    hh_mm_ss hms{t - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Timestamp subtract_months(Timestamp t, int months_back)
{
    auto day_point = floor<days>(t);
    auto time_of_day = t - day_point;
    year_month_day ymd{day_point};
    year_month target_ym = year_month{ymd.year(), ymd.month()} - months{months_back};
    auto last = year_month_day_last{target_ym.year(), month_day_last{target_ym.month()}}.day();
    day dd = ymd.day() > last ? last : ymd.day();
    return sys_days{year_month_day{target_ym.year(), target_ym.month(), dd}} + time_of_day;
}

}  // namespace modelselect
