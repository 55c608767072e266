#include "trajdw/timeutil.hpp"

#include <cstdio>

namespace trajdw::timeutil {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yy = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yy + (m <= 2);
}

std::int64_t parse_iso8601_utc(const std::string& text) {
    int y, mo, d, h, mi, s;
    char z;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 ||
        z != 'Z')
        throw BadTimestamp("expected YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60)
        throw BadTimestamp("timestamp field out of range in '" + text + "'");
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t sod = epoch_s % 86400;
    if (sod < 0) {
        sod += 86400;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(sod / 3600), static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

namespace {

unsigned iso_weekday(std::int64_t days) {
    // 1970-01-01 was a Thursday (ISO weekday 4)
    std::int64_t wd = (days + 3) % 7;
    if (wd < 0) wd += 7;
    return static_cast<unsigned>(wd) + 1;
}

unsigned iso_week_number(int y, unsigned m, unsigned d) {
    const std::int64_t days = days_from_civil(y, m, d);
    const std::int64_t jan1 = days_from_civil(y, 1, 1);
    const unsigned doy = static_cast<unsigned>(days - jan1) + 1;
    const unsigned wd = iso_weekday(days);
    const int week = (static_cast<int>(doy) - static_cast<int>(wd) + 10) / 7;
    if (week < 1) return iso_week_number(y - 1, 12, 31);
    if (week == 53) {
        // week 53 exists only if Dec 31 falls on Thu/Fri/Sat of a long year
        const unsigned wd_dec31 = iso_weekday(days_from_civil(y, 12, 31));
        if (wd_dec31 < 4) return 1;
    }
    return static_cast<unsigned>(week);
}

}  // namespace

CivilTime civil_time(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t sod = epoch_s % 86400;
    if (sod < 0) {
        sod += 86400;
        --days;
    }
    CivilTime c{};
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<unsigned>(sod / 3600);
    c.minute = static_cast<unsigned>(sod / 60 % 60);
    c.second = static_cast<unsigned>(sod % 60);
    c.weekday = iso_weekday(days);
    c.iso_week = iso_week_number(c.year, c.month, c.day);
    c.quarter = (c.month - 1) / 3 + 1;
    return c;
}

std::string season_name(unsigned month, Hemisphere hemi) {
    // northern meteorological mapping; shift by 6 months for the south
    unsigned m = month;
    if (hemi == Hemisphere::South) m = (month + 6 - 1) % 12 + 1;
    if (m == 12 || m <= 2) return "Winter";
    if (m <= 5) return "Spring";
    if (m <= 8) return "Summer";
    return "Fall";
}

std::string day_type(unsigned weekday) { return weekday >= 6 ? "WeekEndDay" : "WeekDay"; }

}  // namespace trajdw::timeutil
