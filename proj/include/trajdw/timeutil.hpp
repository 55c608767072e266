#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trajdw::timeutil {

struct BadTimestamp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Broken-down UTC instant plus the derived warehouse levels.
struct CivilTime {
    int year;
    unsigned month;   // 1..12
    unsigned day;     // 1..31
    unsigned hour;
    unsigned minute;
    unsigned second;
    unsigned iso_week;     // 1..53
    unsigned weekday;      // 1 = Monday .. 7 = Sunday
    unsigned quarter;      // 1..4
};

enum class Hemisphere { North, South };

std::int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

/// Parses `YYYY-MM-DDTHH:MM:SSZ` to seconds since the Unix epoch.
std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t epoch_s);

CivilTime civil_time(std::int64_t epoch_s);

/// Meteorological seasons; the southern hemisphere is shifted by two quarters.
std::string season_name(unsigned month, Hemisphere hemi);
std::string day_type(unsigned weekday);  // WeekDay / WeekEndDay

}  // namespace trajdw::timeutil
