// Day-resolution calendar dates and year-month arithmetic.
#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace embers {

namespace detail {

// Howard Hinnant's civil-date algorithms (public domain).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

}  // namespace detail

class DateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A calendar date stored as days since 1970-01-01.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day)
        : days_(detail::days_from_civil(year, month, day)) {
        if (month < 1 || month > 12 || day < 1 || day > 31)
            throw DateError("invalid date components");
    }

    static Date from_days(std::int64_t d) {
        Date out;
        out.days_ = d;
        return out;
    }

    // Parses "YYYY-MM-DD"; a trailing time-of-day part is ignored.
    static Date parse(const std::string& s) {
        int y = 0;
        unsigned m = 0, d = 0;
        if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
            throw DateError("cannot parse date: '" + s + "'");
        if (m < 1 || m > 12 || d < 1 || d > 31)
            throw DateError("date out of range: '" + s + "'");
        return Date(y, m, d);
    }

    std::int64_t days_since_epoch() const { return days_; }

    int year() const {
        int y; unsigned m, d;
        detail::civil_from_days(days_, y, m, d);
        return y;
    }
    unsigned month() const {
        int y; unsigned m, d;
        detail::civil_from_days(days_, y, m, d);
        return m;
    }
    unsigned day() const {
        int y; unsigned m, d;
        detail::civil_from_days(days_, y, m, d);
        return d;
    }

    std::string to_string() const {
        int y; unsigned m, d;
        detail::civil_from_days(days_, y, m, d);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
        return buf;
    }

    Date plus_days(std::int64_t n) const { return from_days(days_ + n); }

    friend std::int64_t operator-(Date a, Date b) { return a.days_ - b.days_; }
    friend bool operator==(Date a, Date b) { return a.days_ == b.days_; }
    friend bool operator!=(Date a, Date b) { return a.days_ != b.days_; }
    friend bool operator<(Date a, Date b) { return a.days_ < b.days_; }
    friend bool operator<=(Date a, Date b) { return a.days_ <= b.days_; }
    friend bool operator>(Date a, Date b) { return a.days_ > b.days_; }
    friend bool operator>=(Date a, Date b) { return a.days_ >= b.days_; }

private:
    std::int64_t days_ = 0;
};

// A calendar month, e.g. "2014-02".
struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    YearMonth() = default;
    YearMonth(int y, unsigned m) : year(y), month(m) {
        if (m < 1 || m > 12) throw DateError("invalid month");
    }

    static YearMonth parse(const std::string& s) {
        int y = 0;
        unsigned m = 0;
        if (std::sscanf(s.c_str(), "%d-%u", &y, &m) != 2 || m < 1 || m > 12)
            throw DateError("cannot parse month: '" + s + "'");
        return YearMonth(y, m);
    }

    static YearMonth of(Date d) { return YearMonth(d.year(), d.month()); }

    YearMonth prev() const {
        return month == 1 ? YearMonth(year - 1, 12) : YearMonth(year, month - 1);
    }
    YearMonth next() const {
        return month == 12 ? YearMonth(year + 1, 1) : YearMonth(year, month + 1);
    }

    Date first_day() const { return Date(year, month, 1); }
    Date last_day() const { return next().first_day().plus_days(-1); }
    int days_in_month() const {
        return static_cast<int>(next().first_day() - first_day());
    }
    bool contains(Date d) const {
        return d.year() == year && d.month() == month;
    }

    std::string to_string() const {
        char buf[12];
        std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
        return buf;
    }

    friend bool operator==(YearMonth a, YearMonth b) {
        return a.year == b.year && a.month == b.month;
    }
    friend bool operator!=(YearMonth a, YearMonth b) { return !(a == b); }
    friend bool operator<(YearMonth a, YearMonth b) {
        return a.year != b.year ? a.year < b.year : a.month < b.month;
    }
};

}  // namespace embers
