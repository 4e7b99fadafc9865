#pragma once

/*!
    \file
    \brief domain types and the exact annual compounding engine

    Rates are dimensionless fractions per year (0.01 is one percent). Fees are applied additively: a year with return r
    and fee eps grows the portfolio by 1 + r - eps.
*/

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace feedrag {

//! raised when an input lies outside the mathematical domain of an operation
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

//! raised for malformed text input; carries the 1-based line number, or 0 when not tied to a line
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

//! annual fractional rate, used for both returns and fees
class Rate {
public:
    constexpr Rate() = default;

    explicit Rate(double value) : value_(value)
    {
        if (!std::isfinite(value)) throw DomainError("rate must be a finite number");
    }

    [[nodiscard]] constexpr double value() const noexcept { return value_; }

    //! 1 + rate; the annual growth factor
    [[nodiscard]] constexpr double gross() const noexcept { return 1.0 + value_; }

    friend constexpr bool operator==(Rate, Rate) = default;
    friend constexpr auto operator<=>(Rate, Rate) = default;

private:
    double value_ = 0.0;
};

//! whole number of annual compounding periods
class Horizon {
public:
    constexpr Horizon() = default;

    explicit Horizon(long long years)
    {
        if (years < 0) throw DomainError("horizon must be a non-negative number of years");
        years_ = static_cast<int>(years);
        if (years_ != years) throw DomainError("horizon out of range");
    }

    [[nodiscard]] constexpr int years() const noexcept { return years_; }

    friend constexpr bool operator==(Horizon, Horizon) = default;
    friend constexpr auto operator<=>(Horizon, Horizon) = default;

private:
    int years_ = 0;
};

//! non-negative amount of currency
class Money {
public:
    constexpr Money() = default;

    explicit Money(double amount) : amount_(amount)
    {
        if (!std::isfinite(amount) || amount < 0.0) throw DomainError("money amount must be finite and non-negative");
    }

    [[nodiscard]] constexpr double amount() const noexcept { return amount_; }

    friend constexpr bool operator==(Money, Money) = default;

private:
    double amount_ = 0.0;
};

struct SeriesEntry {
    std::string label;
    Rate ret;
};

/*!
    ordered annual returns keyed by a unique year label

    Every entry keeps 1 + ret > 0. Labels may not contain separators that would break the CSV formats.
*/
class ReturnSeries {
public:
    ReturnSeries() = default;

    ReturnSeries(std::initializer_list<double> returns)
    {
        int year = 1;
        for (double r : returns) add(std::to_string(year++), Rate{r});
    }

    //! n copies of a constant return, labelled "1".."n"
    static ReturnSeries constant(Rate r, Horizon n)
    {
        ReturnSeries series;
        series.entries_.reserve(static_cast<std::size_t>(n.years()));
        for (int year = 1; year <= n.years(); ++year) series.add(std::to_string(year), r);
        return series;
    }

    void add(std::string label, Rate ret)
    {
        if (label.empty()) throw DomainError("year label must not be empty");
        if (label.find_first_of(",\r\n\"") != std::string::npos || label.front() == '#') {
            throw DomainError("year label '" + label + "' contains a reserved character");
        }
        if (ret.gross() <= 0.0) {
            throw DomainError("year " + label + ": return " + std::to_string(ret.value()) + " is -100% or worse");
        }
        if (!labels_.insert(label).second) throw DomainError("duplicate year label '" + label + "'");
        entries_.push_back({std::move(label), ret});
    }

    [[nodiscard]] const std::vector<SeriesEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

private:
    std::vector<SeriesEntry> entries_;
    std::unordered_set<std::string> labels_;
};

namespace detail {

inline void require_positive_gross(double gross, std::string_view what)
{
    if (!(gross > 0.0)) throw DomainError(std::string(what) + " must exceed -100% (gross factor " + std::to_string(gross) + ")");
}

//! turns -0.0 into +0.0
constexpr double unsigned_zero(double x) noexcept { return x + 0.0; }

} // namespace detail

//! (1 + r)^n
inline double compound_constant(Rate r, Horizon n)
{
    detail::require_positive_gross(r.gross(), "return rate");
    return std::pow(r.gross(), n.years());
}

/*!
    product over the series of (1 + ret - fee)

    Throws DomainError naming the first year whose net gross factor is not positive.
*/
inline double compound_series(const ReturnSeries& series, Rate fee)
{
    if (series.empty()) throw DomainError("return series is empty");
    double growth = 1.0;
    for (const auto& [label, ret] : series) {
        const double net = ret.gross() - fee.value();
        if (!(net > 0.0)) {
            throw DomainError("year " + label + ": net gross factor 1 + r - fee = " + std::to_string(net) + " is not positive");
        }
        growth *= net;
    }
    return growth;
}

} // namespace feedrag
