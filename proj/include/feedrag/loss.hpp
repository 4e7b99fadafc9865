#pragma once

/*!
    \file
    \brief exact fractional loss to fees and its first- and second-order approximations

    The true loss compares a portfolio compounding at r - eps with one compounding at r, normalised by the fee-free
    value. The approximations expand the fee-bearing value in powers of eps around r.
*/

#include <feedrag/core.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <variant>

namespace feedrag {

/*!
    1 - ((1 + r - eps) / (1 + r))^n

    Negative eps is accepted and yields a negative loss, i.e. the fractional gain from a higher return. Evaluated through
    log1p/expm1 so small fees keep full relative precision.
*/
inline double true_loss_constant(Rate r, Rate eps, Horizon n)
{
    detail::require_positive_gross(r.gross(), "return rate");
    detail::require_positive_gross(r.gross() - eps.value(), "net return rate r - eps");
    const double per_year = std::log1p(-eps.value() / r.gross());
    return detail::unsigned_zero(-std::expm1(n.years() * per_year));
}

//! 1 - compound_series(series, eps) / compound_series(series, 0)
inline double true_loss_series(const ReturnSeries& series, Rate eps)
{
    // validates every year and reports the offending label
    compound_series(series, eps);
    double log_ratio = 0.0;
    for (const auto& entry : series) log_ratio += std::log1p(-eps.value() / entry.ret.gross());
    return detail::unsigned_zero(-std::expm1(log_ratio));
}

//! n * eps; unbounded, so it can exceed 1 where the true loss saturates
inline double approx_loss_l1(Rate eps, Horizon n) { return detail::unsigned_zero(n.years() * eps.value()); }

//! n * eps * (1 - r)
inline double approx_loss_l1_improved(Rate r, Rate eps, Horizon n)
{
    return detail::unsigned_zero(n.years() * eps.value() * (1.0 - r.value()));
}

/*!
    loss from the expansion of (1 + r - eps)^n truncated after the eps^2 term:
    n eps / (1 + r) - n (n - 1) eps^2 / (2 (1 + r)^2)
*/
inline double approx_loss_l2(Rate r, Rate eps, Horizon n)
{
    detail::require_positive_gross(r.gross(), "return rate");
    const double x = eps.value() / r.gross();
    const double years = n.years();
    return detail::unsigned_zero(years * x - 0.5 * years * (years - 1.0) * x * x);
}

/*!
    approximate fractional value gain n * eps from raising the annual return by eps

    Same number as approx_loss_l1, read with the opposite sign. It underestimates the exact gain
    ((1 + r + eps) / (1 + r))^n - 1.
*/
inline double gain_approx(Rate eps, Horizon n) { return approx_loss_l1(eps, n); }

//! geometric-mean annual return of a series, (prod (1 + r_i))^(1/N) - 1
inline Rate geometric_mean_return(const ReturnSeries& series)
{
    if (series.empty()) throw DomainError("return series is empty");
    double log_growth = 0.0;
    for (const auto& entry : series) log_growth += std::log1p(entry.ret.value());
    return Rate{std::expm1(log_growth / static_cast<double>(series.size()))};
}

struct LossReport {
    double true_loss = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double l1_improved = 0.0;

    //! constant return, or the label of the series that was evaluated
    std::variant<Rate, std::string> r;
    Rate eps;
    Horizon n;
};

inline LossReport loss_report(Rate r, Rate eps, Horizon n)
{
    return {
        .true_loss = true_loss_constant(r, eps, n),
        .l1 = approx_loss_l1(eps, n),
        .l2 = approx_loss_l2(r, eps, n),
        .l1_improved = approx_loss_l1_improved(r, eps, n),
        .r = r,
        .eps = eps,
        .n = n,
    };
}

//! series report; l2 and l1_improved use the series' geometric-mean return as r
inline LossReport loss_report(const ReturnSeries& series, Rate eps, std::string series_label)
{
    const Rate mean = geometric_mean_return(series);
    const Horizon n{static_cast<long long>(series.size())};
    return {
        .true_loss = true_loss_series(series, eps),
        .l1 = approx_loss_l1(eps, n),
        .l2 = approx_loss_l2(mean, eps, n),
        .l1_improved = approx_loss_l1_improved(mean, eps, n),
        .r = std::move(series_label),
        .eps = eps,
        .n = n,
    };
}

} // namespace feedrag
