#pragma once

/*!
    \file
    \brief accuracy of the n * eps loss approximation over the (eps, r, n) parameter space

    relative_error is the numeric error against the exact loss. analytic_error_estimate is the closed-form second-order
    estimate r + (n - 1) eps / 2. Sweeps evaluate the numeric error on an (r, eps) grid, and the analytic boundary is the
    curve where the estimate equals a threshold.
*/

#include <feedrag/core.hpp>
#include <feedrag/loss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace feedrag {

//! |n eps - L_T| / L_T; undefined (DomainError) when the true loss is zero
inline double relative_error(Rate r, Rate eps, Horizon n)
{
    if (!(eps.value() > 0.0)) throw DomainError("relative error needs a positive fee (true loss is zero)");
    if (n.years() < 1) throw DomainError("relative error needs at least one year (true loss is zero)");
    const double exact = true_loss_constant(r, eps, n);
    return std::abs(approx_loss_l1(eps, n) - exact) / exact;
}

//! r + (n - 1) eps / 2
inline double analytic_error_estimate(Rate r, Rate eps, Horizon n)
{
    if (n.years() < 1) throw DomainError("analytic error estimate needs at least one year");
    return r.value() + (n.years() - 1) * eps.value() / 2.0;
}

//! relative errors on an (r, eps) grid, row-major: one row per r, one column per eps
struct ErrorGrid {
    std::vector<double> eps_axis;
    std::vector<double> r_axis;
    Horizon n;
    std::vector<double> values;

    [[nodiscard]] std::size_t rows() const noexcept { return r_axis.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return eps_axis.size(); }
    [[nodiscard]] double at(std::size_t row, std::size_t col) const { return values.at(row * cols() + col); }
};

//! acceptability of each grid cell at a threshold; same layout as ErrorGrid
struct RegionMask {
    std::vector<double> eps_axis;
    std::vector<double> r_axis;
    Horizon n;
    double threshold = 0.0;
    std::vector<bool> cells;

    [[nodiscard]] std::size_t rows() const noexcept { return r_axis.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return eps_axis.size(); }
    [[nodiscard]] bool at(std::size_t row, std::size_t col) const { return cells.at(row * cols() + col); }

    [[nodiscard]] std::size_t count() const noexcept
    {
        return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), true));
    }

    //! true when every acceptable cell of this mask is also acceptable in other
    [[nodiscard]] bool subset_of(const RegionMask& other) const
    {
        if (eps_axis != other.eps_axis || r_axis != other.r_axis) throw std::invalid_argument("masks have different axes");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i] && !other.cells[i]) return false;
        }
        return true;
    }
};

struct BoundaryPoint {
    double eps;
    double r;
};

//! analytic acceptability boundary for one (n, threshold) pair
struct Boundary {
    Horizon n;
    double threshold = 0.0;
    std::vector<BoundaryPoint> points;

    //! boundary r at an eps taken from the axis the boundary was built on; empty when clipped
    [[nodiscard]] std::optional<double> r_at(double eps) const
    {
        for (const auto& p : points) {
            if (p.eps == eps) return p.r;
        }
        return std::nullopt;
    }
};

/*!
    evenly spaced axis of count points from start to stop inclusive

    count == 1 yields {start} and requires stop == start.
*/
inline std::vector<double> linear_axis(double start, double stop, std::size_t count)
{
    if (!std::isfinite(start) || !std::isfinite(stop)) throw std::invalid_argument("axis bounds must be finite");
    if (count == 0) throw std::invalid_argument("axis needs at least one point");
    if (stop < start) throw std::invalid_argument("axis stop must not be below start");
    if (count == 1) {
        if (stop != start) throw std::invalid_argument("a single-point axis needs stop == start");
        return {start};
    }
    if (stop == start) throw std::invalid_argument("a multi-point axis needs stop > start");
    std::vector<double> axis(count);
    const double span = stop - start;
    const auto last = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) axis[i] = start + span * (static_cast<double>(i) / last);
    axis.back() = stop;
    return axis;
}

struct SweepOptions {
    //! worker threads; 0 picks the hardware concurrency
    unsigned threads = 0;
};

namespace detail {

inline void require_strictly_increasing(std::span<const double> axis, const char* name)
{
    if (axis.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i])) throw std::invalid_argument(std::string(name) + " axis has a non-finite value");
        if (i > 0 && !(axis[i] > axis[i - 1])) {
            throw std::invalid_argument(std::string(name) + " axis is not strictly increasing");
        }
    }
}

} // namespace detail

/*!
    relative_error on every (r, eps) cell

    Rows are split across threads; each cell depends only on its coordinates, so the result is bit-identical to a
    sequential row-major pass. When cells fail, the error reported is the first one in row-major order, with the cell
    coordinates attached.
*/
inline ErrorGrid sweep_error_grid(std::span<const double> eps_axis, std::span<const double> r_axis, Horizon n,
                                  SweepOptions options = {})
{
    detail::require_strictly_increasing(eps_axis, "eps");
    detail::require_strictly_increasing(r_axis, "r");

    ErrorGrid grid{
        .eps_axis = {eps_axis.begin(), eps_axis.end()},
        .r_axis = {r_axis.begin(), r_axis.end()},
        .n = n,
        .values = std::vector<double>(eps_axis.size() * r_axis.size()),
    };

    const std::size_t rows = grid.rows();
    const std::size_t cols = grid.cols();
    std::vector<std::string> row_errors(rows);

    auto evaluate_row = [&](std::size_t row) {
        for (std::size_t col = 0; col < cols; ++col) {
            try {
                grid.values[row * cols + col] = relative_error(Rate{grid.r_axis[row]}, Rate{grid.eps_axis[col]}, n);
            } catch (const DomainError& e) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "cell (r=" << grid.r_axis[row] << ", eps=" << grid.eps_axis[col] << ", n=" << n.years()
                    << "): " << e.what();
                row_errors[row] = msg.str();
                return;
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows));
    if (threads <= 1) {
        for (std::size_t row = 0; row < rows; ++row) evaluate_row(row);
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t row = t; row < rows; row += threads) evaluate_row(row);
            });
        }
    }

    for (const auto& message : row_errors) {
        if (!message.empty()) throw DomainError(message);
    }
    return grid;
}

//! cell is acceptable iff its relative error is at most theta
inline RegionMask classify_region(const ErrorGrid& grid, double theta)
{
    if (!(theta > 0.0)) throw DomainError("threshold must be positive");
    RegionMask mask{.eps_axis = grid.eps_axis, .r_axis = grid.r_axis, .n = grid.n, .threshold = theta, .cells = {}};
    mask.cells.reserve(grid.values.size());
    for (double value : grid.values) mask.cells.push_back(value <= theta);
    return mask;
}

//! r = theta - (n - 1) eps / 2 for each eps, dropping points with r < 0
inline Boundary analytic_boundary(Horizon n, double theta, std::span<const double> eps_axis)
{
    if (n.years() < 1) throw DomainError("analytic boundary needs at least one year");
    if (!(theta > 0.0)) throw DomainError("threshold must be positive");
    Boundary boundary{.n = n, .threshold = theta, .points = {}};
    for (double eps : eps_axis) {
        const double r = theta - (n.years() - 1) * eps / 2.0;
        if (r >= 0.0) boundary.points.push_back({eps, r});
    }
    return boundary;
}

} // namespace feedrag
