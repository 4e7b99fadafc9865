#pragma once

/*!
    \file
    \brief annual-return CSV ingestion, fee/no-fee trajectories, and plot-ready CSV/SVG output

    Text formats are locale independent: numbers are written with std::to_chars (shortest round-trip form) and read
    with std::from_chars.
*/

#include <feedrag/core.hpp>
#include <feedrag/error_analysis.hpp>
#include <feedrag/loss.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace feedrag {

//! grid, mask and boundary disagree on axes, horizon or threshold
class AxisMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

//! shortest decimal text that reads back to the same double; plain notation unless the magnitude is extreme
inline std::string format_number(double value)
{
    value = detail::unsigned_zero(value);
    const double magnitude = std::abs(value);
    const bool plain = magnitude == 0.0 || (magnitude >= 1e-6 && magnitude < 1e16);
    char buf[64];
    const auto [end, ec] = plain ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                                 : std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buf, end};
}

//! parses a whole field as a double; nullopt unless every character is consumed
inline std::optional<double> parse_number(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

//! splits on LF, dropping a trailing CR from each line
inline std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        auto line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/*!
    reads `year,return` CSV into a ReturnSeries

    Returns are decimal fractions. Blank lines and lines starting with '#' are skipped. A UTF-8 BOM is tolerated.
    Returns above 1.0 are accepted but produce a warning, since they usually mean a percent was typed as a fraction.
*/
inline ReturnSeries parse_returns_csv(std::string_view text, std::vector<std::string>* warnings = nullptr)
{
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    ReturnSeries series;
    bool seen_header = false;
    const auto all = detail::lines(text);
    for (std::size_t i = 0; i < all.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto line = detail::trim(all[i]);
        if (line.empty() || line.front() == '#') continue;

        const auto fields = detail::split(line, ',');
        if (!seen_header) {
            if (fields.size() != 2 || detail::trim(fields[0]) != "year" || detail::trim(fields[1]) != "return") {
                throw ParseError(line_no, "expected header 'year,return'");
            }
            seen_header = true;
            continue;
        }

        if (fields.size() != 2) {
            throw ParseError(line_no, "expected 2 fields '<year>,<return>', found " + std::to_string(fields.size()));
        }
        const std::string label{detail::trim(fields[0])};
        if (label.empty()) throw ParseError(line_no, "empty year label");
        const auto value = parse_number(fields[1]);
        if (!value || !std::isfinite(*value)) {
            throw ParseError(line_no, "return '" + std::string(detail::trim(fields[1])) + "' is not a decimal number");
        }
        if (*value <= -1.0) {
            throw DomainError("line " + std::to_string(line_no) + ": year " + label + " return " +
                              format_number(*value) + " is -100% or worse");
        }
        if (*value > 1.0 && warnings) {
            warnings->push_back("line " + std::to_string(line_no) + ": year " + label + " return " +
                                format_number(*value) +
                                " exceeds 100%; returns are fractions (0.10 = 10%), not percents");
        }
        try {
            series.add(label, Rate{*value});
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
    }

    if (!seen_header) throw ParseError(0, "missing header 'year,return'");
    if (series.empty()) throw ParseError(0, "no data rows");
    return series;
}

inline std::string emit_returns_csv(const ReturnSeries& series)
{
    std::string out = "year,return\n";
    for (const auto& [label, ret] : series) out += label + ',' + format_number(ret.value()) + '\n';
    return out;
}

struct TrajectoryPoint {
    int year_index = 0;
    std::string year_label;
    Money value_no_fee;
    Money value_with_fee;
    double loss_fraction = 0.0;
    double l1_prediction = 0.0;
};

/*!
    year-by-year values of a fee-free and a fee-bearing portfolio

    Point 0 is the principal (labelled "start"); point k follows the k-th series entry. The loss fraction at point k is
    the exact loss over the first k years and the l1 prediction is k * fee.
*/
inline std::vector<TrajectoryPoint> run_trajectory(Money principal, const ReturnSeries& series, Rate fee)
{
    if (!(principal.amount() > 0.0)) throw DomainError("principal must be positive");
    compound_series(series, fee);

    std::vector<TrajectoryPoint> points;
    points.reserve(series.size() + 1);
    points.push_back({0, "start", principal, principal, 0.0, 0.0});

    double growth_no_fee = 1.0;
    double log_ratio = 0.0;
    int k = 0;
    for (const auto& [label, ret] : series) {
        ++k;
        growth_no_fee *= ret.gross();
        log_ratio += std::log1p(-fee.value() / ret.gross());
        const double ratio = std::exp(log_ratio);
        const double no_fee = principal.amount() * growth_no_fee;
        points.push_back({
            .year_index = k,
            .year_label = label,
            .value_no_fee = Money{no_fee},
            .value_with_fee = Money{no_fee * ratio},
            .loss_fraction = detail::unsigned_zero(-std::expm1(log_ratio)),
            .l1_prediction = approx_loss_l1(fee, Horizon{k}),
        });
    }
    return points;
}

inline std::string emit_trajectory_csv(const std::vector<TrajectoryPoint>& points)
{
    if (points.empty()) throw std::invalid_argument("trajectory has no points");
    std::string out = "year_index,year_label,value_no_fee,value_with_fee,loss_fraction,l1_prediction\n";
    for (const auto& p : points) {
        out += std::to_string(p.year_index) + ',' + p.year_label + ',' + format_number(p.value_no_fee.amount()) + ',' +
               format_number(p.value_with_fee.amount()) + ',' + format_number(p.loss_fraction) + ',' +
               format_number(p.l1_prediction) + '\n';
    }
    return out;
}

namespace detail {

inline void require_matching(const ErrorGrid& grid, const RegionMask& mask, const Boundary& boundary)
{
    if (grid.values.size() != grid.rows() * grid.cols()) throw AxisMismatchError("grid values do not match its axes");
    if (mask.cells.size() != mask.rows() * mask.cols()) throw AxisMismatchError("mask cells do not match its axes");
    if (grid.eps_axis != mask.eps_axis || grid.r_axis != mask.r_axis) {
        throw AxisMismatchError("grid and mask have different axes");
    }
    if (grid.n != mask.n || grid.n != boundary.n) throw AxisMismatchError("grid, mask and boundary disagree on n");
    if (mask.threshold != boundary.threshold) throw AxisMismatchError("mask and boundary disagree on the threshold");
}

} // namespace detail

//! long format: one `n,eps,r,error,acceptable,boundary_r` row per cell, rows ordered by r then eps
inline std::string emit_grid_csv(const ErrorGrid& grid, const RegionMask& mask, const Boundary& boundary)
{
    detail::require_matching(grid, mask, boundary);
    const std::string n = std::to_string(grid.n.years());
    std::vector<std::string> boundary_field(grid.cols());
    for (std::size_t col = 0; col < grid.cols(); ++col) {
        if (auto r = boundary.r_at(grid.eps_axis[col])) boundary_field[col] = format_number(*r);
    }

    std::string out = "n,eps,r,error,acceptable,boundary_r\n";
    for (std::size_t row = 0; row < grid.rows(); ++row) {
        const std::string r = format_number(grid.r_axis[row]);
        for (std::size_t col = 0; col < grid.cols(); ++col) {
            out += n + ',' + format_number(grid.eps_axis[col]) + ',' + r + ',' + format_number(grid.at(row, col)) +
                   ',' + (mask.at(row, col) ? "true" : "false") + ',' + boundary_field[col] + '\n';
        }
    }
    return out;
}

/*!
    minimal heatmap of a region mask

    Acceptable cells are grey rectangles, the analytic boundary is a black polyline, and red markers sit at the
    reference points (eps, r) = (0.01, 0.10) as a square and (0.005, 0.10) as a circle when they fall inside the axes.
    Epsilon runs left to right, r bottom to top.
*/
inline std::string emit_region_svg(const ErrorGrid& grid, const RegionMask& mask, const Boundary& boundary)
{
    detail::require_matching(grid, mask, boundary);

    constexpr double cell = 12.0;
    constexpr double margin = 48.0;
    const double plot_w = cell * static_cast<double>(grid.cols());
    const double plot_h = cell * static_cast<double>(grid.rows());
    const double width = plot_w + 2 * margin;
    const double height = plot_h + 2 * margin;

    // continuous axis coordinate -> pixel at the matching cell centre
    auto to_x = [&](double eps) {
        const auto& ax = grid.eps_axis;
        const double t = ax.size() > 1 ? (eps - ax.front()) / (ax.back() - ax.front()) * static_cast<double>(ax.size() - 1) : 0.0;
        return margin + (t + 0.5) * cell;
    };
    auto to_y = [&](double r) {
        const auto& ax = grid.r_axis;
        const double t = ax.size() > 1 ? (r - ax.front()) / (ax.back() - ax.front()) * static_cast<double>(ax.size() - 1) : 0.0;
        return margin + plot_h - (t + 0.5) * cell;
    };
    auto inside = [](const std::vector<double>& ax, double v) { return v >= ax.front() && v <= ax.back(); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) + "\" height=\"" +
           format_number(height) + "\" viewBox=\"0 0 " + format_number(width) + ' ' + format_number(height) + "\">\n";
    out += "<title>N=" + std::to_string(grid.n.years()) + ", threshold=" + format_number(mask.threshold) + "</title>\n";
    out += "<rect x=\"" + format_number(margin) + "\" y=\"" + format_number(margin) + "\" width=\"" +
           format_number(plot_w) + "\" height=\"" + format_number(plot_h) +
           "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";

    out += "<g id=\"region\">\n";
    for (std::size_t row = 0; row < grid.rows(); ++row) {
        for (std::size_t col = 0; col < grid.cols(); ++col) {
            if (!mask.at(row, col)) continue;
            const double x = margin + cell * static_cast<double>(col);
            const double y = margin + plot_h - cell * static_cast<double>(row + 1);
            out += "<rect class=\"acceptable\" x=\"" + format_number(x) + "\" y=\"" + format_number(y) + "\" width=\"" +
                   format_number(cell) + "\" height=\"" + format_number(cell) + "\" fill=\"#b0b0b0\"/>\n";
        }
    }
    out += "</g>\n";

    // parts of the boundary outside the r range are clipped to the plot area
    std::vector<BoundaryPoint> visible;
    for (const auto& p : boundary.points) {
        if (inside(grid.eps_axis, p.eps)) visible.push_back(p);
    }
    if (visible.size() >= 2) {
        out += "<clipPath id=\"plot-area\"><rect x=\"" + format_number(margin) + "\" y=\"" + format_number(margin) +
               "\" width=\"" + format_number(plot_w) + "\" height=\"" + format_number(plot_h) + "\"/></clipPath>\n";
        out += "<polyline id=\"boundary\" clip-path=\"url(#plot-area)\" fill=\"none\" stroke=\"black\" "
               "stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < visible.size(); ++i) {
            if (i) out += ' ';
            out += format_number(to_x(visible[i].eps)) + ',' + format_number(to_y(visible[i].r));
        }
        out += "\"/>\n";
    }

    constexpr double marker = 4.0;
    if (inside(grid.eps_axis, 0.01) && inside(grid.r_axis, 0.10)) {
        out += "<rect class=\"marker\" x=\"" + format_number(to_x(0.01) - marker) + "\" y=\"" +
               format_number(to_y(0.10) - marker) + "\" width=\"" + format_number(2 * marker) + "\" height=\"" +
               format_number(2 * marker) + "\" fill=\"red\"/>\n";
    }
    if (inside(grid.eps_axis, 0.005) && inside(grid.r_axis, 0.10)) {
        out += "<circle class=\"marker\" cx=\"" + format_number(to_x(0.005)) + "\" cy=\"" + format_number(to_y(0.10)) +
               "\" r=\"" + format_number(marker) + "\" fill=\"red\"/>\n";
    }

    const double label_y = margin + plot_h + 30;
    out += "<text x=\"" + format_number(margin + plot_w / 2) + "\" y=\"" + format_number(label_y) +
           "\" text-anchor=\"middle\" font-size=\"12\">eps " + format_number(grid.eps_axis.front()) + " .. " +
           format_number(grid.eps_axis.back()) + "</text>\n";
    out += "<text x=\"12\" y=\"" + format_number(margin + plot_h / 2) + "\" font-size=\"12\">r " +
           format_number(grid.r_axis.front()) + " .. " + format_number(grid.r_axis.back()) + "</text>\n";
    out += "</svg>\n";
    return out;
}

} // namespace feedrag
