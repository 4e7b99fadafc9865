#include <feedrag/io.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace feedrag {
namespace {

std::size_t count_of(const std::string& text, const std::string& needle)
{
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++count;
    return count;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    for (auto line : detail::lines(text)) {
        auto& row = rows.emplace_back();
        for (auto field : detail::split(line, ',')) row.emplace_back(field);
    }
    return rows;
}

double num(const std::string& field)
{
    auto v = parse_number(field);
    if (!v) throw std::runtime_error("not a number: " + field);
    return *v;
}

TEST(ParseReturnsCsv, ReadsRowsInOrder)
{
    const auto series = parse_returns_csv("year,return\n1991,0.3047\n1992,0.0762");
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series.entries()[0].label, "1991");
    EXPECT_EQ(series.entries()[0].ret.value(), 0.3047);
    EXPECT_EQ(series.entries()[1].label, "1992");
    EXPECT_EQ(series.entries()[1].ret.value(), 0.0762);
}

TEST(ParseReturnsCsv, CommentsBlankLinesAndCrlf)
{
    const auto series = parse_returns_csv("# source: synthetic\r\nyear,return\r\n\r\n2001,-0.05\r\n# gap\r\n2002,0.1\r\n");
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series.entries()[1].label, "2002");
    EXPECT_EQ(series.entries()[0].ret.value(), -0.05);
}

TEST(ParseReturnsCsv, Errors)
{
    EXPECT_THROW(parse_returns_csv("year,return\n1991,-1.5"), DomainError);
    EXPECT_THROW(parse_returns_csv("year,return\n1991,-1"), DomainError);
    try {
        parse_returns_csv("year,return\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("no data rows"), std::string::npos);
    }
    try {
        parse_returns_csv("year,return\n1991,0.1\n1992,abc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_returns_csv("year,return\n1991,0.1,7\n"), ParseError);
    EXPECT_THROW(parse_returns_csv("year,return\n1991,0.1\n1991,0.2\n"), ParseError);
    EXPECT_THROW(parse_returns_csv("date,ret\n1991,0.1\n"), ParseError);
    EXPECT_THROW(parse_returns_csv(""), ParseError);
    EXPECT_THROW(parse_returns_csv("year,return\n1991,nan\n"), ParseError);
}

TEST(ParseReturnsCsv, WarnsOnPercentLookingValues)
{
    std::vector<std::string> warnings;
    const auto series = parse_returns_csv("year,return\n1991,30.47\n1992,0.07\n", &warnings);
    EXPECT_EQ(series.size(), 2u);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("1991"), std::string::npos);
}

TEST(ReturnsCsv, RoundTripPreservesSeries)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rate(-0.9, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ReturnSeries series;
        for (int y = 0; y < 35; ++y) series.add("Y" + std::to_string(1950 + y), Rate{rate(rng)});
        const auto back = parse_returns_csv(emit_returns_csv(series));
        ASSERT_EQ(back.size(), series.size());
        for (std::size_t k = 0; k < series.size(); ++k) {
            EXPECT_EQ(back.entries()[k].label, series.entries()[k].label);
            EXPECT_NEAR(back.entries()[k].ret.value(), series.entries()[k].ret.value(), 1e-10);
        }
    }
}

TEST(RunTrajectory, ConstantSeries)
{
    const auto points = run_trajectory(Money{100000}, ReturnSeries::constant(Rate{0.10}, Horizon{30}), Rate{0.01});
    ASSERT_EQ(points.size(), 31u);
    const auto& last = points.back();
    const auto sim = oracle::simulate_constant(0.10, 0.01, 30);
    EXPECT_NEAR(static_cast<double>(100000 * sim.no_fee), 1744940, 100);
    EXPECT_NEAR(last.value_no_fee.amount(), 1744940, 100);
    EXPECT_NEAR(last.value_with_fee.amount(), static_cast<double>(100000 * sim.with_fee), 1e-6);
    EXPECT_NEAR(last.loss_fraction, 0.23958, 1e-4);
    EXPECT_DOUBLE_EQ(last.l1_prediction, 0.30);
}

TEST(RunTrajectory, ZeroFeeKeepsPortfoliosEqual)
{
    const auto points = run_trajectory(Money{100000}, {0.3, -0.2, 0.1, 0.05}, Rate{0.0});
    for (const auto& p : points) {
        EXPECT_EQ(p.value_with_fee, p.value_no_fee);
        EXPECT_EQ(p.loss_fraction, 0.0);
    }
}

TEST(RunTrajectory, TwoYearSeries)
{
    const auto points = run_trajectory(Money{100000}, {0.05, -0.03}, Rate{0.01});
    ASSERT_EQ(points.size(), 3u);
    EXPECT_EQ(points[0].year_index, 0);
    EXPECT_EQ(points[0].value_no_fee.amount(), 100000);
    EXPECT_EQ(points[0].loss_fraction, 0.0);
    EXPECT_NEAR(points[2].loss_fraction, 0.01966, 1e-4);
    EXPECT_NEAR(points[2].value_with_fee.amount(), 100000 * 1.04 * 0.96, 1e-8);
}

TEST(RunTrajectory, Errors)
{
    EXPECT_THROW(run_trajectory(Money{0}, {0.1}, Rate{0.01}), DomainError);
    EXPECT_THROW(run_trajectory(Money{1}, {0.1, -0.5}, Rate{0.6}), DomainError);
}

TEST(RunTrajectory, Invariants)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rate(-0.3, 0.4);
    std::uniform_real_distribution<double> fee(0.0001, 0.03);
    for (int trial = 0; trial < 100; ++trial) {
        ReturnSeries series;
        std::vector<double> raw;
        for (int y = 0; y < 30; ++y) {
            raw.push_back(rate(rng));
            series.add(std::to_string(1990 + y), Rate{raw.back()});
        }
        const Rate f{fee(rng)};
        const auto points = run_trajectory(Money{100000}, series, f);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const auto& p = points[k];
            EXPECT_LE(p.value_with_fee.amount(), p.value_no_fee.amount());
            EXPECT_NEAR(p.loss_fraction, 1.0 - p.value_with_fee.amount() / p.value_no_fee.amount(), 1e-12);
            EXPECT_EQ(p.l1_prediction, static_cast<double>(k) * f.value());
        }
        EXPECT_NEAR(points.back().loss_fraction, true_loss_series(series, f), 1e-12);
        EXPECT_NEAR(points.back().loss_fraction, static_cast<double>(oracle::simulate(raw, f.value()).loss()), 1e-12);
    }
}

TEST(RunTrajectory, LossNonDecreasingOnConstantReturns)
{
    const auto points = run_trajectory(Money{1}, ReturnSeries::constant(Rate{0.10}, Horizon{200}), Rate{0.01});
    for (std::size_t k = 1; k < points.size(); ++k) EXPECT_GE(points[k].loss_fraction, points[k - 1].loss_fraction);
}

TEST(EmitTrajectoryCsv, SinglePoint)
{
    const std::vector<TrajectoryPoint> points{{0, "start", Money{100000}, Money{100000}, 0.0, 0.0}};
    EXPECT_EQ(emit_trajectory_csv(points),
              "year_index,year_label,value_no_fee,value_with_fee,loss_fraction,l1_prediction\n"
              "0,start,100000,100000,0,0\n");
    EXPECT_THROW(emit_trajectory_csv({}), std::invalid_argument);
}

TEST(EmitTrajectoryCsv, SaturationOverHundredYears)
{
    const auto points = run_trajectory(Money{100000}, ReturnSeries::constant(Rate{0.10}, Horizon{100}), Rate{0.01});
    const auto rows = csv_rows(emit_trajectory_csv(points));
    ASSERT_EQ(rows.size(), 102u);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LT(num(rows[k][4]), 1.0);
    EXPECT_GE(num(rows.back()[5]), 1.0);
    EXPECT_LT(num(rows.back()[4]), 0.6);
}

TEST(EmitTrajectoryCsv, RoundTrip)
{
    const auto points = run_trajectory(Money{123456.78}, {0.071, -0.234, 0.19, 0.0333}, Rate{0.0125});
    const auto rows = csv_rows(emit_trajectory_csv(points));
    ASSERT_EQ(rows.size(), points.size() + 1);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& row = rows[k + 1];
        ASSERT_EQ(row.size(), 6u);
        EXPECT_EQ(std::stoi(row[0]), points[k].year_index);
        EXPECT_EQ(row[1], points[k].year_label);
        EXPECT_NEAR(num(row[2]), points[k].value_no_fee.amount(), 1e-10 * points[k].value_no_fee.amount());
        EXPECT_NEAR(num(row[3]), points[k].value_with_fee.amount(), 1e-10 * points[k].value_with_fee.amount());
        EXPECT_NEAR(num(row[4]), points[k].loss_fraction, 1e-10);
        EXPECT_NEAR(num(row[5]), points[k].l1_prediction, 1e-10);
    }
}

struct Figure {
    ErrorGrid grid;
    RegionMask mask;
    Boundary boundary;
};

Figure make_figure(std::vector<double> eps, std::vector<double> r, int n, double theta)
{
    auto grid = sweep_error_grid(eps, r, Horizon{n});
    auto mask = classify_region(grid, theta);
    auto boundary = analytic_boundary(Horizon{n}, theta, eps);
    return {std::move(grid), std::move(mask), std::move(boundary)};
}

TEST(EmitGridCsv, AnchorRow)
{
    const auto fig = make_figure({0.01}, {0.10}, 30, 0.25);
    const auto rows = csv_rows(emit_grid_csv(fig.grid, fig.mask, fig.boundary));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "eps", "r", "error", "acceptable", "boundary_r"}));
    EXPECT_EQ(rows[1][0], "30");
    EXPECT_EQ(rows[1][1], "0.01");
    EXPECT_EQ(rows[1][2], "0.1");
    EXPECT_NEAR(num(rows[1][3]), 0.2522, 1e-3);
    EXPECT_EQ(rows[1][4], "false");
    EXPECT_NEAR(num(rows[1][5]), 0.105, 1e-15);
}

TEST(EmitGridCsv, ClippedBoundaryIsEmpty)
{
    const auto fig = make_figure({0.02}, {0.10}, 30, 0.25);
    const auto rows = csv_rows(emit_grid_csv(fig.grid, fig.mask, fig.boundary));
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_EQ(rows[1].size(), 6u);
    EXPECT_EQ(rows[1][5], "");
}

TEST(EmitGridCsv, RowCountMatchesShape)
{
    const auto fig = make_figure(linear_axis(0.001, 0.02, 7), linear_axis(0.0, 0.12, 5), 20, 0.25);
    const auto text = emit_grid_csv(fig.grid, fig.mask, fig.boundary);
    EXPECT_EQ(count_of(text, "\n"), 1u + 7u * 5u);
}

TEST(EmitGridCsv, AxisMismatch)
{
    auto fig = make_figure({0.01, 0.02}, {0.05, 0.10}, 30, 0.25);
    auto other = make_figure({0.01, 0.03}, {0.05, 0.10}, 30, 0.25);
    EXPECT_THROW(emit_grid_csv(fig.grid, other.mask, fig.boundary), AxisMismatchError);
    EXPECT_THROW(emit_region_svg(fig.grid, other.mask, fig.boundary), AxisMismatchError);
    auto wrong_n = make_figure({0.01, 0.02}, {0.05, 0.10}, 10, 0.25);
    EXPECT_THROW(emit_grid_csv(fig.grid, fig.mask, wrong_n.boundary), AxisMismatchError);
    auto wrong_theta = make_figure({0.01, 0.02}, {0.05, 0.10}, 30, 0.5);
    EXPECT_THROW(emit_grid_csv(fig.grid, fig.mask, wrong_theta.boundary), AxisMismatchError);
}

TEST(EmitRegionSvg, GreyCellsFollowMask)
{
    const auto eps = linear_axis(0.005, 0.02, 3);
    const auto r = linear_axis(0.02, 0.10, 3);
    const auto none = make_figure(eps, r, 30, 1e-6);
    ASSERT_EQ(none.mask.count(), 0u);
    EXPECT_EQ(count_of(emit_region_svg(none.grid, none.mask, none.boundary), "class=\"acceptable\""), 0u);

    const auto all = make_figure(eps, r, 30, 10.0);
    EXPECT_EQ(count_of(emit_region_svg(all.grid, all.mask, all.boundary), "class=\"acceptable\""), 9u);

    const auto some = make_figure(eps, r, 30, 0.25);
    EXPECT_EQ(count_of(emit_region_svg(some.grid, some.mask, some.boundary), "class=\"acceptable\""), some.mask.count());
}

TEST(EmitRegionSvg, DeterministicAndWellFormed)
{
    const auto fig = make_figure(linear_axis(0.005, 0.02, 3), linear_axis(0.02, 0.10, 3), 30, 0.25);
    const auto a = emit_region_svg(fig.grid, fig.mask, fig.boundary);
    const auto b = emit_region_svg(fig.grid, fig.mask, fig.boundary);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.starts_with("<?xml"));
    EXPECT_EQ(count_of(a, "<svg"), 1u);
    EXPECT_EQ(count_of(a, "</svg>"), 1u);
    EXPECT_EQ(count_of(a, "class=\"marker\""), 2u);
    EXPECT_EQ(count_of(a, "id=\"boundary\""), 1u);
}

TEST(FormatNumber, LocaleFreeShortest)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(100000), "100000");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(parse_number("1e-3"), 0.001);
    EXPECT_FALSE(parse_number("0,5").has_value());
    EXPECT_FALSE(parse_number("").has_value());
}

} // namespace
} // namespace feedrag
