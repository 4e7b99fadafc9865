#pragma once

/*!
    \file
    \brief command-line front end: loss, trajectory, sweep and figures subcommands

    run_cli is the whole program minus process setup, so tests drive it in-process.
    Exit codes: 0 success, 1 domain or parse error in the data, 2 usage or I/O error.
*/

#include <feedrag/core.hpp>
#include <feedrag/error_analysis.hpp>
#include <feedrag/io.hpp>
#include <feedrag/loss.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedrag::cli {

enum ExitCode : int { ok = 0, data_error = 1, usage_error = 2 };

//! file system failure; maps to exit code 2
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! bad flag value detected after parsing; maps to exit code 2
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! `start:stop:steps`, steps being the number of inclusive grid points
struct RangeSpec {
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 1;

    static RangeSpec parse(std::string_view text)
    {
        const auto parts = detail::split(text, ':');
        if (parts.size() != 3) throw UsageError("range '" + std::string(text) + "' is not start:stop:steps");
        const auto start = parse_number(parts[0]);
        const auto stop = parse_number(parts[1]);
        const auto steps = parse_number(parts[2]);
        if (!start || !stop || !steps || !std::isfinite(*start) || !std::isfinite(*stop)) {
            throw UsageError("range '" + std::string(text) + "' has a non-numeric field");
        }
        if (*steps < 1 || *steps != std::floor(*steps) || *steps > 1e6) {
            throw UsageError("range '" + std::string(text) + "' needs an integer step count >= 1");
        }
        if (*stop < *start) throw UsageError("range '" + std::string(text) + "' has stop < start");
        return {*start, *stop, static_cast<std::size_t>(*steps)};
    }

    [[nodiscard]] std::vector<double> axis() const
    {
        try {
            return linear_axis(start, stop, steps);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
};

struct SweepDefaults {
    static constexpr std::string_view eps_range = "0.0005:0.02:40";
    static constexpr std::string_view r_range = "0:0.15:31";
    static inline const std::vector<int> n_list{10, 30, 50};
    static inline const std::vector<double> theta_list{0.10, 0.25, 0.50};
};

namespace detail {

inline std::string percent(double fraction)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, feedrag::detail::unsigned_zero(100.0 * fraction),
                                         std::chars_format::fixed, 2);
    if (ec != std::errc{}) return "?";
    return std::string(buf, end) + '%';
}

inline std::string dollars(double amount)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, amount, std::chars_format::fixed, 2);
    if (ec != std::errc{}) return "?";
    return {buf, end};
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return text;
}

inline void write_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

inline Rate checked_rate(double value, std::string_view flag, std::ostream& err)
{
    if (!std::isfinite(value)) throw UsageError(std::string(flag) + " must be a finite number");
    if (value > 1.0) {
        err << "warning: " << flag << ' ' << format_number(value)
            << " is above 1; rates are fractions (0.01 = 1%), not percents\n";
    }
    return Rate{value};
}

inline std::string report_line(std::string_view name, double fraction)
{
    return std::string(name) + '=' + format_number(fraction) + " (" + percent(fraction) + ")\n";
}

inline std::string grid_stem(int n, double theta)
{
    return "grid_N" + std::to_string(n) + "_theta" + format_number(theta);
}

//! writes one CSV + SVG per (n, theta) pair; returns the file names written
inline std::vector<std::string> write_sweep(const std::filesystem::path& dir, std::string_view prefix,
                                            const std::vector<int>& n_list, const std::vector<double>& theta_list,
                                            const std::vector<double>& eps_axis, const std::vector<double>& r_axis,
                                            unsigned threads)
{
    ensure_directory(dir);
    std::vector<std::string> written;
    for (int years : n_list) {
        const Horizon n{years};
        const ErrorGrid grid = sweep_error_grid(eps_axis, r_axis, n, {.threads = threads});
        for (double theta : theta_list) {
            const RegionMask mask = classify_region(grid, theta);
            const Boundary boundary = analytic_boundary(n, theta, eps_axis);
            const std::string stem = std::string(prefix) + grid_stem(years, theta);
            write_file(dir / (stem + ".csv"), emit_grid_csv(grid, mask, boundary));
            write_file(dir / (stem + ".svg"), emit_region_svg(grid, mask, boundary));
            written.push_back(stem + ".csv");
            written.push_back(stem + ".svg");
        }
    }
    return written;
}

inline void print_trajectory_summary(std::ostream& out, const std::vector<TrajectoryPoint>& points, Rate fee)
{
    const auto& last = points.back();
    out << "years=" << last.year_index << " fee=" << format_number(fee.value())
        << " principal=" << dollars(points.front().value_no_fee.amount()) << '\n';
    out << "final_no_fee=" << dollars(last.value_no_fee.amount()) << '\n';
    out << "final_with_fee=" << dollars(last.value_with_fee.amount()) << '\n';
    out << "dollar_loss=" << dollars(last.value_no_fee.amount() - last.value_with_fee.amount()) << '\n';
    out << report_line("loss", last.loss_fraction);
    out << report_line("l1_prediction", last.l1_prediction);
}

} // namespace detail

inline int cmd_loss(double r_flag, double eps_flag, long long years, std::ostream& out, std::ostream& err)
{
    const Rate r = detail::checked_rate(r_flag, "--r", err);
    const Rate eps = detail::checked_rate(eps_flag, "--eps", err);
    const Horizon n{years};

    const LossReport report = loss_report(r, eps, n);
    out << "r=" << format_number(r.value()) << " eps=" << format_number(eps.value()) << " years=" << n.years() << '\n';
    out << detail::report_line("true_loss", report.true_loss);
    out << detail::report_line("l1", report.l1);
    out << detail::report_line("l2", report.l2);
    out << detail::report_line("l1_improved", report.l1_improved);
    if (eps.value() > 0.0 && n.years() >= 1) {
        out << detail::report_line("rel_error", relative_error(r, eps, n));
    } else {
        out << "rel_error=undefined (true loss is not positive)\n";
    }
    if (n.years() >= 1) {
        out << detail::report_line("analytic_error", analytic_error_estimate(r, eps, n));
    } else {
        out << "analytic_error=undefined (zero years)\n";
    }
    return ok;
}

inline int cmd_trajectory(const std::string& returns_path, double eps_flag, double principal_flag,
                          const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const Rate fee = detail::checked_rate(eps_flag, "--eps", err);
    if (!std::isfinite(principal_flag) || principal_flag <= 0.0) throw UsageError("--principal must be positive");

    const std::string text = detail::read_file(returns_path);
    std::vector<std::string> warnings;
    const ReturnSeries series = parse_returns_csv(text, &warnings);
    for (const auto& w : warnings) err << "warning: " << returns_path << ": " << w << '\n';

    const auto points = run_trajectory(Money{principal_flag}, series, fee);
    detail::write_file(out_path, emit_trajectory_csv(points));
    detail::print_trajectory_summary(out, points, fee);
    return ok;
}

inline int cmd_sweep(const std::vector<int>& n_list, const std::vector<double>& theta_list, const RangeSpec& eps_spec,
                     const RangeSpec& r_spec, const std::string& out_dir, unsigned threads, std::ostream& out)
{
    for (int n : n_list) {
        if (n < 1) throw UsageError("--n-list entries must be >= 1");
    }
    for (double theta : theta_list) {
        if (!std::isfinite(theta) || theta <= 0.0) throw UsageError("--theta-list entries must be positive");
    }
    const auto written =
        detail::write_sweep(out_dir, "", n_list, theta_list, eps_spec.axis(), r_spec.axis(), threads);
    for (const auto& name : written) out << "wrote " << (std::filesystem::path(out_dir) / name).string() << '\n';
    return ok;
}

inline int cmd_figures(const std::optional<std::string>& data_dir, const std::string& out_dir, std::ostream& out)
{
    namespace fs = std::filesystem;
    const fs::path dir{out_dir};
    detail::ensure_directory(dir);

    constexpr double fig_principal = 100000.0;
    const Rate fig_fee{0.01};

    std::vector<fs::path> data_files;
    if (data_dir) {
        std::error_code ec;
        if (!fs::is_directory(*data_dir, ec)) throw IoError("data directory '" + *data_dir + "' does not exist");
        for (const auto& entry : fs::directory_iterator(*data_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") data_files.push_back(entry.path());
        }
        std::sort(data_files.begin(), data_files.end());
    }
    if (data_files.empty()) {
        out << "notice: fig1 needs user-supplied annual-return CSVs (year,return) in --data; skipped\n";
    }
    for (const auto& path : data_files) {
        const ReturnSeries series = parse_returns_csv(detail::read_file(path));
        const auto points = run_trajectory(Money{fig_principal}, series, fig_fee);
        const std::string name = "fig1_" + path.stem().string() + ".csv";
        detail::write_file(dir / name, emit_trajectory_csv(points));
        out << "wrote " << (dir / name).string() << " (" << series.entries().front().label << ".."
            << series.entries().back().label << ", loss " << detail::percent(points.back().loss_fraction) << ", l1 "
            << detail::percent(points.back().l1_prediction) << ")\n";
    }

    const auto fig2 = run_trajectory(Money{fig_principal}, ReturnSeries::constant(Rate{0.10}, Horizon{100}), fig_fee);
    detail::write_file(dir / "fig2_trajectory.csv", emit_trajectory_csv(fig2));
    out << "wrote " << (dir / "fig2_trajectory.csv").string() << '\n';

    const auto written =
        detail::write_sweep(dir, "fig3_", SweepDefaults::n_list, SweepDefaults::theta_list,
                            RangeSpec::parse(SweepDefaults::eps_range).axis(),
                            RangeSpec::parse(SweepDefaults::r_range).axis(), 0);
    for (const auto& name : written) out << "wrote " << (dir / name).string() << '\n';
    return ok;
}

//! args exclude the program name
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Compounded loss to annual fees and the accuracy of the N*eps rule. Rates are fractions (0.01 = 1%).",
                 "feedrag"};
    app.require_subcommand(1);

    double r = 0.0;
    double eps = 0.0;
    long long years = 0;
    auto* loss = app.add_subcommand("loss", "exact loss, approximations and their relative error for one (r, eps, N)");
    loss->add_option("--r", r, "annual return as a fraction")->required();
    loss->add_option("--eps", eps, "annual fee as a fraction")->required();
    loss->add_option("--years", years, "compounding years")->required()->check(CLI::NonNegativeNumber);

    std::string returns_path;
    std::string out_path;
    double principal = 100000.0;
    auto* trajectory = app.add_subcommand("trajectory", "fee and no-fee portfolio values over an annual-return CSV");
    trajectory->add_option("--returns", returns_path, "CSV with header year,return")->required();
    trajectory->add_option("--eps", eps, "annual fee as a fraction")->required();
    trajectory->add_option("--principal", principal, "starting amount")->capture_default_str();
    trajectory->add_option("--out", out_path, "trajectory CSV to write")->required();

    std::vector<int> n_list = SweepDefaults::n_list;
    std::vector<double> theta_list = SweepDefaults::theta_list;
    std::string eps_range{SweepDefaults::eps_range};
    std::string r_range{SweepDefaults::r_range};
    std::string out_dir;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "relative-error grids, acceptability masks and analytic boundaries");
    sweep->add_option("--n-list", n_list, "horizons, comma separated")->delimiter(',')->capture_default_str();
    sweep->add_option("--theta-list", theta_list, "error thresholds, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--eps-range", eps_range, "fee axis start:stop:steps")->capture_default_str();
    sweep->add_option("--r-range", r_range, "return axis start:stop:steps")->capture_default_str();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->capture_default_str();

    std::optional<std::string> data_dir;
    auto* figures = app.add_subcommand("figures", "regenerate figure data: fig1 (needs --data), fig2, fig3");
    figures->add_option("--data", data_dir, "directory of annual-return CSVs");
    figures->add_option("--out", out_dir, "output directory")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (loss->parsed()) return cmd_loss(r, eps, years, out, err);
        if (trajectory->parsed()) return cmd_trajectory(returns_path, eps, principal, out_path, out, err);
        if (sweep->parsed()) {
            return cmd_sweep(n_list, theta_list, RangeSpec::parse(eps_range), RangeSpec::parse(r_range), out_dir,
                             threads, out);
        }
        if (figures->parsed()) return cmd_figures(data_dir, out_dir, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return data_error;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return data_error;
    }
    return usage_error;
}

} // namespace feedrag::cli
