#pragma once

// Benchmark harness: runs any algorithm over a grid of (n, p) cells,
// times the sort proper, computes speedups against the serial radix sort
// at the same n, and renders the result as CSV or markdown. Timing covers
// local sorts, all supersteps and the final concatenation; input
// generation, block splitting/padding and verification stay outside the
// timed region.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bspsort/core.hpp"
#include "bspsort/costmodel.hpp"
#include "bspsort/netsort.hpp"
#include "bspsort/radix.hpp"

namespace bspsort::bench {

enum class Format { csv, markdown };

struct BenchConfig {
    std::vector<Algorithm> algorithms;
    std::vector<std::uint64_t> sizes;
    std::vector<int> processor_counts;
    std::uint64_t seed = 1;
    int repetitions = 4;
    Format format = Format::csv;
    bool verify = false;
    bool predict = false;
    costmodel::Rational g_over_G{5};
    std::uint64_t serial_radix = 256; // radix of the serial baseline rows

    void validate() const {
        if (algorithms.empty())
            throw std::invalid_argument("BenchConfig: no algorithms selected");
        if (sizes.empty() || processor_counts.empty())
            throw std::invalid_argument("BenchConfig: sizes and processor counts must be non-empty");
        if (repetitions < 1)
            throw std::invalid_argument("BenchConfig: repetitions must be >= 1");
        for (int p : processor_counts)
            if (p < 1)
                throw std::invalid_argument("BenchConfig: processor counts must be >= 1");
    }
};

enum class CellStatus { ok, skipped, failed };

struct BenchRow {
    Algorithm algorithm = Algorithm::SR4;
    std::uint64_t n = 0;
    int p = 1;
    CellStatus status = CellStatus::ok;
    std::string note;
    double mean_seconds = 0.0;
    std::vector<double> rep_seconds;
    double speedup = 1.0;
    double predicted_speedup = 1.0;
    bool verified = false;
    // filled by compare_with_model
    double measured_over_predicted = 0.0;
    double asymptotic_bound = 0.0;
    bool exceeds_asymptotic = false;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for one repetition. Every algorithm cell at the same (seed, rep)
/// sorts the identical input array.
inline std::uint64_t derive_seed(std::uint64_t seed, int rep) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(rep)));
}

namespace detail {

inline double time_seconds(const std::function<void()>& work) {
    const auto start = std::chrono::steady_clock::now();
    work();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

inline double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

inline double predicted_for(Algorithm algo, std::uint64_t n, int p,
                            const costmodel::Rational& g_over_G) {
    if (n == 0) return 1.0;
    auto mp = costmodel::MachineParams::with_cores(p);
    mp.set_gap_ratio(g_over_G);
    return costmodel::to_double(costmodel::predicted_speedup(algo, n, mp));
}

// One repetition of one cell: untimed setup, timed sort, optional verify.
inline std::pair<double, bool> run_once(Algorithm algo, const KeyArray& input, int p,
                                        std::uint64_t serial_radix, bool verify) {
    KeyArray output;
    double seconds = 0.0;
    switch (algo) {
    case Algorithm::SR4: {
        KeyArray work = input;
        seconds = time_seconds([&] { output = radix::serial_radix_sort(std::move(work), serial_radix); });
        break;
    }
    case Algorithm::PR4:
    case Algorithm::PR2: {
        auto prep = radix::prepare_parallel_radix(input, p,
                                                  algo == Algorithm::PR4 ? 256 : 65536);
        seconds = time_seconds([&] { output = radix::run_parallel_radix(std::move(prep)).output; });
        break;
    }
    case Algorithm::BTN:
    case Algorithm::OET: {
        auto prep = algo == Algorithm::BTN ? netsort::prepare_btn(input, p)
                                           : netsort::prepare_oet(input, p);
        seconds = time_seconds([&] { output = netsort::run_block_network(std::move(prep)).output; });
        break;
    }
    }
    const bool ok = !verify || verify_sorted_permutation(input, output);
    return {seconds, ok};
}

inline BenchRow run_cell(Algorithm algo, std::uint64_t n, int p, const BenchConfig& config,
                         double baseline_mean) {
    BenchRow row;
    row.algorithm = algo;
    row.n = n;
    row.p = p;

    if (algo == Algorithm::BTN && !is_power_of_two(static_cast<std::uint64_t>(p))) {
        row.status = CellStatus::skipped;
        row.note = "btn requires a power-of-two p";
        return row;
    }

    try {
        bool all_verified = true;
        for (int rep = 0; rep < config.repetitions; ++rep) {
            const KeyArray input = generate_uniform_keys(n, derive_seed(config.seed, rep));
            auto [seconds, ok] = run_once(algo, input, p, config.serial_radix, config.verify);
            row.rep_seconds.push_back(seconds);
            all_verified = all_verified && ok;
        }
        row.mean_seconds = mean_of(row.rep_seconds);
        row.verified = config.verify && all_verified;
        if (config.verify && !all_verified)
            row.note = "output failed verification";
        row.speedup = algo == Algorithm::SR4
                          ? 1.0
                          : (row.mean_seconds > 0.0 ? baseline_mean / row.mean_seconds : 0.0);
        row.predicted_speedup = predicted_for(algo, n, p, config.g_over_G);
    } catch (const std::exception& e) {
        row.status = CellStatus::failed;
        row.note = e.what();
    }
    return row;
}

} // namespace detail

/// Runs the whole grid. A serial baseline row (p = 1) is measured and
/// reported for every n, since all speedups are relative to it; parallel
/// algorithms then sweep the processor-count list. Cells run one at a
/// time so their timings do not contaminate each other.
inline BenchReport run_benchmark(const BenchConfig& config) {
    config.validate();
    BenchReport report;
    for (std::uint64_t n : config.sizes) {
        BenchRow baseline = detail::run_cell(Algorithm::SR4, n, 1, config, 0.0);
        const double baseline_mean = baseline.mean_seconds;
        report.rows.push_back(std::move(baseline));
        for (Algorithm algo : config.algorithms) {
            if (algo == Algorithm::SR4) continue;
            for (int p : config.processor_counts)
                report.rows.push_back(detail::run_cell(algo, n, p, config, baseline_mean));
        }
    }
    return report;
}

/// Attaches the model's view to every executed row: measured/predicted
/// ratio and whether the measurement exceeds the asymptotic bound (which
/// the model says should not happen, so such rows get flagged, not
/// failed).
inline void compare_with_model(BenchReport& report, const costmodel::Rational& g_over_G) {
    for (auto& row : report.rows) {
        if (row.status != CellStatus::ok) continue;
        auto mp = costmodel::MachineParams::with_cores(row.p);
        mp.set_gap_ratio(g_over_G);
        row.asymptotic_bound = costmodel::to_double(costmodel::asymptotic_speedup(row.algorithm, mp));
        row.measured_over_predicted =
            row.predicted_speedup > 0.0 ? row.speedup / row.predicted_speedup : 0.0;
        row.exceeds_asymptotic = row.speedup > row.asymptotic_bound;
    }
}

/// Shortest decimal representation that parses back to the same double;
/// integral values keep a trailing ".0" so the column stays visibly
/// floating point.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".en") == std::string::npos)
        s += ".0";
    return s;
}

inline constexpr std::string_view csv_header = "algorithm,n,p,mean_seconds,speedup,predicted_speedup,verified";

inline std::string emit_csv(const BenchReport& report) {
    std::string out{csv_header};
    out += '\n';
    for (const auto& row : report.rows) {
        if (row.status != CellStatus::ok) continue;
        out += algorithm_name(row.algorithm);
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += std::to_string(row.p);
        out += ',';
        out += format_number(row.mean_seconds);
        out += ',';
        out += format_number(row.speedup);
        out += ',';
        out += format_number(row.predicted_speedup);
        out += ',';
        out += row.verified ? "true" : "false";
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::string fixed_decimal(double v, int places) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(places);
    os << v;
    return os.str();
}

} // namespace detail

/// Markdown table in the layout of the measurement tables: one row per
/// (algorithm, p) block, one column per n. The serial row shows seconds;
/// every other row shows its speedup over serial.
inline std::string emit_markdown(const BenchReport& report) {
    std::vector<std::uint64_t> sizes;
    std::vector<std::pair<Algorithm, int>> groups;
    for (const auto& row : report.rows) {
        if (std::find(sizes.begin(), sizes.end(), row.n) == sizes.end())
            sizes.push_back(row.n);
        const std::pair<Algorithm, int> key{row.algorithm, row.p};
        if (std::find(groups.begin(), groups.end(), key) == groups.end())
            groups.push_back(key);
    }

    auto find_row = [&](Algorithm a, int p, std::uint64_t n) -> const BenchRow* {
        for (const auto& row : report.rows)
            if (row.algorithm == a && row.p == p && row.n == n) return &row;
        return nullptr;
    };

    std::string out = "| algorithm | p |";
    for (auto n : sizes)
        out += " n=" + std::to_string(n) + " |";
    out += "\n|---|---|";
    for (std::size_t i = 0; i < sizes.size(); ++i)
        out += "---|";
    out += '\n';

    for (const auto& [algo, p] : groups) {
        out += "| ";
        out += algorithm_name(algo);
        out += " | " + std::to_string(p) + " |";
        for (auto n : sizes) {
            const BenchRow* row = find_row(algo, p, n);
            if (row == nullptr)
                out += " |";
            else if (row->status == CellStatus::skipped)
                out += " skip |";
            else if (row->status == CellStatus::failed)
                out += " fail |";
            else if (algo == Algorithm::SR4)
                out += " " + detail::fixed_decimal(row->mean_seconds, 3) + "s |";
            else
                out += " " + detail::fixed_decimal(row->speedup, 2) + " |";
        }
        out += '\n';
    }
    return out;
}

inline std::string emit_table(const BenchReport& report, Format format) {
    return format == Format::csv ? emit_csv(report) : emit_markdown(report);
}

/// Parses emit_csv output back into a report (executed rows only, without
/// per-repetition detail). emit_csv(parse_csv(emit_csv(r))) is the
/// identity — the rendering is lossless at the printed precision.
inline BenchReport parse_csv(std::string_view text) {
    BenchReport report;
    std::size_t pos = 0;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("csv line " + std::to_string(line_no) + ": " + why);
    };

    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != csv_header) fail("unexpected header");
            continue;
        }

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 7) fail("expected 7 fields");

        BenchRow row;
        const auto algo = algorithm_from_name(fields[0]);
        if (!algo) fail("unknown algorithm '" + std::string(fields[0]) + "'");
        row.algorithm = *algo;

        auto parse_u64 = [&](std::string_view f, std::uint64_t& out) {
            const auto r = std::from_chars(f.data(), f.data() + f.size(), out);
            if (r.ec != std::errc{} || r.ptr != f.data() + f.size()) fail("bad integer");
        };
        auto parse_double = [&](std::string_view f, double& out) {
            const auto r = std::from_chars(f.data(), f.data() + f.size(), out);
            if (r.ec != std::errc{} || r.ptr != f.data() + f.size()) fail("bad number");
        };

        parse_u64(fields[1], row.n);
        std::uint64_t p64 = 0;
        parse_u64(fields[2], p64);
        row.p = static_cast<int>(p64);
        parse_double(fields[3], row.mean_seconds);
        parse_double(fields[4], row.speedup);
        parse_double(fields[5], row.predicted_speedup);
        if (fields[6] == "true")
            row.verified = true;
        else if (fields[6] == "false")
            row.verified = false;
        else
            fail("bad verified flag");
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// One human-readable line per executed row relating measurement to the
/// model; rows above the asymptotic bound are marked.
inline std::string model_comparison_summary(const BenchReport& report) {
    std::string out;
    for (const auto& row : report.rows) {
        if (row.status != CellStatus::ok) continue;
        out += std::string(algorithm_name(row.algorithm)) + " n=" + std::to_string(row.n) +
               " p=" + std::to_string(row.p) + ": measured " +
               detail::fixed_decimal(row.speedup, 2) + ", predicted " +
               detail::fixed_decimal(row.predicted_speedup, 2) + ", measured/predicted " +
               detail::fixed_decimal(row.measured_over_predicted, 2) + ", asymptotic bound " +
               detail::fixed_decimal(row.asymptotic_bound, 2);
        if (row.exceeds_asymptotic)
            out += "  [exceeds bound]";
        out += '\n';
    }
    return out;
}

} // namespace bspsort::bench
