// Acceptance suite: one pass/fail line per criterion. Exits with the
// number of failed criteria. argv[1] must name the benchmark CLI binary
// (the ctest registration passes it automatically).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bspsort/bspsort.hpp"
#include "test_support.hpp"

using namespace bspsort;
using costmodel::Rational;
using test_support::oracle_sort;

namespace {

struct Criterion {
    bool ok = true;
    std::vector<std::string> details;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            details.push_back("unmet: " + what);
        }
    }
    void note(const std::string& line) { details.push_back(line); }
};

int g_failures = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<void(Criterion&)>& body) {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.details.push_back(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %d: %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", number, title.c_str(),
                seconds);
    for (const auto& line : c.details)
        std::printf("      %s\n", line.c_str());
    std::fflush(stdout);
    if (!c.ok) ++g_failures;
}

KeyArray adversarial_input(int kind, std::size_t n) {
    KeyArray keys(n);
    switch (kind) {
    case 0: std::fill(keys.begin(), keys.end(), 0xABCD1234u); break;
    case 1:
        for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<Key>(i * 3);
        break;
    default:
        for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<Key>((n - i) * 3);
        break;
    }
    return keys;
}

KeyArray run_algorithm(Algorithm algo, const KeyArray& input, int p) {
    SortInstance inst;
    inst.input = input;
    inst.processors = p;
    inst.algorithm = algo;
    inst.radix = algo == Algorithm::PR2 ? 65536 : 256;
    return sort_instance(inst);
}

// ---- criterion 1 ------------------------------------------------------

void criterion_oracle_correctness(Criterion& c) {
    const std::vector<std::size_t> sizes{0, 1, 2, 10, 1000, 100000, 1000000};
    const std::vector<int> all_p{1, 2, 3, 4, 5, 8, 16};
    const std::vector<int> pow2_p{1, 2, 4, 8, 16};
    long checks = 0;

    for (std::size_t n : sizes) {
        std::vector<KeyArray> inputs;
        for (std::uint64_t seed : {11u, 22u, 33u})
            inputs.push_back(generate_uniform_keys(n, seed));
        for (int kind : {0, 1, 2})
            inputs.push_back(adversarial_input(kind, n));

        for (const KeyArray& input : inputs) {
            const KeyArray expected = oracle_sort(input);
            for (Algorithm algo :
                 {Algorithm::SR4, Algorithm::PR4, Algorithm::PR2, Algorithm::BTN, Algorithm::OET}) {
                const std::vector<int>& p_list = algo == Algorithm::SR4 ? std::vector<int>{1}
                                                 : algo == Algorithm::BTN ? pow2_p
                                                                          : all_p;
                for (int p : p_list) {
                    const KeyArray output = run_algorithm(algo, input, p);
                    ++checks;
                    if (output != expected) {
                        c.expect(false, std::string(algorithm_name(algo)) + " n=" +
                                            std::to_string(n) + " p=" + std::to_string(p) +
                                            " differs from the comparison-sort oracle");
                        return;
                    }
                }
            }
        }
    }
    c.note(std::to_string(checks) + " exact oracle comparisons across 5 algorithms, 7 sizes, "
                                    "3 seeds + 3 adversarial inputs");
}

// ---- criterion 2 ------------------------------------------------------

void criterion_stability(Criterion& c) {
    // Index-tagged stability of a single count-sort round, size 10^4.
    const std::size_t n = 10000;
    std::mt19937_64 rng(99);
    KeyArray tagged(n);
    for (std::size_t i = 0; i < n; ++i)
        tagged[i] = (static_cast<Key>(rng() % (1u << 18)) << 14) | static_cast<Key>(i);
    const KeyArray out = radix::count_sort_round(tagged, 3, 256);
    for (std::size_t i = 1; i < out.size(); ++i) {
        const Key a = radix::digit_of(out[i - 1], 3, 8);
        const Key b = radix::digit_of(out[i], 3, 8);
        c.expect(a <= b, "count_sort_round output not digit-ordered");
        if (a == b)
            c.expect((out[i - 1] & 0x3fff) < (out[i] & 0x3fff),
                     "equal-digit keys reordered at position " + std::to_string(i));
        if (!c.ok) return;
    }

    // Parallel result bit-identical to serial for every tested (n, p, r).
    for (std::size_t size : {std::size_t{0}, std::size_t{1}, std::size_t{997}, n}) {
        KeyArray random_input = generate_uniform_keys(size, 5);
        KeyArray clustered = random_input;
        for (auto& k : clustered) k %= 31;
        for (const KeyArray& input : {random_input, clustered}) {
            for (std::uint64_t r : {std::uint64_t{256}, std::uint64_t{65536}}) {
                const KeyArray serial = radix::serial_radix_sort(input, r);
                for (int p : {1, 2, 3, 4, 5, 8, 16}) {
                    auto prep = radix::prepare_parallel_radix(input, p, r);
                    const KeyArray parallel = radix::run_parallel_radix(std::move(prep)).output;
                    if (parallel != serial) {
                        c.expect(false, "parallel != serial at n=" + std::to_string(size) +
                                            " p=" + std::to_string(p) + " r=" + std::to_string(r));
                        return;
                    }
                }
            }
        }
    }
    c.note("count_sort_round stable on 10^4 index-tagged keys; parallel == serial bit-for-bit "
           "over the (n, p, r) grid");
}

// ---- criterion 3 ------------------------------------------------------

std::vector<int> apply_stages_scalar(const std::vector<std::vector<netsort::StageAssignment>>& stages,
                                     std::vector<int> values) {
    for (const auto& stage : stages)
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& a = stage[i];
            if (a.partner < 0 || a.partner < static_cast<int>(i)) continue;
            const int lo = std::min(values[i], values[a.partner]);
            const int hi = std::max(values[i], values[a.partner]);
            values[i] = a.keep_low ? lo : hi;
            values[a.partner] = a.keep_low ? hi : lo;
        }
    return values;
}

void criterion_network_structure(Criterion& c) {
    for (int p = 1; p <= 256; p *= 2) {
        const int lg = log2_exact(static_cast<std::uint64_t>(p));
        const auto schedule = netsort::bitonic_schedule(p);
        c.expect(schedule.stages.size() == static_cast<std::size_t>(lg * (lg + 1) / 2),
                 "stage count wrong for p=" + std::to_string(p));
    }

    long vectors = 0;
    auto exhaust = [&](const std::vector<std::vector<netsort::StageAssignment>>& stages, int p,
                       const char* name) {
        for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
            std::vector<int> values(p);
            for (int i = 0; i < p; ++i) values[i] = (mask >> i) & 1;
            values = apply_stages_scalar(stages, values);
            ++vectors;
            if (!std::is_sorted(values.begin(), values.end())) {
                c.expect(false, std::string(name) + " fails the 0-1 principle at p=" +
                                    std::to_string(p) + " mask=" + std::to_string(mask));
                return false;
            }
        }
        return true;
    };

    for (int p : {1, 2, 4, 8})
        if (!exhaust(netsort::bitonic_schedule(p).stages, p, "bitonic schedule")) return;
    for (int p = 1; p <= 12; ++p)
        if (!exhaust(netsort::odd_even_rounds(p), p, "odd-even rounds")) return;
    c.note("stage counts match lg(p)(lg(p)+1)/2 for p in {1..256}; " + std::to_string(vectors) +
           " zero-one vectors sorted exhaustively");
}

// ---- criterion 4 ------------------------------------------------------

void criterion_cost_model_exactness(Criterion& c) {
    const std::uint64_t ns[] = {1, 3, 1000, 8000000, 128000000, 999999937ULL};
    auto mp = [](int p) { return costmodel::MachineParams::with_cores(p); };

    for (std::uint64_t n : ns) {
        c.expect(costmodel::t_serial(n, mp(1), 256) == Rational(68) * n,
                 "t_serial(N, g=5G, r=256) != 68N");
        for (int p : {1, 2, 4, 5, 8, 16}) {
            c.expect(costmodel::t_parallel_radix(n, mp(p), 256) ==
                         Rational(88) * n / p + Rational(10240) * p,
                     "t_parallel r=256 != 88n/p + 10240p");
            c.expect(costmodel::t_parallel_radix(n, mp(p), 65536) ==
                         Rational(44) * n / p + Rational(1310720) * p,
                     "t_parallel r=256^2 != 44n/p + 1310720p");
            c.expect(costmodel::t_oet(n, mp(p)) == Rational(68) * n / p + Rational(20) * n,
                     "t_oet != 68n/p + 20n");
        }
        for (int p : {1, 2, 4, 8, 16}) {
            const int lg = log2_exact(static_cast<std::uint64_t>(p));
            c.expect(costmodel::t_btn(n, mp(p)) ==
                         Rational(68) * n / p + Rational(10) * n * lg * (lg + 1) / p,
                     "t_btn != 68n/p + 10n lg(p)(lg(p)+1)/p");
        }
        if (!c.ok) return;
    }
    c.note("all five closed forms hold as exact rational equalities over the (n, p) grid");
}

// ---- criterion 5 ------------------------------------------------------

void criterion_predictors(Criterion& c) {
    auto mp = [](int p) { return costmodel::MachineParams::with_cores(p); };

    c.expect(costmodel::asymptotic_speedup(Algorithm::PR4, mp(4)) == Rational(68 * 4, 88),
             "PR4 asymptote p=4 != 68p/88");
    c.expect(costmodel::asymptotic_speedup(Algorithm::PR4, mp(8)) == Rational(68 * 8, 88),
             "PR4 asymptote p=8 != 68p/88");
    c.expect(costmodel::asymptotic_speedup(Algorithm::PR4, mp(16)) == Rational(68 * 16, 88),
             "PR4 asymptote p=16 != 68p/88");
    const double pr4_values[] = {3.09, 6.18, 12.36};
    const int pr4_p[] = {4, 8, 16};
    for (int i = 0; i < 3; ++i) {
        const double v =
            costmodel::to_double(costmodel::asymptotic_speedup(Algorithm::PR4, mp(pr4_p[i])));
        c.expect(std::abs(v - pr4_values[i]) < 0.005,
                 "PR4 asymptote decimal off at p=" + std::to_string(pr4_p[i]));
    }

    const double btn_values[] = {1.545, 2.125, 2.894, 4.060};
    const double paper_btn[] = {1.6, 2.2, 2.9, 4.0};
    const int btn_p[] = {2, 4, 8, 16};
    for (int i = 0; i < 4; ++i) {
        const Rational exact = Rational(68 * btn_p[i], 68 + 10 * (i + 1) * (i + 2));
        c.expect(costmodel::predicted_speedup(Algorithm::BTN, 1 << 20, mp(btn_p[i])) == exact,
                 "BTN prediction wrong at p=" + std::to_string(btn_p[i]));
        const double v = costmodel::to_double(exact);
        c.expect(std::abs(v - btn_values[i]) < 0.0005,
                 "BTN prediction decimal off at p=" + std::to_string(btn_p[i]));
        c.expect(std::abs(v - paper_btn[i]) <= 0.1,
                 "BTN prediction not within 0.1 of the published rounding at p=" +
                     std::to_string(btn_p[i]));
    }

    const int ratio_p[] = {2, 4, 8};
    for (int p : ratio_p) {
        const double v = costmodel::to_double(costmodel::predicted_ratio_oet_btn(p, true));
        c.expect(v >= 1.37 - 0.01 && v <= 1.44 + 0.01,
                 "printed OET/BTN ratio outside 1.37..1.44 at p=" + std::to_string(p));
    }
    const double r16 = costmodel::to_double(costmodel::predicted_ratio_oet_btn(16, true));
    c.expect(std::abs(r16 - 1.70) <= 0.01, "printed OET/BTN ratio at p=16 not ~1.70");
    c.note("predictors reproduce the published figures; printed p=16 ratio " +
           std::to_string(r16));
}

// ---- criterion 6 ------------------------------------------------------

bench::BenchReport quick_bench(std::vector<Algorithm> algos, std::vector<std::uint64_t> sizes,
                               std::vector<int> ps, int reps) {
    bench::BenchConfig config;
    config.algorithms = std::move(algos);
    config.sizes = std::move(sizes);
    config.processor_counts = std::move(ps);
    config.repetitions = reps;
    config.seed = 12;
    return bench::run_benchmark(config);
}

const bench::BenchRow* find_row(const bench::BenchReport& report, Algorithm a, std::uint64_t n,
                                int p) {
    for (const auto& row : report.rows)
        if (row.algorithm == a && row.n == n && row.p == p) return &row;
    return nullptr;
}

void criterion_measured_behaviour(Criterion& c) {
    const unsigned cores = std::thread::hardware_concurrency();

    // (a) PR4 at p=4, n=32M must beat the serial sort by > 1.5x on a
    // machine with at least 4 cores; on smaller machines the premise
    // fails and the measurement is reported as information only.
    {
        const auto report = quick_bench({Algorithm::PR4}, {32000000}, {4}, 2);
        const auto* row = find_row(report, Algorithm::PR4, 32000000, 4);
        if (row == nullptr || row->status != bench::CellStatus::ok) {
            c.expect(false, "pr4 n=32M p=4 cell did not run");
            return;
        }
        std::ostringstream os;
        os.precision(3);
        os << "(a) pr4 n=32M p=4 speedup " << row->speedup << " on " << cores
           << " hardware cores";
        if (cores >= 4) {
            c.expect(row->speedup > 1.5, "pr4 n=32M p=4 speedup not above 1.5");
            c.note(os.str());
        } else {
            c.note(os.str() + "; bound applies to machines with >= 4 cores, informational here");
        }
    }

    // (b) Measured BTN speedup must stay within 2x of the model's
    // asymptotic bound; exceeding the bound itself is flagged, not failed.
    {
        auto report = quick_bench({Algorithm::BTN}, {1000000}, {2, 4, 8}, 2);
        bench::compare_with_model(report, Rational(5));
        for (int p : {2, 4, 8}) {
            const auto* row = find_row(report, Algorithm::BTN, 1000000, p);
            if (row == nullptr || row->status != bench::CellStatus::ok) {
                c.expect(false, "btn n=1M cell missing at p=" + std::to_string(p));
                continue;
            }
            std::ostringstream os;
            os.precision(3);
            os << "(b) btn n=1M p=" << p << " speedup " << row->speedup << ", asymptotic bound "
               << row->asymptotic_bound;
            if (row->exceeds_asymptotic) os << " [exceeds bound, flagged]";
            c.note(os.str());
            c.expect(row->speedup <= 2.0 * row->asymptotic_bound,
                     "btn speedup more than 2x above the model bound at p=" + std::to_string(p));
        }
    }

    // (c) Small-input threshold: report whether btn/oet beat pr4 for
    // n <= 8K at p in {2,4}. Hardware dependent, so direction only.
    {
        const auto report =
            quick_bench({Algorithm::PR4, Algorithm::BTN, Algorithm::OET}, {1000, 2000, 8000},
                        {2, 4}, 4);
        int wins = 0;
        int cells = 0;
        for (std::uint64_t n : {1000u, 2000u, 8000u})
            for (int p : {2, 4}) {
                const auto* pr4 = find_row(report, Algorithm::PR4, n, p);
                const auto* btn = find_row(report, Algorithm::BTN, n, p);
                const auto* oet = find_row(report, Algorithm::OET, n, p);
                if (pr4 == nullptr || btn == nullptr || oet == nullptr) continue;
                ++cells;
                if (btn->mean_seconds < pr4->mean_seconds &&
                    oet->mean_seconds < pr4->mean_seconds)
                    ++wins;
            }
        c.note("(c) btn and oet both beat pr4 in " + std::to_string(wins) + "/" +
               std::to_string(cells) + " small-n cells (direction check, not enforced)");
    }
}

// ---- criterion 7 ------------------------------------------------------

void criterion_runtime_determinism(Criterion& c) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto program = test_support::make_random_program(seed);
        const auto parallel = bsp::run_supersteps(program.p, program.body, program.initial);
        const auto sequential =
            bsp::sequential_simulate(program.p, program.body, program.initial);
        if (parallel.blocks != sequential.blocks) {
            c.expect(false, "executor divergence at seed " + std::to_string(seed));
            return;
        }
        c.expect(parallel.stats.messages_sent == parallel.stats.messages_delivered,
                 "messages lost or duplicated at seed " + std::to_string(seed));
        if (!c.ok) return;
    }
    c.note("100 randomized programs bit-identical across the threaded and sequential executors");
}

// ---- criterion 8 ------------------------------------------------------

void criterion_cli_contract(Criterion& c, const std::string& cli_path) {
    namespace fs = std::filesystem;
    const fs::path out = fs::temp_directory_path() / "bspsort_acceptance.csv";
    std::error_code ec;
    fs::remove(out, ec);

    // Table 2's grid shape — 4 algorithms x p in {2,4,8} x three sizes —
    // at desk-scale sizes.
    const std::string cmd = cli_path +
                            " --algo pr4,pr2,btn,oet --n 80K,320K,1280K --p 2,4,8"
                            " --reps 2 --seed 3 --verify --format csv --out " +
                            out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    c.expect(status != -1, "failed to launch the CLI");
    c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0,
             "CLI exit status not 0 with --verify on");

    std::ifstream file(out);
    c.expect(file.good(), "CLI wrote no output file");
    std::stringstream buffer;
    buffer << file.rdbuf();
    const std::string text = buffer.str();

    bench::BenchReport parsed;
    try {
        parsed = bench::parse_csv(text);
    } catch (const std::exception& e) {
        c.expect(false, std::string("CSV does not parse: ") + e.what());
        return;
    }

    // 3 serial baseline rows + 4 algorithms x 3 p x 3 n speedup rows.
    c.expect(parsed.rows.size() == 3 + 36,
             "expected 39 executed rows, got " + std::to_string(parsed.rows.size()));
    int serial_rows = 0;
    for (const auto& row : parsed.rows) {
        if (row.algorithm == Algorithm::SR4) ++serial_rows;
        c.expect(row.verified, "row not verified in --verify mode");
    }
    c.expect(serial_rows == 3, "expected one serial baseline row per size");
    c.expect(bench::emit_csv(parsed) == text, "CSV does not round-trip losslessly");
    if (c.ok)
        c.note("39 rows, exact column set, lossless round-trip, exit status 0");
    fs::remove(out, ec);
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli_path = argc > 1 ? argv[1] : "";

    run_criterion(1, "oracle correctness across all algorithms, sizes and worker counts",
                  criterion_oracle_correctness);
    run_criterion(2, "count-sort stability and parallel == serial bit-exactness",
                  criterion_stability);
    run_criterion(3, "network stage counts and exhaustive 0-1 validation",
                  criterion_network_structure);
    run_criterion(4, "cost-model closed forms hold exactly", criterion_cost_model_exactness);
    run_criterion(5, "speedup and ratio predictors reproduce the published figures",
                  criterion_predictors);
    run_criterion(6, "measured speedups behave as the model allows", criterion_measured_behaviour);
    run_criterion(7, "runtime determinism: threaded == sequential on 100 random programs",
                  criterion_runtime_determinism);
    if (cli_path.empty()) {
        std::printf("FAIL  criterion 8: CLI contract (no CLI path given)\n");
        ++g_failures;
    } else {
        run_criterion(8, "CLI emits the exact CSV contract and exits clean",
                      [&](Criterion& c) { criterion_cli_contract(c, cli_path); });
    }

    std::printf("%d of 8 criteria failed\n", g_failures);
    return g_failures;
}
