#pragma once

// Analytical cost model for the four sorting algorithms on a multicore
// machine described by the septuplet (p, l, g, m, L, G, M): core count,
// synchronization latency, slow-memory gap, memory-unit count, memory-unit
// latency, fast-memory gap and fast-memory capacity. The formulas model
// memory traffic only, so l and L are carried but unused, m defaults to p
// and M is assumed large enough; all costs come out as exact rational
// multiples of G.
//
// With the default g = 5G and radix 256 the closed forms are
//   serial          68·N
//   parallel radix  (32/lg r)·(4(n/p)(g/G) + 2(n/p) + 2pr(g/G))
//                   = 88·n/p + 40·256·p            (r = 256)
//                   = 44·n/p + 20·256²·p           (r = 256²)
//   odd-even        68·n/p + 20·n
//   bitonic         68·n/p + 10·n·lg(p)(lg(p)+1)/p
// and every function here reduces to them exactly.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "bspsort/core.hpp"

namespace bspsort::costmodel {

using Rational = boost::multiprecision::cpp_rational;

/// Cost in units of G, exact.
using Cost = Rational;

inline constexpr std::int64_t unbounded_capacity = -1;

struct MachineParams {
    int cores = 1;                                 // p
    Rational sync_latency{0};                      // l, carried but unused
    Rational slow_gap{5};                          // g
    int memory_units = 0;                          // m; 0 means "same as cores"
    Rational memory_latency{0};                    // L, carried but unused
    Rational fast_gap{1};                          // G, the cost unit
    std::int64_t fast_capacity = unbounded_capacity; // M, assumed large enough

    static MachineParams with_cores(int p) {
        MachineParams mp;
        mp.cores = p;
        return mp;
    }

    MachineParams& set_gap_ratio(const Rational& g_over_G) {
        slow_gap = g_over_G;
        fast_gap = 1;
        return *this;
    }

    void validate() const {
        if (cores < 1)
            throw std::invalid_argument("MachineParams: p must be >= 1");
        if (fast_gap <= 0)
            throw std::invalid_argument("MachineParams: G must be positive");
        if (slow_gap < 0 || sync_latency < 0 || memory_latency < 0)
            throw std::invalid_argument("MachineParams: costs must be non-negative");
    }

    Rational gap_ratio() const { return slow_gap / fast_gap; }
};

namespace detail {

inline int rounds_for(std::uint64_t radix) {
    if (!is_power_of_two(radix))
        throw std::invalid_argument("cost model: radix must be a power of two");
    const int bits = log2_exact(radix);
    if (bits == 0 || key_bits % bits != 0)
        throw std::invalid_argument("cost model: lg(radix) must divide 32");
    return key_bits / bits;
}

// Serial radix-sort cost for a (possibly fractional) per-core key count:
// per round the keys are read twice and written once through slow memory
// (3Ng) and the count array is touched twice per key (2NG).
inline Cost serial_cost(const Rational& keys_per_core, const MachineParams& mp,
                        std::uint64_t radix) {
    const int rounds = rounds_for(radix);
    const Rational gr = mp.gap_ratio();
    return rounds * (3 * keys_per_core * gr + 2 * keys_per_core);
}

inline int stage_count_btn(int p) {
    if (p < 1 || !is_power_of_two(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("cost model: bitonic requires a power-of-two p");
    const int lg = log2_exact(static_cast<std::uint64_t>(p));
    return lg * (lg + 1) / 2;
}

} // namespace detail

/// Serial radix-r sort of N keys: (32/lg r)·(3N(g/G) + 2N).
inline Cost t_serial(std::uint64_t keys, const MachineParams& mp, std::uint64_t radix = 256) {
    mp.validate();
    return detail::serial_cost(Rational(keys), mp, radix);
}

/// Parallel radix-r sort of n keys on p cores:
/// (32/lg r)·(4(n/p)(g/G) + 2(n/p) + 2pr(g/G)); the 2pr term is the
/// scatter/gather of the per-core count arrays.
inline Cost t_parallel_radix(std::uint64_t n, const MachineParams& mp, std::uint64_t radix = 256) {
    mp.validate();
    const int rounds = detail::rounds_for(radix);
    const Rational gr = mp.gap_ratio();
    const Rational per_core = Rational(n) / mp.cores;
    return rounds * (4 * per_core * gr + 2 * per_core +
                     2 * Rational(mp.cores) * Rational(radix) * gr);
}

/// Odd-even transposition sort: local radix-256 sort of n/p keys, then p
/// merge-split rounds at 4(n/p)(g/G) each.
inline Cost t_oet(std::uint64_t n, const MachineParams& mp) {
    mp.validate();
    const Rational per_core = Rational(n) / mp.cores;
    return detail::serial_cost(per_core, mp, 256) + mp.cores * 4 * per_core * mp.gap_ratio();
}

/// Bitonic sort: local radix-256 sort of n/p keys, then lg(p)(lg(p)+1)/2
/// merge-split stages at 4(n/p)(g/G) each. Requires power-of-two p.
inline Cost t_btn(std::uint64_t n, const MachineParams& mp) {
    mp.validate();
    const int stages = detail::stage_count_btn(mp.cores);
    const Rational per_core = Rational(n) / mp.cores;
    return detail::serial_cost(per_core, mp, 256) + stages * 4 * per_core * mp.gap_ratio();
}

inline Cost t_algorithm(Algorithm algo, std::uint64_t n, const MachineParams& mp) {
    switch (algo) {
    case Algorithm::SR4: return t_serial(n, mp, 256);
    case Algorithm::PR4: return t_parallel_radix(n, mp, 256);
    case Algorithm::PR2: return t_parallel_radix(n, mp, 65536);
    case Algorithm::BTN: return t_btn(n, mp);
    case Algorithm::OET: return t_oet(n, mp);
    }
    throw std::invalid_argument("t_algorithm: unknown algorithm");
}

/// Predicted speedup over the serial radix-256 baseline at the same n.
inline Rational predicted_speedup(Algorithm algo, std::uint64_t n, const MachineParams& mp) {
    if (n == 0)
        throw std::invalid_argument("predicted_speedup: undefined for n = 0");
    if (algo == Algorithm::SR4) return 1;
    return t_serial(n, mp, 256) / t_algorithm(algo, n, mp);
}

/// n → ∞ limit of predicted_speedup. For the radix algorithms the
/// fixed 2pr(g/G) term vanishes relative to n and the limit is the ratio
/// of the per-key coefficients (68p/88 for PR4 at g = 5G); for BTN and
/// OET the speedup is independent of n.
inline Rational asymptotic_speedup(Algorithm algo, const MachineParams& mp) {
    mp.validate();
    const Rational gr = mp.gap_ratio();
    const Rational serial_per_key = detail::rounds_for(256) * (3 * gr + 2);
    switch (algo) {
    case Algorithm::SR4:
        return 1;
    case Algorithm::PR4:
    case Algorithm::PR2: {
        const std::uint64_t radix = algo == Algorithm::PR4 ? 256 : 65536;
        const Rational parallel_per_key = detail::rounds_for(radix) * (4 * gr + 2);
        return serial_per_key * mp.cores / parallel_per_key;
    }
    case Algorithm::BTN:
    case Algorithm::OET:
        return predicted_speedup(algo, 1, mp);
    }
    throw std::invalid_argument("asymptotic_speedup: unknown algorithm");
}

/// Predicted slowdown of OET relative to BTN at g = 5G.
/// printed_form=true gives (68+20p)/(68+10·lg²(p)), the approximation as
/// published; printed_form=false gives the quotient of the two closed
/// forms, (68+20p)/(68+10·lg(p)(lg(p)+1)). The two differ; p=16 gives
/// about 1.70 versus 1.45.
inline Rational predicted_ratio_oet_btn(int p, bool printed_form) {
    if (p < 1 || !is_power_of_two(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("predicted_ratio_oet_btn: p must be a power of two");
    const int lg = log2_exact(static_cast<std::uint64_t>(p));
    const Rational numerator = 68 + 20 * Rational(p);
    const Rational denominator =
        printed_form ? 68 + 10 * Rational(lg) * lg : 68 + 10 * Rational(lg) * (lg + 1);
    return numerator / denominator;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace bspsort::costmodel
