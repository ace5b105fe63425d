#pragma once

// Stable LSD radix sorting of 32-bit keys: the serial algorithm and a
// bulk-synchronous parallel variant that runs over the superstep runtime.
//
// Each parallel round is two supersteps: every worker counts the digits of
// its block and exchanges the r-entry count blocks all-to-all, then uses
// the global counts to route each of its keys to the worker owning the
// key's position in the globally digit-sorted order. Positions are ranked
// digit-major, then source-worker-major, then local order, which preserves
// LSD stability across workers; blocks are re-cut into balanced contiguous
// ranges every round.

#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bspsort/bsp.hpp"
#include "bspsort/core.hpp"

namespace bspsort::radix {

/// Digit of `key` examined in a given round, low digits first.
inline constexpr Key digit_of(Key key, int round, int bits) {
    return (key >> (round * bits)) & ((std::uint64_t{1} << bits) - 1);
}

inline int checked_digit_bits(std::uint64_t radix) {
    const int bits = digit_bits(radix);
    if (bits < 0)
        throw std::invalid_argument("radix must be a power of two whose bit width divides 32");
    if (bits > 16)
        throw std::invalid_argument("radix " + std::to_string(radix) +
                                    " needs a count array larger than memory; use r <= 65536");
    return bits;
}

/// One stable bucket pass over the digit selected by `round`. Equal-digit
/// keys keep their input order.
inline KeyArray count_sort_round(const KeyArray& keys, int round, std::uint64_t radix) {
    const int bits = checked_digit_bits(radix);
    if (round < 0 || round >= key_bits / bits)
        throw std::invalid_argument("round " + std::to_string(round) + " outside [0, " +
                                    std::to_string(key_bits / bits) + ")");

    std::vector<std::size_t> counts(radix, 0);
    for (Key k : keys)
        ++counts[digit_of(k, round, bits)];

    std::size_t running = 0;
    for (auto& c : counts) {
        const std::size_t started_at = running;
        running += c;
        c = started_at;
    }

    KeyArray out(keys.size());
    for (Key k : keys)
        out[counts[digit_of(k, round, bits)]++] = k;
    return out;
}

/// Serial LSD radix sort: exactly 32/lg(r) count-sort rounds, low digit
/// first. SR4 is this with r = 256.
inline KeyArray serial_radix_sort(KeyArray keys, std::uint64_t radix) {
    const int bits = checked_digit_bits(radix);
    const int rounds = key_bits / bits;

    KeyArray buffer(keys.size());
    std::vector<std::size_t> counts(radix);
    for (int round = 0; round < rounds; ++round) {
        std::fill(counts.begin(), counts.end(), 0);
        for (Key k : keys)
            ++counts[digit_of(k, round, bits)];
        std::size_t running = 0;
        for (auto& c : counts) {
            const std::size_t started_at = running;
            running += c;
            c = started_at;
        }
        for (Key k : keys)
            buffer[counts[digit_of(k, round, bits)]++] = k;
        keys.swap(buffer);
    }
    return keys;
}

namespace detail {

// Balanced contiguous partition of n positions over p workers: the first
// (n mod p) workers hold one extra key.
struct Partition {
    std::uint64_t n = 0;
    int p = 1;

    std::uint64_t small() const { return n / p; }
    std::uint64_t big_count() const { return n % p; }

    std::uint64_t size_of(int w) const {
        return small() + (static_cast<std::uint64_t>(w) < big_count() ? 1 : 0);
    }

    std::uint64_t offset_of(int w) const {
        const auto uw = static_cast<std::uint64_t>(w);
        return uw * small() + std::min(uw, big_count());
    }

    int owner_of(std::uint64_t pos) const {
        const std::uint64_t big = small() + 1;
        const std::uint64_t split = big_count() * big;
        if (pos < split) return static_cast<int>(pos / big);
        return static_cast<int>(big_count() + (pos - split) / small());
    }
};

struct RadixPlan {
    Partition part;
    std::uint64_t radix = 256;
    int bits = 8;
    int rounds = 4;
};

inline bsp::Block count_digits(const bsp::Block& block, int round, const RadixPlan& plan) {
    bsp::Block counts(plan.radix, 0);
    for (bsp::Word k : block)
        ++counts[digit_of(k, round, plan.bits)];
    return counts;
}

// counts[v][d] for all source workers v, as exchanged this round.
using CountMatrix = std::vector<bsp::Block>;

inline std::vector<std::uint64_t> digit_starts(const CountMatrix& counts, const RadixPlan& plan) {
    std::vector<std::uint64_t> starts(plan.radix + 1, 0);
    for (const auto& block : counts)
        for (std::uint64_t d = 0; d < plan.radix; ++d)
            starts[d + 1] += block[d];
    for (std::uint64_t d = 0; d < plan.radix; ++d)
        starts[d + 1] += starts[d];
    return starts;
}

// Sort own block by this round's digit, then cut it into the contiguous
// slices owned by each destination worker and send them. Positions along
// the digit-sorted block are strictly increasing, so every destination
// receives one contiguous slice.
inline bsp::Block sort_and_scatter(bsp::Block block, int me, int round, const RadixPlan& plan,
                                   const CountMatrix& counts, bsp::Outbox& out) {
    KeyArray sorted = count_sort_round(block, round, plan.radix);

    const auto starts = digit_starts(counts, plan);
    std::vector<std::uint64_t> next_pos(plan.radix);
    for (std::uint64_t d = 0; d < plan.radix; ++d) {
        std::uint64_t before_me = 0;
        for (int v = 0; v < me; ++v)
            before_me += counts[v][d];
        next_pos[d] = starts[d] + before_me;
    }

    std::size_t run_begin = 0;
    int run_dest = -1;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto pos = next_pos[digit_of(sorted[i], round, plan.bits)]++;
        const int dest = plan.part.owner_of(pos);
        if (dest != run_dest) {
            if (run_dest >= 0)
                out.send(run_dest, bsp::Block(sorted.begin() + run_begin, sorted.begin() + i));
            run_dest = dest;
            run_begin = i;
        }
    }
    if (run_dest >= 0)
        out.send(run_dest, bsp::Block(sorted.begin() + run_begin, sorted.end()));
    return sorted;
}

// Rebuild my block for the next round from the received slices. Walking
// (digit, source worker) in order and clipping each segment against my
// position range consumes every source's slice strictly left to right.
inline bsp::Block gather_slices(int me, bsp::Inbox& inbox, const RadixPlan& plan,
                                const CountMatrix& counts, int superstep) {
    const int p = plan.part.p;
    std::vector<const bsp::Block*> by_source(p, nullptr);
    for (const auto& msg : inbox)
        by_source[msg.source] = &msg.payload;
    std::vector<std::size_t> cursor(p, 0);

    const std::uint64_t lo = plan.part.offset_of(me);
    const std::uint64_t hi = lo + plan.part.size_of(me);
    const auto starts = digit_starts(counts, plan);

    bsp::Block block;
    block.reserve(hi - lo);
    for (std::uint64_t d = 0; d < plan.radix; ++d) {
        std::uint64_t seg = starts[d];
        for (int v = 0; v < p; ++v) {
            const std::uint64_t c = counts[v][d];
            const std::uint64_t take_lo = std::max(seg, lo);
            const std::uint64_t take_hi = std::min(seg + c, hi);
            seg += c;
            if (take_hi <= take_lo) continue;
            const auto want = static_cast<std::size_t>(take_hi - take_lo);
            if (by_source[v] == nullptr || cursor[v] + want > by_source[v]->size())
                throw bsp::bsp_error("worker " + std::to_string(me) + ", superstep " +
                                     std::to_string(superstep) + ": key slice from worker " +
                                     std::to_string(v) + " shorter than the exchanged counts");
            const auto begin = by_source[v]->begin() + cursor[v];
            block.insert(block.end(), begin, begin + want);
            cursor[v] += want;
        }
    }
    if (block.size() != hi - lo)
        throw bsp::bsp_error("worker " + std::to_string(me) + ", superstep " +
                             std::to_string(superstep) + ": rebuilt block has " +
                             std::to_string(block.size()) + " keys, expected " +
                             std::to_string(hi - lo));
    return block;
}

} // namespace detail

/// Input split into balanced per-worker blocks, ready to run. Building it
/// is setup work; run_parallel_radix is the part worth timing.
struct PreparedRadix {
    detail::RadixPlan plan;
    std::vector<bsp::Block> blocks;
};

inline PreparedRadix prepare_parallel_radix(const KeyArray& keys, int p, std::uint64_t radix) {
    if (p < 1)
        throw std::invalid_argument("parallel radix sort: p must be >= 1");
    const int bits = checked_digit_bits(radix);

    PreparedRadix prep;
    prep.plan.part = detail::Partition{keys.size(), p};
    prep.plan.radix = radix;
    prep.plan.bits = bits;
    prep.plan.rounds = key_bits / bits;
    prep.blocks.resize(p);
    for (int w = 0; w < p; ++w) {
        const auto begin = keys.begin() + static_cast<std::ptrdiff_t>(prep.plan.part.offset_of(w));
        prep.blocks[w].assign(begin, begin + static_cast<std::ptrdiff_t>(prep.plan.part.size_of(w)));
    }
    return prep;
}

struct ParallelSortResult {
    KeyArray output;
    bsp::RunStats stats;
};

/// Run the prepared parallel radix sort: 2 supersteps per round (counter
/// all-to-all, then key routing) plus a final superstep that assembles the
/// last round's blocks. Concatenating the final blocks in worker order
/// yields the sorted output.
inline ParallelSortResult run_parallel_radix(PreparedRadix prep,
                                             bool use_sequential_executor = false) {
    const auto plan = prep.plan;
    const int p = plan.part.p;
    auto scratch = std::make_shared<std::vector<detail::CountMatrix>>(p);

    bsp::WorkerBody body = [plan, scratch](int w, int step, bsp::Block& state, bsp::Inbox& inbox,
                                           bsp::Outbox& out) -> bool {
        const int p = plan.part.p;
        const int round = step / 2;
        if (step % 2 == 0) {
            if (round > 0)
                state = detail::gather_slices(w, inbox, plan, (*scratch)[w], step);
            if (round == plan.rounds)
                return false;
            bsp::Block counts = detail::count_digits(state, round, plan);
            for (int dest = 0; dest < p; ++dest)
                out.send(dest, counts);
            return true;
        }

        auto& matrix = (*scratch)[w];
        matrix.assign(p, {});
        if (inbox.size() != static_cast<std::size_t>(p))
            throw bsp::bsp_error("worker " + std::to_string(w) + ", superstep " +
                                 std::to_string(step) + ": expected " + std::to_string(p) +
                                 " count blocks, got " + std::to_string(inbox.size()));
        for (auto& msg : inbox)
            matrix[msg.source] = std::move(msg.payload);
        state = detail::sort_and_scatter(std::move(state), w, round, plan, matrix, out);
        return true;
    };

    auto result = use_sequential_executor
                      ? bsp::sequential_simulate(p, body, std::move(prep.blocks))
                      : bsp::run_supersteps(p, body, std::move(prep.blocks));

    ParallelSortResult sorted;
    sorted.stats = result.stats;
    sorted.output.reserve(plan.part.n);
    for (const auto& block : result.blocks)
        sorted.output.insert(sorted.output.end(), block.begin(), block.end());
    return sorted;
}

/// PR4 / PR2 entry point.
inline KeyArray parallel_radix_sort(const SortInstance& instance) {
    instance.validate();
    if (instance.algorithm != Algorithm::PR4 && instance.algorithm != Algorithm::PR2)
        throw std::invalid_argument("parallel_radix_sort handles pr4 and pr2 only");
    auto prep = prepare_parallel_radix(instance.input, instance.processors, instance.radix);
    return run_parallel_radix(std::move(prep)).output;
}

} // namespace bspsort::radix
