#pragma once

// Block-level sorting networks over p pre-sorted blocks. "Compare-exchange"
// between two workers becomes merge_split: a linear merge that hands the
// smaller half of the union to one worker and the larger half to the other.
//
// BTN runs Batcher's bitonic network on p lines, lg(p)(lg(p)+1)/2 stages.
// OET runs p rounds of odd-even transposition. Both first sort each block
// locally with a radix-256 radix sort, then execute one merge-split stage
// per superstep; blocks stay ascending throughout, with network direction
// expressed purely by which side of a pair keeps the low half.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bspsort/bsp.hpp"
#include "bspsort/core.hpp"
#include "bspsort/radix.hpp"

namespace bspsort::netsort {

inline constexpr std::uint64_t local_sort_radix = 256;

/// Splits the multiset a ∪ b into the |a| smallest and |b| largest keys,
/// both halves sorted. Inputs must each be sorted. Ties are taken from a
/// first.
inline std::pair<KeyArray, KeyArray> merge_split(const KeyArray& a, const KeyArray& b) {
    KeyArray low;
    KeyArray high;
    low.reserve(a.size());
    high.reserve(b.size());

    std::size_t i = 0;
    std::size_t j = 0;
    while (low.size() < a.size()) {
        if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
            low.push_back(a[i++]);
        else
            low.push_back(b[j++]);
    }
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
            high.push_back(a[i++]);
        else
            high.push_back(b[j++]);
    }
    return {std::move(low), std::move(high)};
}

/// One worker's assignment in one network stage. partner < 0 means the
/// worker sits this stage out (only happens in odd-even rounds at the
/// edges).
struct StageAssignment {
    int partner = -1;
    bool keep_low = false;
};

struct BitonicSchedule {
    int p = 1;
    std::vector<std::vector<StageAssignment>> stages;
};

/// Batcher's bitonic network on p lines, one entry per (stage, worker).
/// For phase k = 2,4,...,p and sub-phase j = k/2,...,1 worker i pairs with
/// i XOR j; the pair is ascending iff (i AND k) = 0, and the member that
/// must end up with the smaller keys gets keep_low.
inline BitonicSchedule bitonic_schedule(int p) {
    if (p < 1 || !is_power_of_two(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("bitonic_schedule: p must be a power of two, got " +
                                    std::to_string(p));
    BitonicSchedule schedule;
    schedule.p = p;
    for (int k = 2; k <= p; k *= 2) {
        for (int j = k / 2; j >= 1; j /= 2) {
            std::vector<StageAssignment> stage(p);
            for (int i = 0; i < p; ++i) {
                const int partner = i ^ j;
                const bool ascending = (i & k) == 0;
                stage[i].partner = partner;
                stage[i].keep_low = ascending ? (i < partner) : (i > partner);
            }
            schedule.stages.push_back(std::move(stage));
        }
    }
    return schedule;
}

/// The p rounds of odd-even transposition on p lines: round 0 pairs
/// (0,1),(2,3),..., round 1 pairs (1,2),(3,4),..., alternating. The
/// lower-indexed worker of a pair keeps the low half; an unpaired edge
/// worker idles that round.
inline std::vector<std::vector<StageAssignment>> odd_even_rounds(int p) {
    if (p < 1)
        throw std::invalid_argument("odd_even_rounds: p must be >= 1");
    std::vector<std::vector<StageAssignment>> rounds(p);
    for (int r = 0; r < p; ++r) {
        std::vector<StageAssignment> stage(p);
        for (int i = r % 2; i + 1 < p; i += 2) {
            stage[i] = StageAssignment{i + 1, true};
            stage[i + 1] = StageAssignment{i, false};
        }
        rounds[r] = std::move(stage);
    }
    return rounds;
}

/// Equal-size padded blocks plus the stage table, ready to run. Building
/// it is setup work; run_block_network is the part worth timing.
struct PreparedNetwork {
    int p = 1;
    std::uint64_t n = 0;   // keys before padding
    std::size_t pad = 0;   // trailing max-value keys to strip from the output
    std::vector<bsp::Block> blocks;
    std::vector<std::vector<StageAssignment>> stages;
};

namespace detail {

// n not divisible by p: pad once with the maximum key value, which cannot
// displace a genuine key below it, and strip the same count from the tail.
inline PreparedNetwork prepare_blocks(const KeyArray& keys, int p,
                                      std::vector<std::vector<StageAssignment>> stages) {
    PreparedNetwork prep;
    prep.p = p;
    prep.n = keys.size();
    prep.stages = std::move(stages);

    const std::size_t block_len = (keys.size() + p - 1) / p;
    prep.pad = block_len * p - keys.size();
    prep.blocks.assign(p, {});
    for (int w = 0; w < p; ++w) {
        const std::size_t begin = std::min(keys.size(), w * block_len);
        const std::size_t end = std::min(keys.size(), begin + block_len);
        prep.blocks[w].assign(keys.begin() + begin, keys.begin() + end);
        prep.blocks[w].resize(block_len, ~Key{0});
    }
    return prep;
}

} // namespace detail

inline PreparedNetwork prepare_btn(const KeyArray& keys, int p) {
    return detail::prepare_blocks(keys, p, bitonic_schedule(p).stages);
}

inline PreparedNetwork prepare_oet(const KeyArray& keys, int p) {
    return detail::prepare_blocks(keys, p, odd_even_rounds(p));
}

/// Runs the prepared network: superstep 0 sorts each block locally with a
/// radix-256 radix sort, then one merge-split stage per superstep. The
/// concatenation of the final blocks in worker order, minus the padding,
/// is the sorted output.
inline radix::ParallelSortResult run_block_network(PreparedNetwork prep,
                                                   bool use_sequential_executor = false) {
    const int p = prep.p;
    const auto stages = std::make_shared<std::vector<std::vector<StageAssignment>>>(
        std::move(prep.stages));
    const int stage_count = static_cast<int>(stages->size());

    bsp::WorkerBody body = [stages, stage_count](int w, int step, bsp::Block& state,
                                                 bsp::Inbox& inbox, bsp::Outbox& out) -> bool {
        if (step == 0) {
            state = radix::serial_radix_sort(std::move(state), local_sort_radix);
        } else {
            // Finish stage step-1: merge with the partner's block, keep one half.
            const auto& assignment = (*stages)[step - 1][w];
            if (assignment.partner >= 0) {
                if (inbox.size() != 1 || inbox[0].source != assignment.partner ||
                    inbox[0].payload.size() != state.size())
                    throw bsp::bsp_error("worker " + std::to_string(w) + ", superstep " +
                                         std::to_string(step) +
                                         ": expected exactly the partner's block");
                auto halves = merge_split(state, inbox[0].payload);
                state = assignment.keep_low ? std::move(halves.first) : std::move(halves.second);
            }
        }
        if (step == stage_count)
            return false;
        const auto& next = (*stages)[step][w];
        if (next.partner >= 0)
            out.send(next.partner, state);
        return true;
    };

    auto result = use_sequential_executor ? bsp::sequential_simulate(p, body, std::move(prep.blocks))
                                          : bsp::run_supersteps(p, body, std::move(prep.blocks));

    radix::ParallelSortResult sorted;
    sorted.stats = result.stats;
    sorted.output.reserve(prep.n + prep.pad);
    for (const auto& block : result.blocks)
        sorted.output.insert(sorted.output.end(), block.begin(), block.end());
    sorted.output.resize(prep.n); // strip the padding keys, all at the tail
    return sorted;
}

/// Bitonic block sort; requires power-of-two p.
inline KeyArray btn_sort(const SortInstance& instance) {
    instance.validate();
    if (instance.algorithm != Algorithm::BTN)
        throw std::invalid_argument("btn_sort expects a BTN instance");
    return run_block_network(prepare_btn(instance.input, instance.processors)).output;
}

/// Odd-even transposition block sort; any p >= 1.
inline KeyArray oet_sort(const SortInstance& instance) {
    instance.validate();
    if (instance.algorithm != Algorithm::OET)
        throw std::invalid_argument("oet_sort expects an OET instance");
    return run_block_network(prepare_oet(instance.input, instance.processors)).output;
}

} // namespace bspsort::netsort
