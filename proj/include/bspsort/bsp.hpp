#pragma once

// Minimal bulk-synchronous superstep runtime. p workers repeatedly run a
// local body, publish addressed blocks, and synchronize at a barrier; a
// block sent in superstep t is readable in superstep t+1 and never in t.
//
// Two executors share one contract: run_supersteps (p concurrent threads)
// and sequential_simulate (round-robin on one thread, the determinism
// oracle). For any deterministic worker body the two produce bit-identical
// results.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace bspsort::bsp {

using Word = std::uint32_t;
using Block = std::vector<Word>;

struct Message {
    int source = 0;
    Block payload;
};

// Messages are delivered grouped by source worker in ascending order,
// preserving per-source send order.
using Inbox = std::vector<Message>;

class bsp_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
struct Exchange;
}

/// Messages queued by one worker during the current superstep.
class Outbox {
public:
    void send(int dest, Block payload) {
        if (dest < 0 || dest >= worker_count_)
            throw bsp_error("worker " + std::to_string(worker_) + ", superstep " +
                            std::to_string(superstep_) + ": destination " + std::to_string(dest) +
                            " outside [0, " + std::to_string(worker_count_) + ")");
        sent_messages_ += 1;
        sent_words_ += payload.size();
        entries_.push_back(Entry{dest, std::move(payload)});
    }

    int worker() const { return worker_; }
    int superstep() const { return superstep_; }

private:
    friend struct detail::Exchange;

    struct Entry {
        int dest;
        Block payload;
    };

    std::vector<Entry> entries_;
    int worker_ = 0;
    int superstep_ = 0;
    int worker_count_ = 1;
    std::uint64_t sent_messages_ = 0;
    std::uint64_t sent_words_ = 0;
};

/// Worker body, invoked once per superstep with the worker's persistent
/// state and the messages delivered at the previous barrier. Returns true
/// to request another superstep. A body may touch only its own state and
/// inbox; all cross-worker data must go through the outbox.
using WorkerBody =
    std::function<bool(int worker, int superstep, Block& state, Inbox& inbox, Outbox& out)>;

struct RunStats {
    int supersteps = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t words_sent = 0;
    std::uint64_t words_delivered = 0;
};

struct RunResult {
    std::vector<Block> blocks; // final per-worker state, worker order
    RunStats stats;
};

inline constexpr int default_superstep_limit = 1 << 20;

namespace detail {

// Phase-counting barrier. libstdc++ 11's std::barrier can lose wakeups
// under contention (gcc bug 102445), so the runtime carries its own.
class PhaseBarrier {
public:
    explicit PhaseBarrier(int parties) : parties_(parties) {}

    void arrive_and_wait() {
        std::unique_lock<std::mutex> lock(mutex_);
        const std::uint64_t phase = phase_;
        if (++arrived_ == parties_) {
            arrived_ = 0;
            ++phase_;
            cv_.notify_all();
        } else {
            cv_.wait(lock, [&] { return phase_ != phase; });
        }
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int parties_;
    int arrived_ = 0;
    std::uint64_t phase_ = 0;
};

struct Exchange {
    static void reset(Outbox& out, int worker, int superstep, int worker_count) {
        out.worker_ = worker;
        out.superstep_ = superstep;
        out.worker_count_ = worker_count;
        out.entries_.clear();
    }

    // Moves every entry addressed to `dest` out of the outboxes, source
    // worker order first, send order within a source.
    static void collect(std::vector<Outbox>& outboxes, int dest, Inbox& inbox, RunStats& stats) {
        for (std::size_t src = 0; src < outboxes.size(); ++src) {
            for (auto& e : outboxes[src].entries_) {
                if (e.dest != dest) continue;
                stats.messages_delivered += 1;
                stats.words_delivered += e.payload.size();
                inbox.push_back(Message{static_cast<int>(src), std::move(e.payload)});
            }
        }
    }

    static bool empty(const Outbox& out) { return out.entries_.empty(); }

    static void add_sent(const Outbox& out, RunStats& stats) {
        stats.messages_sent += out.sent_messages_;
        stats.words_sent += out.sent_words_;
    }

    static void validate_args(int p, const std::vector<Block>& initial) {
        if (p < 1)
            throw std::invalid_argument("superstep runtime: p must be >= 1");
        if (initial.size() != static_cast<std::size_t>(p))
            throw std::invalid_argument("superstep runtime: expected one initial block per worker");
    }
};

} // namespace detail

/// Single-threaded reference executor: the same program semantics as
/// run_supersteps, applied worker by worker in round-robin order.
inline RunResult sequential_simulate(int p, const WorkerBody& body, std::vector<Block> initial,
                                     int superstep_limit = default_superstep_limit) {
    detail::Exchange::validate_args(p, initial);

    std::vector<Block> states = std::move(initial);
    std::vector<Inbox> inboxes(p);
    std::vector<Outbox> outboxes(p);
    RunStats stats;

    for (int step = 0;; ++step) {
        if (step >= superstep_limit)
            throw bsp_error("superstep limit of " + std::to_string(superstep_limit) +
                            " exceeded; program does not terminate");
        bool any = false;
        for (int w = 0; w < p; ++w) {
            detail::Exchange::reset(outboxes[w], w, step, p);
            any = body(w, step, states[w], inboxes[w], outboxes[w]) || any;
        }
        stats.supersteps = step + 1;

        if (!any) {
            for (int w = 0; w < p; ++w)
                if (!detail::Exchange::empty(outboxes[w]))
                    throw bsp_error("worker " + std::to_string(w) + ", superstep " +
                                    std::to_string(step) +
                                    ": message sent in the final superstep is undeliverable");
            for (auto& out : outboxes)
                detail::Exchange::add_sent(out, stats);
            break;
        }

        std::vector<Inbox> next(p);
        for (int w = 0; w < p; ++w)
            detail::Exchange::collect(outboxes, w, next[w], stats);
        inboxes = std::move(next);
    }
    return RunResult{std::move(states), stats};
}

/// Concurrent executor: p worker threads separated by full barriers.
/// Deterministic — the result is bit-identical to sequential_simulate on
/// the same program and input.
inline RunResult run_supersteps(int p, const WorkerBody& body, std::vector<Block> initial,
                                int superstep_limit = default_superstep_limit) {
    detail::Exchange::validate_args(p, initial);

    std::vector<Block> states = std::move(initial);
    std::vector<Inbox> inboxes(p);
    std::vector<Inbox> staged(p);
    std::vector<Outbox> outboxes(p);
    std::vector<RunStats> worker_stats(p);
    std::vector<char> votes(static_cast<std::size_t>(p), 0);

    // Every stop decision below must read only flags frozen by a barrier
    // of the current superstep. A single shared abort flag would race: a
    // worker released first from barrier 2 can reach the next superstep's
    // body and raise the flag while a slow worker is still making this
    // superstep's exit decision, splitting the workers across barriers.
    // Hence one flag per phase: fault_in_body is written only before
    // barrier 1 and read between the barriers; fault_in_collect is
    // written only between the barriers and read right after barrier 2.
    // Neither can be rewritten until every reader passed the next barrier.
    std::atomic<bool> fault_in_body{false};
    std::atomic<bool> fault_in_collect{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    detail::PhaseBarrier gate(p);

    auto fail = [&](std::atomic<bool>& flag, std::exception_ptr ep) {
        {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = ep;
        }
        flag.store(true, std::memory_order_release);
    };

    auto worker_loop = [&](int w) {
        for (int step = 0;; ++step) {
            if (!fault_in_body.load(std::memory_order_acquire)) {
                try {
                    if (step >= superstep_limit)
                        throw bsp_error("superstep limit of " + std::to_string(superstep_limit) +
                                        " exceeded; program does not terminate");
                    detail::Exchange::reset(outboxes[w], w, step, p);
                    votes[w] = body(w, step, states[w], inboxes[w], outboxes[w]) ? 1 : 0;
                    worker_stats[w].supersteps = step + 1;
                } catch (...) {
                    votes[w] = 0;
                    fail(fault_in_body, std::current_exception());
                }
            } else {
                votes[w] = 0;
            }

            // Barrier 1: outboxes, votes and fault_in_body are now frozen.
            gate.arrive_and_wait();

            const bool stop_body = fault_in_body.load(std::memory_order_acquire);
            bool proceed = false;
            if (!stop_body) {
                try {
                    bool any = false;
                    for (char v : votes) any = any || (v != 0);
                    if (any) {
                        staged[w].clear();
                        detail::Exchange::collect(outboxes, w, staged[w], worker_stats[w]);
                        proceed = true;
                    } else if (!detail::Exchange::empty(outboxes[w])) {
                        throw bsp_error("worker " + std::to_string(w) + ", superstep " +
                                        std::to_string(step) +
                                        ": message sent in the final superstep is undeliverable");
                    }
                } catch (...) {
                    fail(fault_in_collect, std::current_exception());
                }
            }

            // Barrier 2: collections and fault_in_collect are now frozen,
            // so every worker reaches the same exit decision.
            gate.arrive_and_wait();

            if (stop_body || fault_in_collect.load(std::memory_order_acquire) || !proceed)
                break;
            inboxes[w] = std::move(staged[w]);
        }
    };

    {
        std::vector<std::jthread> threads;
        threads.reserve(p);
        for (int w = 0; w < p; ++w)
            threads.emplace_back(worker_loop, w);
    }

    if (error) std::rethrow_exception(error);

    RunResult result;
    result.blocks = std::move(states);
    for (int w = 0; w < p; ++w) {
        result.stats.supersteps = std::max(result.stats.supersteps, worker_stats[w].supersteps);
        result.stats.messages_delivered += worker_stats[w].messages_delivered;
        result.stats.words_delivered += worker_stats[w].words_delivered;
    }
    for (auto& out : outboxes)
        detail::Exchange::add_sent(out, result.stats);
    return result;
}

} // namespace bspsort::bsp
