#pragma once

// Key data types, deterministic input generation and output verification
// shared by the sorting algorithms, the runtime and the benchmark harness.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bspsort {

using Key = std::uint32_t;
using KeyArray = std::vector<Key>;

inline constexpr int key_bits = 32;

enum class Algorithm { SR4, PR4, PR2, BTN, OET };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::SR4: return "sr4";
    case Algorithm::PR4: return "pr4";
    case Algorithm::PR2: return "pr2";
    case Algorithm::BTN: return "btn";
    case Algorithm::OET: return "oet";
    }
    return "?";
}

inline std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "sr4") return Algorithm::SR4;
    if (s == "pr4") return Algorithm::PR4;
    if (s == "pr2") return Algorithm::PR2;
    if (s == "btn") return Algorithm::BTN;
    if (s == "oet") return Algorithm::OET;
    return std::nullopt;
}

inline constexpr bool is_power_of_two(std::uint64_t x) {
    return x != 0 && std::has_single_bit(x);
}

/// Base-2 logarithm of a power of two.
inline constexpr int log2_exact(std::uint64_t x) {
    return std::bit_width(x) - 1;
}

/// Number of bits per digit for a power-of-two radix, or -1 if the radix
/// does not split 32-bit keys into whole rounds.
inline constexpr int digit_bits(std::uint64_t radix) {
    if (!is_power_of_two(radix)) return -1;
    const int b = log2_exact(radix);
    return (b > 0 && key_bits % b == 0) ? b : -1;
}

// One benchmark unit: the keys to sort plus how to sort them.
struct SortInstance {
    KeyArray input;
    int processors = 1;          // p
    Algorithm algorithm = Algorithm::SR4;
    std::uint64_t radix = 256;   // digit size for the radix-sort family
    std::uint64_t seed = 0;      // provenance of the input, unused by the sorts

    void validate() const {
        if (processors < 1)
            throw std::invalid_argument("SortInstance: processors must be >= 1");
        if (digit_bits(radix) < 0)
            throw std::invalid_argument("SortInstance: radix must be a power of two whose "
                                        "bit width divides 32");
        if (algorithm == Algorithm::SR4 && processors != 1)
            throw std::invalid_argument("SortInstance: sr4 is serial, requires p = 1");
        if (algorithm == Algorithm::BTN && !is_power_of_two(static_cast<std::uint64_t>(processors)))
            throw std::invalid_argument("SortInstance: btn requires a power-of-two p");
        if (algorithm == Algorithm::PR4 && radix != 256)
            throw std::invalid_argument("SortInstance: pr4 is radix-256 by definition");
        if (algorithm == Algorithm::PR2 && radix != 65536)
            throw std::invalid_argument("SortInstance: pr2 is radix-65536 by definition");
    }
};

/// Exactly n keys from a seeded mt19937_64, uniform over the full 32-bit
/// range (low 32 bits of each 64-bit draw). Pure function of (n, seed).
inline KeyArray generate_uniform_keys(std::size_t n, std::uint64_t seed) {
    KeyArray keys(n);
    std::mt19937_64 rng(seed);
    for (auto& k : keys)
        k = static_cast<Key>(rng());
    return keys;
}

/// True iff output is non-decreasing and a multiset permutation of input.
/// The permutation check compares against an independent comparison sort.
inline bool verify_sorted_permutation(const KeyArray& input, const KeyArray& output) {
    if (input.size() != output.size()) return false;
    if (!std::is_sorted(output.begin(), output.end())) return false;
    KeyArray reference = input;
    std::sort(reference.begin(), reference.end());
    return reference == output;
}

} // namespace bspsort
