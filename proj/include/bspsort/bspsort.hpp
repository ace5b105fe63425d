#pragma once

// Convenience include for the whole library.

#include "bspsort/bench.hpp"
#include "bspsort/bsp.hpp"
#include "bspsort/core.hpp"
#include "bspsort/costmodel.hpp"
#include "bspsort/netsort.hpp"
#include "bspsort/radix.hpp"

namespace bspsort {

/// Dispatches a sort instance to its algorithm.
inline KeyArray sort_instance(const SortInstance& instance) {
    instance.validate();
    switch (instance.algorithm) {
    case Algorithm::SR4: return radix::serial_radix_sort(instance.input, instance.radix);
    case Algorithm::PR4:
    case Algorithm::PR2: return radix::parallel_radix_sort(instance);
    case Algorithm::BTN: return netsort::btn_sort(instance);
    case Algorithm::OET: return netsort::oet_sort(instance);
    }
    throw std::invalid_argument("sort_instance: unknown algorithm");
}

} // namespace bspsort
