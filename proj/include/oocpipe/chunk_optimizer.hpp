#pragma once

#include <cstdint>
#include <vector>

#include "oocpipe/data_model.hpp"

namespace oocpipe {

// Inputs to the chunk-shape optimization for one dataset: its extents and
// element size, the pattern it is about to be written with ("now"), the
// pattern its next consumer will read it with ("next"), the frames delivered
// per plugin call (f), the average frames per worker under each pattern
// (f_p), and the per-chunk byte budget M.
struct OptimizerInputs {
    std::vector<uint64_t> shape;
    uint32_t element_bytes = 4;
    Pattern now;
    Pattern next;
    uint64_t frames_per_call = 1;         // f
    uint64_t now_frames_per_worker = 1;   // f_p under now
    uint64_t next_frames_per_worker = 1;  // f_p under next
    uint64_t budget_bytes = 1'000'000;    // M

    static OptimizerInputs make(std::vector<uint64_t> shape, uint32_t element_bytes, Pattern now,
                                Pattern next, uint64_t frames_per_call, uint64_t n_workers,
                                uint64_t budget_bytes = 1'000'000);

    void validate() const;
};

// Start value and adjustment bounds for one dimension, derived from its
// (now, next) role pair.
struct DimPlan {
    DimClass cls = DimClass::OtherOther;
    uint64_t start = 1;       // c0
    uint64_t upper = 1;       // beta_u
    uint64_t lower = 1;       // beta_l
    bool adjustable = false;
    uint64_t step = 1;        // increase/decrease unit (f for core/slice pairs)
    bool halving = false;     // CoreCore decreases by repeated ceil-halving
};

struct ChunkPlan {
    std::vector<uint64_t> chunk_shape;
    uint64_t chunk_bytes = 0;
};

// Per-dimension start values and bounds.
std::vector<DimPlan> initial_values(const OptimizerInputs& inputs);

// Dimension visit order for the adjustment pass: cores of the now pattern
// (ascending), its first slice dim, then the next pattern's not-yet-visited
// cores and first slice dim; reversed role order when decreasing.
std::vector<size_t> visit_order(const Pattern& now, const Pattern& next, bool increasing);

// Single-direction greedy adjustment: grow each adjustable dimension to the
// largest admissible value when the start product fits the budget, otherwise
// shrink dimensions in decrease order until it does. Always returns a
// feasible plan.
ChunkPlan optimize_chunks(const OptimizerInputs& inputs);

// Access-cost model: total chunk-grid cells intersected when reading the
// whole dataset in batches of m frames under the given pattern.
uint64_t chunk_cost(const std::vector<uint64_t>& shape, const std::vector<uint64_t>& chunk_shape,
                    const Pattern& pattern, uint64_t frames_per_call);

// Exhaustive reference: enumerates every chunk shape within the byte budget
// and returns one minimizing chunk_cost(now) + chunk_cost(next); ties broken
// by larger chunk_bytes, then lexicographically smaller shape. Throws
// TooLarge when the search space exceeds candidate_limit.
ChunkPlan brute_force_best(const OptimizerInputs& inputs, uint64_t candidate_limit);

}  // namespace oocpipe
