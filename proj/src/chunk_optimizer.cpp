#include "oocpipe/chunk_optimizer.hpp"

#include <algorithm>
#include <set>

namespace oocpipe {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

// Chunk byte size with saturation; anything saturating is over any budget.
uint64_t plan_bytes(const std::vector<uint64_t>& c, uint32_t element_bytes) {
    unsigned __int128 p = element_bytes;
    for (uint64_t e : c) {
        p *= e;
        if (p > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<uint64_t>(p);
}

}  // namespace

OptimizerInputs OptimizerInputs::make(std::vector<uint64_t> shape, uint32_t element_bytes,
                                      Pattern now, Pattern next, uint64_t frames_per_call,
                                      uint64_t n_workers, uint64_t budget_bytes) {
    OptimizerInputs in;
    in.shape = std::move(shape);
    in.element_bytes = element_bytes;
    in.now = std::move(now);
    in.next = std::move(next);
    in.frames_per_call = frames_per_call;
    in.budget_bytes = budget_bytes;
    if (n_workers == 0) throw Error(Errc::invalid_inputs, "n_workers must be positive");
    in.now_frames_per_worker = ceil_div(frame_count(in.shape, in.now), n_workers);
    in.next_frames_per_worker = ceil_div(frame_count(in.shape, in.next), n_workers);
    in.now_frames_per_worker = std::max<uint64_t>(1, in.now_frames_per_worker);
    in.next_frames_per_worker = std::max<uint64_t>(1, in.next_frames_per_worker);
    in.validate();
    return in;
}

void OptimizerInputs::validate() const {
    if (frames_per_call < 1 || now_frames_per_worker < 1 || next_frames_per_worker < 1)
        throw Error(Errc::invalid_inputs, "f and f_p must be at least 1");
    if (budget_bytes < element_bytes)
        throw Error(Errc::invalid_inputs, "budget below one element");
    validate_pattern(shape.size(), now);
    validate_pattern(shape.size(), next);
}

std::vector<DimPlan> initial_values(const OptimizerInputs& in) {
    in.validate();
    const auto classes = classify_dims(in.now, in.next);
    const uint64_t f = in.frames_per_call;

    std::vector<DimPlan> plans(classes.size());
    for (size_t d = 0; d < classes.size(); ++d) {
        DimPlan& p = plans[d];
        p.cls = classes[d];
        const uint64_t extent = in.shape[d];
        switch (classes[d]) {
            case DimClass::CoreCore:
                p = {classes[d], extent, extent, 1, true, 1, true};
                break;
            case DimClass::CoreSlice: {
                // beta_u is f_p of whichever pattern slices this dimension.
                const uint64_t fp = dim_role(in.now, d) == DimRole::Slice
                                        ? in.now_frames_per_worker
                                        : in.next_frames_per_worker;
                const uint64_t c0 = std::min(f, extent);
                p = {classes[d], c0, std::max(fp, c0), 1, true, f, false};
                break;
            }
            case DimClass::SliceSlice: {
                const uint64_t c0 = std::min(f, extent);
                p = {classes[d], c0, std::max(in.now_frames_per_worker, c0), 1, true, f, false};
                break;
            }
            case DimClass::CoreOther:
            case DimClass::SliceOther:
                p = {classes[d], 1, extent, 1, true, 1, false};
                break;
            case DimClass::OtherOther:
                p = {classes[d], 1, 1, 1, false, 1, false};
                break;
        }
    }
    return plans;
}

std::vector<size_t> visit_order(const Pattern& now, const Pattern& next, bool increasing) {
    std::vector<size_t> order;
    std::set<size_t> taken;
    auto add = [&](size_t d) {
        if (taken.insert(d).second) order.push_back(d);
    };
    auto cores_ascending = [](const Pattern& p) {
        std::vector<size_t> dims = p.core_dims;
        std::sort(dims.begin(), dims.end());
        return dims;
    };
    for (const Pattern* p : {&now, &next}) {
        if (increasing) {
            for (size_t d : cores_ascending(*p)) add(d);
            if (!p->slice_dims.empty()) add(p->slice_dims.front());
        } else {
            if (!p->slice_dims.empty()) add(p->slice_dims.front());
            for (size_t d : cores_ascending(*p)) add(d);
        }
    }
    return order;
}

ChunkPlan optimize_chunks(const OptimizerInputs& in) {
    const auto plans = initial_values(in);
    const size_t ndims = in.shape.size();
    const uint64_t M = in.budget_bytes;

    std::vector<uint64_t> c(ndims);
    for (size_t d = 0; d < ndims; ++d) c[d] = std::min(plans[d].start, in.shape[d]);

    const bool increasing = plan_bytes(c, in.element_bytes) <= M;
    for (size_t j : visit_order(in.now, in.next, increasing)) {
        const DimPlan& p = plans[j];
        if (!p.adjustable) continue;
        // Bytes per unit of c[j]: the product over every other dimension.
        std::vector<uint64_t> others = c;
        others[j] = 1;
        const uint64_t rest = plan_bytes(others, in.element_bytes);
        const uint64_t by_budget = M / rest;

        if (increasing) {
            const uint64_t cap = std::min({p.upper, in.shape[j], by_budget});
            if (cap > c[j]) c[j] += (cap - c[j]) / p.step * p.step;
        } else if (plan_bytes(c, in.element_bytes) > M) {
            if (p.halving) {
                while (plan_bytes(c, in.element_bytes) > M && c[j] > 1)
                    c[j] = ceil_div(c[j], 2);
            } else if (by_budget < c[j]) {
                // Smallest admissible shrink that restores the budget, or the
                // lowest value of the form c0 - b*step still >= 1.
                const uint64_t need = c[j] - by_budget;
                uint64_t b = ceil_div(need, p.step);
                if (c[j] < 1 + b * p.step) b = (c[j] - 1) / p.step;
                c[j] -= b * p.step;
            }
        }
    }

    if (plan_bytes(c, in.element_bytes) > M) c.assign(ndims, 1);
    for (size_t d = 0; d < ndims; ++d) c[d] = std::clamp<uint64_t>(c[d], 1, in.shape[d]);
    return {c, plan_bytes(c, in.element_bytes)};
}

uint64_t chunk_cost(const std::vector<uint64_t>& shape, const std::vector<uint64_t>& chunk_shape,
                    const Pattern& pattern, uint64_t frames_per_call) {
    if (shape.size() != chunk_shape.size())
        throw Error(Errc::shape_mismatch, "chunk shape rank mismatch");
    validate_pattern(shape.size(), pattern);
    for (size_t d = 0; d < shape.size(); ++d)
        if (chunk_shape[d] < 1 || chunk_shape[d] > shape[d])
            throw Error(Errc::shape_mismatch, "chunk extent out of range");
    if (frames_per_call < 1) throw Error(Errc::invalid_inputs, "m must be positive");

    uint64_t core_cells = 1;
    for (size_t d : pattern.core_dims) core_cells *= ceil_div(shape[d], chunk_shape[d]);

    const uint64_t total_frames = frame_count(shape, pattern);
    uint64_t total = 0;
    for (uint64_t start = 0; start < total_frames; start += frames_per_call) {
        const uint64_t count = std::min(frames_per_call, total_frames - start);
        std::set<std::vector<uint64_t>> cells;
        for (uint64_t j = 0; j < count; ++j) {
            auto fc = frame_coords(shape, pattern, start + j);
            for (size_t k = 0; k < fc.size(); ++k) fc[k] /= chunk_shape[pattern.slice_dims[k]];
            cells.insert(std::move(fc));
        }
        total += cells.size() * core_cells;
    }
    return total;
}

ChunkPlan brute_force_best(const OptimizerInputs& in, uint64_t candidate_limit) {
    in.validate();
    const size_t ndims = in.shape.size();
    unsigned __int128 candidates = 1;
    for (uint64_t e : in.shape) {
        candidates *= e;
        if (candidates > candidate_limit)
            throw Error(Errc::too_large, "search space exceeds candidate limit");
    }

    ChunkPlan best;
    uint64_t best_cost = UINT64_MAX;
    std::vector<uint64_t> c(ndims, 1);
    while (true) {
        const uint64_t bytes = plan_bytes(c, in.element_bytes);
        if (bytes <= in.budget_bytes) {
            const uint64_t cost = chunk_cost(in.shape, c, in.now, in.frames_per_call) +
                                  chunk_cost(in.shape, c, in.next, in.frames_per_call);
            // Enumeration is lexicographically ascending, so strict
            // comparisons keep the lexicographically smallest winner.
            if (cost < best_cost || (cost == best_cost && bytes > best.chunk_bytes)) {
                best = {c, bytes};
                best_cost = cost;
            }
        }
        size_t d = ndims;
        bool more = false;
        while (d-- > 0) {
            if (++c[d] <= in.shape[d]) {
                more = true;
                break;
            }
            c[d] = 1;
        }
        if (!more) break;
    }
    return best;
}

}  // namespace oocpipe
