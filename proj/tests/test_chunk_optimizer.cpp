#include <doctest.h>

#include <random>

#include "oocpipe/chunk_optimizer.hpp"
#include "oocpipe/container.hpp"
#include "test_common.hpp"
#include "test_support.hpp"

using namespace oocpipe;
using testsup::TempDir;
using testsup::thrown_code;

namespace {

Pattern make_pattern(std::string name, std::vector<size_t> core, std::vector<size_t> slice) {
    return Pattern{std::move(name), std::move(core), std::move(slice)};
}

Pattern projection3d() { return make_pattern("PROJECTION", {2, 1}, {0}); }
Pattern sinogram3d() { return make_pattern("SINOGRAM", {2, 0}, {1}); }

OptimizerInputs random_instance(std::mt19937& rng) {
    std::uniform_int_distribution<size_t> nd(1, 5);
    const size_t ndims = nd(rng);
    auto shape = testsup::random_shape(rng, ndims, 512);
    auto now = testsup::random_pattern(rng, ndims, "NOW");
    auto next = testsup::random_pattern(rng, ndims, "NEXT");
    std::uniform_int_distribution<uint64_t> f_pick(1, 16), w_pick(1, 8);
    const uint64_t budgets[2] = {1ull << 16, 1'000'000};
    std::uniform_int_distribution<int> b_pick(0, 1);
    const uint32_t esizes[3] = {2, 4, 8};
    std::uniform_int_distribution<int> e_pick(0, 2);
    return OptimizerInputs::make(shape, esizes[e_pick(rng)], now, next, f_pick(rng), w_pick(rng),
                                 budgets[b_pick(rng)]);
}

uint64_t bytes_of(const std::vector<uint64_t>& c, uint32_t esize) {
    uint64_t b = esize;
    for (uint64_t e : c) b *= e;
    return b;
}

}  // namespace

TEST_CASE("initial values follow the role table") {
    // (theta=180, y=128, x=160), projection now, sinogram next, f=1, 1 worker.
    auto in = OptimizerInputs::make({180, 128, 160}, 4, projection3d(), sinogram3d(), 1, 1);
    CHECK(in.now_frames_per_worker == 180);
    CHECK(in.next_frames_per_worker == 128);
    auto plans = initial_values(in);

    CHECK(plans[2].cls == DimClass::CoreCore);  // x: start and cap at the extent
    CHECK(plans[2].start == 160);
    CHECK(plans[2].upper == 160);
    CHECK(plans[2].halving);

    CHECK(plans[0].cls == DimClass::CoreSlice);  // theta: sliced by the now pattern
    CHECK(plans[0].start == 1);
    CHECK(plans[0].upper == 180);
    CHECK(plans[0].step == 1);

    CHECK(plans[1].cls == DimClass::CoreSlice);  // y: sliced by the next pattern
    CHECK(plans[1].upper == 128);
}

TEST_CASE("initial value of a core/slice dim clamps f to the extent") {
    auto in = OptimizerInputs::make({4, 8}, 4, make_pattern("A", {1}, {0}),
                                    make_pattern("B", {0, 1}, {}), 8, 1);
    auto plans = initial_values(in);
    CHECK(plans[0].cls == DimClass::CoreSlice);
    CHECK(plans[0].start == 4);  // min(f=8, d=4)
}

TEST_CASE("other/other dims are pinned to one") {
    // dim 2 is a later slice dim under both patterns.
    auto now = make_pattern("NOW", {0}, {1, 2});
    auto next = make_pattern("NEXT", {1}, {0, 2});
    auto in = OptimizerInputs::make({6, 6, 6}, 4, now, next, 1, 1);
    auto plans = initial_values(in);
    CHECK(plans[2].cls == DimClass::OtherOther);
    CHECK(plans[2].start == 1);
    CHECK_FALSE(plans[2].adjustable);
    auto plan = optimize_chunks(in);
    CHECK(plan.chunk_shape[2] == 1);
}

TEST_CASE("a one-megabyte budget is met exactly on the reference layout") {
    // Visit order fills the two core dims first, leaving (1, 500, 500) f32:
    // exactly 1MB.
    auto core = make_pattern("FRAME", {1, 2}, {0});
    auto in = OptimizerInputs::make({2000, 500, 500}, 4, core, core, 1, 1);
    auto plan = optimize_chunks(in);
    CHECK(plan.chunk_shape == std::vector<uint64_t>{1, 500, 500});
    CHECK(plan.chunk_bytes == 1'000'000);
}

TEST_CASE("a dataset fully under budget gets a single full chunk") {
    auto all = make_pattern("ALL", {0, 1, 2}, {});
    auto in = OptimizerInputs::make({10, 10, 10}, 4, all, all, 1, 1);
    auto plan = optimize_chunks(in);
    CHECK(plan.chunk_shape == std::vector<uint64_t>{10, 10, 10});
    CHECK(plan.chunk_bytes == 4000);
}

TEST_CASE("projection to sinogram handoff reproduces the worked plan") {
    // Confirmed by hand: increase order is (y, x, theta); y caps at its
    // per-worker bound 128, x at its extent, theta takes the remaining
    // budget: floor(1e6 / (128*160*4)) = 12. 12*128*160*4 = 983,040 <= 1e6.
    auto in = OptimizerInputs::make({180, 128, 160}, 4, projection3d(), sinogram3d(), 1, 1);
    auto plan = optimize_chunks(in);
    CHECK(plan.chunk_shape == std::vector<uint64_t>{12, 128, 160});
    CHECK(plan.chunk_bytes == 983'040);
}

TEST_CASE("visit order grows now cores first, then the now slice dim") {
    auto order = visit_order(projection3d(), sinogram3d(), true);
    CHECK(order == std::vector<size_t>{1, 2, 0});
    auto dec = visit_order(projection3d(), sinogram3d(), false);
    CHECK(dec == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("oversized start values shrink until the budget is met") {
    // All core/core: start at the full extents (168 MB), decrease by halving.
    auto all = make_pattern("ALL", {0, 1, 2}, {});
    auto in = OptimizerInputs::make({100, 600, 700}, 4, all, all, 1, 1);
    auto plan = optimize_chunks(in);
    CHECK(plan.chunk_bytes <= in.budget_bytes);
    // First visited dim collapses to 1, the second halves once: 300*700*4.
    CHECK(plan.chunk_shape == std::vector<uint64_t>{1, 300, 700});
    CHECK(plan.chunk_bytes == 840'000);
}

TEST_CASE("chunk_cost: frame-shaped chunks cost one chunk per frame") {
    auto p = sinogram3d();
    std::vector<uint64_t> shape{6, 5, 4};
    CHECK(chunk_cost(shape, {6, 1, 4}, p, 1) == 5);
}

TEST_CASE("chunk_cost: a whole-array chunk costs one per batch") {
    auto p = sinogram3d();
    std::vector<uint64_t> shape{6, 5, 4};
    CHECK(chunk_cost(shape, shape, p, 1) == 5);
    CHECK(chunk_cost(shape, shape, p, 2) == 3);  // ceil(5/2)
}

TEST_CASE("chunk_cost counts grid cells per row slab") {
    std::vector<uint64_t> shape{4, 4};
    auto rows = make_pattern("ROWS", {1}, {0});
    CHECK(chunk_cost(shape, {2, 2}, rows, 1) == 8);
}

TEST_CASE("brute force prefers the whole-array chunk when everything fits") {
    auto rows = make_pattern("ROWS", {1}, {0});
    auto in = OptimizerInputs::make({4, 4}, 4, rows, rows, 1, 1, 1 << 20);
    auto best = brute_force_best(in, 1000);
    CHECK(best.chunk_shape == std::vector<uint64_t>{4, 4});
}

TEST_CASE("brute force on a singleton shape") {
    auto all = make_pattern("ALL", {0, 1, 2}, {});
    auto in = OptimizerInputs::make({1, 1, 1}, 4, all, all, 1, 1);
    auto best = brute_force_best(in, 10);
    CHECK(best.chunk_shape == std::vector<uint64_t>{1, 1, 1});
}

TEST_CASE("brute force refuses oversized search spaces") {
    auto rows = make_pattern("ROWS", {1}, {0});
    auto in = OptimizerInputs::make({100, 100}, 4, rows, rows, 1, 1);
    auto code = thrown_code([&] { brute_force_best(in, 100); });
    CHECK(code == Errc::too_large);
}

TEST_CASE("random instances always yield feasible, locally maximal plans") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        auto in = random_instance(rng);
        auto plan = optimize_chunks(in);
        REQUIRE(plan.chunk_shape.size() == in.shape.size());
        for (size_t d = 0; d < in.shape.size(); ++d) {
            REQUIRE(plan.chunk_shape[d] >= 1);
            REQUIRE(plan.chunk_shape[d] <= in.shape[d]);
        }
        REQUIRE(plan.chunk_bytes == bytes_of(plan.chunk_shape, in.element_bytes));
        REQUIRE(plan.chunk_bytes <= in.budget_bytes);

        // On the increase path, no adjustable dim can take one more step
        // within its cap without blowing the budget.
        auto plans = initial_values(in);
        std::vector<uint64_t> c0(in.shape.size());
        for (size_t d = 0; d < in.shape.size(); ++d)
            c0[d] = std::min(plans[d].start, in.shape[d]);
        if (bytes_of(c0, in.element_bytes) <= in.budget_bytes) {
            for (size_t d = 0; d < in.shape.size(); ++d) {
                if (!plans[d].adjustable) continue;
                const uint64_t cap = std::min(plans[d].upper, in.shape[d]);
                const uint64_t stepped = plan.chunk_shape[d] + plans[d].step;
                if (stepped <= cap) {
                    auto grown = plan.chunk_shape;
                    grown[d] = stepped;
                    CHECK(bytes_of(grown, in.element_bytes) > in.budget_bytes);
                }
            }
        }
    }
}

TEST_CASE("optimizer equals brute force when everything is core/core and fits") {
    std::mt19937 rng(43);
    int done = 0;
    while (done < 50) {
        std::uniform_int_distribution<size_t> nd(1, 3);
        const size_t ndims = nd(rng);
        auto shape = testsup::random_shape(rng, ndims, 8);
        Pattern all;
        all.name = "ALL";
        for (size_t d = 0; d < ndims; ++d) all.core_dims.push_back(d);
        auto in = OptimizerInputs::make(shape, 4, all, all, 1, 1, 1 << 20);
        uint64_t full = bytes_of(shape, 4);
        if (full > in.budget_bytes) continue;
        auto plan = optimize_chunks(in);
        auto best = brute_force_best(in, 1 << 20);
        CHECK(plan.chunk_shape == shape);
        CHECK(plan.chunk_shape == best.chunk_shape);
        ++done;
    }
}

TEST_CASE("raising the budget never shrinks an increase-path plan") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        auto in = random_instance(rng);
        auto plans = initial_values(in);
        std::vector<uint64_t> c0(in.shape.size());
        for (size_t d = 0; d < in.shape.size(); ++d)
            c0[d] = std::min(plans[d].start, in.shape[d]);
        if (bytes_of(c0, in.element_bytes) > in.budget_bytes) continue;  // decrease path
        auto low = optimize_chunks(in);
        auto richer = in;
        richer.budget_bytes *= 2;
        auto high = optimize_chunks(richer);
        for (size_t d = 0; d < in.shape.size(); ++d)
            CHECK(high.chunk_shape[d] >= low.chunk_shape[d]);
    }
}

TEST_CASE("chunk_cost agrees with the storage read counters") {
    TempDir tmp("costcheck");
    std::mt19937 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<size_t> nd(1, 3);
        const size_t ndims = nd(rng);
        auto shape = testsup::random_shape(rng, ndims, 6);
        auto p = testsup::random_pattern(rng, ndims, "P");
        DatasetDescriptor d;
        d.name = "t";
        d.shape = shape;
        d.dtype = DType::F32;
        for (size_t i = 0; i < ndims; ++i) d.axis_labels.push_back("d.u");
        d.add_pattern(p);
        std::vector<uint64_t> chunk(ndims);
        for (size_t k = 0; k < ndims; ++k)
            chunk[k] = std::uniform_int_distribution<uint64_t>(1, shape[k])(rng);
        auto c = Container::create(tmp / ("c" + std::to_string(trial) + ".cnt"), d, chunk);

        const uint64_t total = frame_count(shape, p);
        const uint64_t m = std::uniform_int_distribution<uint64_t>(1, 4)(rng);
        for (uint64_t s = 0; s < total; s += m) c->read_frames(p, s, m);
        CHECK(c->stats().chunks_read == chunk_cost(shape, chunk, p, m));
    }
}
