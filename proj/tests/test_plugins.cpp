#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oocpipe/engine.hpp"
#include "oocpipe/fft.hpp"
#include "oocpipe/plugins_tomo.hpp"
#include "test_common.hpp"
#include "test_support.hpp"

using namespace oocpipe;
using testsup::make_descriptor;
using testsup::pattern_of;
using testsup::TempDir;
using testsup::thrown_code;
using testsup::whole_pattern;

namespace {

PluginEntry entry(int index, std::string name, Params params = Params::object()) {
    PluginEntry e;
    e.index = index;
    e.name = std::move(name);
    e.params = std::move(params);
    return e;
}

std::vector<double> read_all(const std::filesystem::path& path) {
    auto c = Container::open(path, OpenMode::Read);
    return c->read_frames(whole_pattern(c->shape().size()), 0, 1).values;
}

std::string final_path(const RunResult& result, const std::string& dataset) {
    for (const auto& o : result.manifest.final_outputs)
        if (o.dataset == dataset) return o.path;
    return {};
}

// Slow direct transform, the oracle for the radix-2 implementation.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0, 0);
        for (size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * double(k * j) / double(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// Independent projector: rasterizes the disks on a fine line sampling and
// integrates numerically. Used to cross-check the analytic chord model.
double rasterized_integral(const PhantomSpec& spec, double angle, double s, int samples = 4001) {
    const double c = std::cos(angle), n = std::sin(angle);
    const double t_lo = -0.75, t_hi = 0.75;
    const double dt = (t_hi - t_lo) / double(samples - 1);
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo + dt * double(i);
        const double px = 0.5 + s * c - t * n;
        const double py = 0.5 + s * n + t * c;
        for (const auto& d : spec.disks) {
            const double dx = px - d.cx, dy = py - d.cy;
            if (dx * dx + dy * dy <= d.radius * d.radius) acc += d.density * dt;
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("radix-2 fft matches a direct transform and inverts exactly") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (size_t n : {8u, 16u, 64u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {dist(rng), dist(rng)};
        auto fast = x;
        fft_pow2(fast, false);
        auto slow = naive_dft(x);
        for (size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
        fft_pow2(fast, true);
        for (size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - x[k]) < 1e-12);
    }
}

TEST_CASE("an empty disk list projects the flat field everywhere") {
    TempDir tmp("flatfield");
    ProcessList list;
    list.plugins = {
        entry(1, "synthetic_tomo_loader",
              {{"n_theta", 4}, {"n_y", 2}, {"n_x", 6}, {"disks", nlohmann::json::array()}}),
        entry(2, "container_saver", {}),
    };
    RunOptions options;
    options.output_dir = tmp / "out";
    run_chain(list, options);
    for (double v : read_all(tmp / "out" / "input_tomo.cnt")) CHECK(v == tomo::kFlatCounts);
}

TEST_CASE("a centered disk integrates to its diameter times density on the axis") {
    PhantomSpec spec;
    spec.disks = {{0.5, 0.5, 0.3, 2.0}};
    for (double angle : {0.0, 0.4, 1.1, 2.9})
        CHECK(tomo::line_integral(spec, angle, 0.0) == doctest::Approx(2 * 0.3 * 2.0));
}

TEST_CASE("chord model agrees with a rasterized projector") {
    PhantomSpec spec;
    spec.disks = {{0.62, 0.41, 0.2, 1.5}, {0.35, 0.6, 0.1, 0.7}};
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ad(0.0, std::numbers::pi), sd(-0.45, 0.45);
    for (int t = 0; t < 25; ++t) {
        const double angle = ad(rng), s = sd(rng);
        const double want = rasterized_integral(spec, angle, s);
        CHECK(tomo::line_integral(spec, angle, s) == doctest::Approx(want).epsilon(0.03));
    }
}

TEST_CASE("an off-center disk traces a sinusoid across the sinogram") {
    TempDir tmp("sinusoid");
    const double cx = 0.65, cy = 0.5, r = 0.08;
    const uint64_t n_theta = 36, n_x = 96;
    ProcessList list;
    list.plugins = {
        entry(1, "synthetic_tomo_loader",
              {{"n_theta", n_theta},
               {"n_y", 1},
               {"n_x", n_x},
               {"disks", {{{"cx", cx}, {"cy", cy}, {"radius", r}, {"density", 2.0}}}}}),
        entry(2, "container_saver", {}),
    };
    RunOptions options;
    options.output_dir = tmp / "out";
    run_chain(list, options);

    const auto counts = read_all(tmp / "out" / "input_tomo.cnt");  // (theta, y=1, x)
    for (uint64_t a = 0; a < n_theta; ++a) {
        // Counts dip where the integral peaks; the trace center follows
        // the disk center's projection.
        uint64_t argmin = 0;
        for (uint64_t i = 1; i < n_x; ++i)
            if (counts[a * n_x + i] < counts[a * n_x + argmin]) argmin = i;
        const double angle = std::numbers::pi * double(a) / double(n_theta);
        const double expected_s = (cx - 0.5) * std::cos(angle) + (cy - 0.5) * std::sin(angle);
        CHECK(std::abs(tomo::detector_coord(argmin, n_x) - expected_s) <= 1.6 / double(n_x));
    }
}

TEST_CASE("dark/flat correction maps the reference points") {
    CHECK(tomo::dark_flat_value(50000, 1000, 50000) == doctest::Approx(1.0));
    CHECK(tomo::dark_flat_value(1000, 1000, 50000) == doctest::Approx(0.0));
    CHECK(tomo::dark_flat_value(1000 + 0.5 * 49000, 1000, 50000) == doctest::Approx(0.5));
}

TEST_CASE("minus_log maps the reference points and clamps at zero") {
    CHECK(tomo::minus_log_value(1.0) == 0.0);
    CHECK(tomo::minus_log_value(std::exp(-1.0)) == doctest::Approx(1.0));
    CHECK(tomo::minus_log_value(0.0) == doctest::Approx(-std::log(1e-6)));
    CHECK(std::isfinite(tomo::minus_log_value(0.0)));
}

TEST_CASE("ratio maps the reference points") {
    CHECK(tomo::ratio_value(3.0, 3.0) == doctest::Approx(1.0));
    CHECK(tomo::ratio_value(7.25, 1.0) == doctest::Approx(7.25));
}

TEST_CASE("median filter golden block") {
    // 3x3 core window times 3 along the padded dim; a handmade 27-window.
    std::vector<double> w;
    for (int i = 0; i < 27; ++i) w.push_back(double((i * 7) % 27));
    CHECK(tomo::median27(w) == 13.0);
}

TEST_CASE("the correction chain recovers the analytic line integrals") {
    TempDir tmp("chain_identity");
    const uint64_t n_theta = 20, n_y = 3, n_x = 32;
    PhantomSpec spec;
    spec.disks = {{0.55, 0.45, 0.25, 1.2}};
    spec.detector_bins = n_x;
    spec.angle_count = n_theta;

    ProcessList list;
    list.plugins = {
        entry(1, "synthetic_tomo_loader",
              {{"n_theta", n_theta},
               {"n_y", n_y},
               {"n_x", n_x},
               {"disks", {{{"cx", 0.55}, {"cy", 0.45}, {"radius", 0.25}, {"density", 1.2}}}}}),
        entry(2, "dark_flat_correct", {}),
        entry(3, "minus_log", {}),
        entry(4, "container_saver", {}),
    };
    RunOptions options;
    options.output_dir = tmp / "out";
    auto result = run_chain(list, options);

    const auto out = read_all(final_path(result, "tomo"));  // (theta, y, x) absorption
    double max_g = 0.0;
    for (uint64_t a = 0; a < n_theta; ++a)
        for (uint64_t x = 0; x < n_x; ++x)
            max_g = std::max(max_g, tomo::line_integral(
                                        spec, std::numbers::pi * double(a) / double(n_theta),
                                        tomo::detector_coord(x, n_x)));
    REQUIRE(max_g > 0);
    for (uint64_t a = 0; a < n_theta; ++a)
        for (uint64_t x = 0; x < n_x; ++x) {
            const double g = tomo::line_integral(
                spec, std::numbers::pi * double(a) / double(n_theta),
                tomo::detector_coord(x, n_x));
            for (uint64_t y = 0; y < n_y; ++y)
                CHECK(std::abs(out[(a * n_y + y) * n_x + x] - g) <= 1e-4 * max_g);
        }
}

TEST_CASE("median filter leaves constants alone and removes impulses") {
    TempDir tmp("median");
    auto desc = make_descriptor("tomo", {5, 4, 6}, DType::F32);
    desc.add_pattern(pattern_of("SINOGRAM", {2, 0}, {1}));

    std::vector<double> constant(5 * 4 * 6, 3.25);
    {
        auto c = Container::create(tmp / "const.cnt", desc, desc.shape);
        FrameBlock b = FrameBlock::zeros(1, desc.shape);
        b.values = constant;
        c->write_frames(whole_pattern(3), 0, b);
    }
    std::vector<double> impulse = constant;
    impulse[(2 * 4 + 1) * 6 + 3] = 500.0;  // one spike
    {
        auto c = Container::create(tmp / "imp.cnt", desc, desc.shape);
        FrameBlock b = FrameBlock::zeros(1, desc.shape);
        b.values = impulse;
        c->write_frames(whole_pattern(3), 0, b);
    }

    auto run_median = [&](const std::string& file, const std::string& outdir) {
        ProcessList list;
        list.plugins = {
            entry(1, "raw_container_loader", {{"path", (tmp / file).string()}}),
            entry(2, "median_filter_3x3", {{"in_datasets", {"tomo"}}, {"out_datasets", {"tomo"}}}),
            entry(3, "container_saver", {}),
        };
        RunOptions options;
        options.output_dir = tmp / outdir;
        auto result = run_chain(list, options);
        return read_all(final_path(result, "tomo"));
    };

    CHECK(run_median("const.cnt", "out_const") == constant);
    CHECK(run_median("imp.cnt", "out_imp") == constant);  // the spike is gone
}

TEST_CASE("fbp of a zero sinogram is a zero image") {
    std::vector<double> sino(8 * 16, 0.0), out(16 * 16, 1.0);
    std::vector<double> angles(8);
    for (int a = 0; a < 8; ++a) angles[a] = std::numbers::pi * a / 8.0;
    tomo::fbp_slice(sino, 8, 16, angles, 8.0, out);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("fbp is linear in its input") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(0, 1);
    const uint64_t n_theta = 12, n_x = 16;
    std::vector<double> sino(n_theta * n_x);
    for (auto& v : sino) v = dist(rng);
    std::vector<double> angles(n_theta);
    for (uint64_t a = 0; a < n_theta; ++a) angles[a] = std::numbers::pi * double(a) / double(n_theta);

    std::vector<double> out1(n_x * n_x), out2(n_x * n_x);
    tomo::fbp_slice(sino, n_theta, n_x, angles, n_x / 2.0, out1);
    auto scaled = sino;
    for (auto& v : scaled) v *= 3.5;
    tomo::fbp_slice(scaled, n_theta, n_x, angles, n_x / 2.0, out2);
    for (size_t i = 0; i < out1.size(); ++i)
        CHECK(out2[i] == doctest::Approx(3.5 * out1[i]).epsilon(1e-9));
}

TEST_CASE("fbp rejects mismatched angle lists") {
    std::vector<double> sino(8 * 16, 0.0), out(16 * 16);
    std::vector<double> angles(5);
    auto code = thrown_code([&] { tomo::fbp_slice(sino, 8, 16, angles, 8.0, out); });
    CHECK(code == Errc::angles_mismatch);
}

TEST_CASE("fbp reconstructs a centered disk within the frozen tolerance") {
    // Analytic phantom, n_x = 64, n_theta = 90; relative L2 error inside the
    // inscribed circle stays below 0.25.
    TempDir tmp("fbpdisk");
    const uint64_t n_x = 64, n_theta = 90;
    const double r = 0.3, density = 1.0;
    ProcessList list;
    list.plugins = {
        entry(1, "synthetic_tomo_loader",
              {{"n_theta", n_theta},
               {"n_y", 1},
               {"n_x", n_x},
               {"disks", {{{"cx", 0.5}, {"cy", 0.5}, {"radius", r}, {"density", density}}}}}),
        entry(2, "dark_flat_correct", {}),
        entry(3, "minus_log", {}),
        entry(4, "fbp_recon", {}),
        entry(5, "container_saver", {}),
    };
    RunOptions options;
    options.output_dir = tmp / "out";
    auto result = run_chain(list, options);
    const auto recon = read_all(final_path(result, "recon"));  // (1, y, x)

    double err2 = 0, ref2 = 0;
    for (uint64_t iy = 0; iy < n_x; ++iy) {
        const double y = tomo::detector_coord(iy, n_x);
        for (uint64_t ix = 0; ix < n_x; ++ix) {
            const double x = tomo::detector_coord(ix, n_x);
            if (x * x + y * y >= 0.25) continue;  // inscribed circle
            const double want = (x * x + y * y < r * r) ? density : 0.0;
            const double got = recon[iy * n_x + ix];
            err2 += (got - want) * (got - want);
            ref2 += want * want;
        }
    }
    REQUIRE(ref2 > 0);
    CHECK(std::sqrt(err2 / ref2) <= 0.25);
}

TEST_CASE("process hooks are pure: repeated calls give identical blocks") {
    auto& registry = PluginRegistry::instance();
    auto plugin = registry.make_processing("minus_log");
    const auto params = registry.spec("minus_log").with_defaults(Params::object());

    auto desc = make_descriptor("tomo", {4, 3, 5}, DType::F32);
    desc.add_pattern(pattern_of("SINOGRAM", {2, 0}, {1}));
    auto setup = plugin->setup(params, {desc});

    FrameBlock in = FrameBlock::zeros(2, {4, 1, 5});
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(0.01, 2.0);
    for (auto& v : in.values) v = dist(rng);
    std::vector<FrameBlock> ins{in};
    std::vector<FrameBlock> o1{FrameBlock::zeros(2, {4, 1, 5})};
    std::vector<FrameBlock> o2{FrameBlock::zeros(2, {4, 1, 5})};
    plugin->process({0, 0, 2}, ins, o1);
    plugin->process({1, 0, 2}, ins, o2);
    CHECK(o1[0].values == o2[0].values);
    CHECK(o1[0].values[0] == tomo::minus_log_value(in.values[0]));
}

TEST_CASE("raw containers written with 4-D patterns slice like the listing") {
    TempDir tmp("fourd");
    // (theta=2, y=3, x=4, scan=2) with SINOGRAM slicing (y, scan).
    auto desc = make_descriptor("tomo4d", {2, 3, 4, 2}, DType::F32);
    desc.add_pattern(pattern_of("PROJECTION", {2, 1}, {0, 3}));
    desc.add_pattern(pattern_of("SINOGRAM", {2, 0}, {1, 3}));
    std::vector<double> vals(48);
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = double(i);
    {
        auto c = Container::create(tmp / "t.cnt", desc, std::vector<uint64_t>{1, 2, 2, 1});
        FrameBlock b = FrameBlock::zeros(1, desc.shape);
        b.values = vals;
        c->write_frames(whole_pattern(4), 0, b);
    }
    auto c = Container::open(tmp / "t.cnt", OpenMode::Read);
    // Ordinal 3 -> (y=0, scan=1): frame holds vals[t][0][x][1].
    auto block = c->read_frames("SINOGRAM", 3, 1);
    CHECK(block.window == std::vector<uint64_t>{2, 1, 4, 1});
    for (uint64_t t = 0; t < 2; ++t)
        for (uint64_t x = 0; x < 4; ++x)
            CHECK(block.values[t * 4 + x] == vals[((t * 3 + 0) * 4 + x) * 2 + 1]);
}
