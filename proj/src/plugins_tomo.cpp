#include "oocpipe/plugins_tomo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oocpipe/chunk_optimizer.hpp"
#include "oocpipe/fft.hpp"

namespace oocpipe {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Phantom and shared kernels
// ---------------------------------------------------------------------------

PhantomSpec PhantomSpec::from_params(const Params& params) {
    PhantomSpec spec;
    spec.detector_bins = params.value("n_x", 64);
    spec.angle_count = params.value("n_theta", 90);
    spec.disks.clear();
    if (params.contains("disks")) {
        for (const auto& d : params.at("disks")) {
            Disk disk;
            disk.cx = d.value("cx", 0.5);
            disk.cy = d.value("cy", 0.5);
            disk.radius = d.value("radius", 0.25);
            disk.density = d.value("density", 1.0);
            spec.disks.push_back(disk);
        }
    }
    spec.validate();
    return spec;
}

void PhantomSpec::validate() const {
    if (detector_bins < 1 || angle_count < 1)
        throw Error(Errc::invalid_spec, "phantom needs at least one bin and one angle");
    for (const auto& d : disks) {
        if (!(d.radius > 0)) throw Error(Errc::invalid_spec, "disk radius must be positive");
        if (!std::isfinite(d.density) || !std::isfinite(d.cx) || !std::isfinite(d.cy))
            throw Error(Errc::invalid_spec, "disk parameters must be finite");
    }
}

namespace tomo {

double detector_coord(uint64_t bin, uint64_t bins) {
    return (double(bin) + 0.5) / double(bins) - 0.5;
}

double line_integral(const PhantomSpec& spec, double angle_rad, double s) {
    const double c = std::cos(angle_rad), n = std::sin(angle_rad);
    double total = 0.0;
    for (const auto& d : spec.disks) {
        const double t = (d.cx - 0.5) * c + (d.cy - 0.5) * n - s;
        const double under = d.radius * d.radius - t * t;
        if (under > 0) total += 2.0 * std::sqrt(under) * d.density;
    }
    return total;
}

double jitter01(uint64_t key) {
    // splitmix64 finalizer
    key += 0x9e3779b97f4a7c15ull;
    key = (key ^ (key >> 30)) * 0xbf58476d1ce4e5b9ull;
    key = (key ^ (key >> 27)) * 0x94d049bb133111ebull;
    key ^= key >> 31;
    return double(key >> 11) * 0x1.0p-53;
}

double dark_flat_value(double raw, double dark, double flat) {
    return (raw - dark) / std::max(flat - dark, kEpsilon);
}

double minus_log_value(double v) { return -std::log(std::max(v, kEpsilon)); }

double ratio_value(double num, double den) { return num / std::max(den, kEpsilon); }

double median27(std::span<double> window) {
    auto mid = window.begin() + window.size() / 2;
    std::nth_element(window.begin(), mid, window.end());
    return *mid;
}

void fbp_slice(std::span<const double> sino, uint64_t n_theta, uint64_t n_x,
               std::span<const double> angles_rad, double center, std::span<double> out) {
    if (angles_rad.size() != n_theta)
        throw Error(Errc::angles_mismatch, std::to_string(angles_rad.size()) + " angles for " +
                                               std::to_string(n_theta) + " projections");
    const uint64_t padded = next_pow2(2 * n_x);

    // Ram-Lak filter in cycles per unit length; detector spacing is 1/n_x.
    std::vector<double> ramp(padded);
    for (uint64_t k = 0; k < padded; ++k) {
        const uint64_t folded = std::min(k, padded - k);
        ramp[k] = double(n_x) * double(folded) / double(padded);
    }

    std::vector<double> filtered(n_theta * n_x);
    std::vector<std::complex<double>> row(padded);
    for (uint64_t a = 0; a < n_theta; ++a) {
        std::fill(row.begin(), row.end(), std::complex<double>(0.0, 0.0));
        for (uint64_t i = 0; i < n_x; ++i) row[i] = sino[a * n_x + i];
        fft_pow2(row, false);
        for (uint64_t k = 0; k < padded; ++k) row[k] *= ramp[k];
        fft_pow2(row, true);
        for (uint64_t i = 0; i < n_x; ++i) filtered[a * n_x + i] = row[i].real();
    }

    std::vector<double> cosines(n_theta), sines(n_theta);
    for (uint64_t a = 0; a < n_theta; ++a) {
        cosines[a] = std::cos(angles_rad[a]);
        sines[a] = std::sin(angles_rad[a]);
    }

    const double scale = std::numbers::pi / double(n_theta);
    for (uint64_t iy = 0; iy < n_x; ++iy) {
        const double y = detector_coord(iy, n_x);
        for (uint64_t ix = 0; ix < n_x; ++ix) {
            const double x = detector_coord(ix, n_x);
            double acc = 0.0;
            for (uint64_t a = 0; a < n_theta; ++a) {
                const double s = x * cosines[a] + y * sines[a];
                const double u = s * double(n_x) + center - 0.5;
                if (u < 0.0 || u > double(n_x - 1)) continue;
                const uint64_t lo = uint64_t(u);
                const uint64_t hi = std::min(lo + 1, n_x - 1);
                const double frac = u - double(lo);
                acc += (1.0 - frac) * filtered[a * n_x + lo] + frac * filtered[a * n_x + hi];
            }
            out[iy * n_x + ix] = acc * scale;
        }
    }
}

}  // namespace tomo

// ---------------------------------------------------------------------------
// Loaders and saver
// ---------------------------------------------------------------------------

namespace {

Pattern projection_pattern(size_t x_dim, size_t y_dim, std::vector<size_t> slice) {
    return Pattern{"PROJECTION", {x_dim, y_dim}, std::move(slice)};
}

Pattern sinogram_pattern(size_t x_dim, size_t theta_dim, std::vector<size_t> slice) {
    return Pattern{"SINOGRAM", {x_dim, theta_dim}, std::move(slice)};
}

class SyntheticTomoLoader final : public LoaderPlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "synthetic_tomo_loader";
        s.kind = PluginKind::Loader;
        s.params = {
            {"name", "string", "tomo", "dataset name for the raw scan"},
            {"dark_name", "string", "dark", "dataset name for the dark field"},
            {"flat_name", "string", "flat", "dataset name for the flat field"},
            {"n_theta", "int", 90, "projection count over [0, 180) degrees"},
            {"n_y", "int", 64, "detector rows"},
            {"n_x", "int", 64, "detector columns"},
            {"disks", "json", json::array({json{{"cx", 0.5}, {"cy", 0.5}, {"radius", 0.3},
                                                {"density", 1.0}}}),
             "phantom disks in unit-square coordinates"},
            {"jitter", "number", 0.0, "per-element deterministic count jitter"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    std::vector<SymbolicDataset> declared_datasets(
        const Params& params, const std::optional<std::string>&) const override {
        return {{params.at("name"), {"PROJECTION", "SINOGRAM"}},
                {params.at("dark_name"), {"PROJECTION"}},
                {params.at("flat_name"), {"PROJECTION"}}};
    }

    std::vector<LoadedDataset> load(const Params& params, const std::optional<std::string>&,
                                    const std::filesystem::path& scratch_dir,
                                    uint64_t budget_bytes) override {
        const PhantomSpec phantom = PhantomSpec::from_params(params);
        const uint64_t n_theta = phantom.angle_count;
        const uint64_t n_y = params.at("n_y").get<uint64_t>();
        const uint64_t n_x = phantom.detector_bins;
        const double jitter = params.at("jitter").get<double>();
        if (n_y < 1) throw Error(Errc::invalid_spec, "n_y must be positive");

        DatasetDescriptor tomo;
        tomo.name = params.at("name");
        tomo.shape = {n_theta, n_y, n_x};
        tomo.dtype = DType::U16;
        tomo.axis_labels = {"rotation_angle.degrees", "detector_y.pixels", "detector_x.pixels"};
        tomo.add_pattern(projection_pattern(2, 1, {0}));
        tomo.add_pattern(sinogram_pattern(2, 0, {1}));
        json angles = json::array();
        for (uint64_t a = 0; a < n_theta; ++a) angles.push_back(180.0 * double(a) / double(n_theta));
        tomo.metadata["angles_deg"] = angles;

        auto chunk = optimize_chunks(OptimizerInputs::make(tomo.shape, dtype_bytes(tomo.dtype),
                                                           tomo.pattern("PROJECTION"),
                                                           tomo.pattern("SINOGRAM"), 1, 1,
                                                           budget_bytes));
        auto container = Container::create(scratch_dir / ("input_" + tomo.name + ".cnt"), tomo,
                                           chunk.chunk_shape);

        // Counts invert the correction pipeline exactly: dark + (flat -
        // dark) * exp(-integral), quantized to u16 by the container.
        const Pattern& proj = tomo.pattern("PROJECTION");
        FrameBlock frame = FrameBlock::zeros(1, {1, n_y, n_x});
        for (uint64_t a = 0; a < n_theta; ++a) {
            const double angle = std::numbers::pi * double(a) / double(n_theta);
            for (uint64_t x = 0; x < n_x; ++x) {
                const double g = tomo::line_integral(phantom, angle, tomo::detector_coord(x, n_x));
                const double counts =
                    tomo::kDarkCounts + (tomo::kFlatCounts - tomo::kDarkCounts) * std::exp(-g);
                for (uint64_t y = 0; y < n_y; ++y) {
                    const uint64_t key = (a * n_y + y) * n_x + x;
                    frame.values[y * n_x + x] =
                        counts + (jitter > 0 ? jitter * tomo::jitter01(key) : 0.0);
                }
            }
            container->write_frames(proj, a, frame);
        }

        auto flat_field = [&](const std::string& name, double value) {
            DatasetDescriptor d;
            d.name = name;
            d.shape = {n_y, n_x};
            d.dtype = DType::U16;
            d.axis_labels = {"detector_y.pixels", "detector_x.pixels"};
            d.add_pattern(projection_pattern(1, 0, {}));
            auto c = Container::create(scratch_dir / ("input_" + name + ".cnt"), d, d.shape);
            FrameBlock b = FrameBlock::zeros(1, d.shape);
            std::fill(b.values.begin(), b.values.end(), value);
            c->write_frames(d.pattern("PROJECTION"), 0, b);
            return LoadedDataset{d, c};
        };

        std::vector<LoadedDataset> out;
        out.push_back(LoadedDataset{tomo, container});
        out.push_back(flat_field(params.at("dark_name").get<std::string>(), tomo::kDarkCounts));
        out.push_back(flat_field(params.at("flat_name").get<std::string>(), tomo::kFlatCounts));
        return out;
    }
};

class RawContainerLoader final : public LoaderPlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "raw_container_loader";
        s.kind = PluginKind::Loader;
        s.params = {
            {"path", "string", "", "container file; falls back to the positional data path"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    static std::string resolve_path(const Params& params,
                                    const std::optional<std::string>& data_path) {
        const std::string p = params.value("path", "");
        if (!p.empty()) return p;
        if (data_path && !data_path->empty()) return *data_path;
        throw Error(Errc::io_failure, "raw_container_loader needs a data path");
    }

    std::vector<SymbolicDataset> declared_datasets(
        const Params& params, const std::optional<std::string>& data_path) const override {
        auto c = Container::open(resolve_path(params, data_path), OpenMode::Read);
        SymbolicDataset ds;
        ds.name = c->descriptor().name;
        for (const auto& [pname, p] : c->descriptor().patterns) ds.pattern_names.push_back(pname);
        return {ds};
    }

    std::vector<LoadedDataset> load(const Params& params,
                                    const std::optional<std::string>& data_path,
                                    const std::filesystem::path&, uint64_t) override {
        auto c = Container::open(resolve_path(params, data_path), OpenMode::Read);
        return {{c->descriptor(), c}};
    }
};

class ContainerSaver final : public SaverPlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "container_saver";
        s.kind = PluginKind::Saver;
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    std::shared_ptr<Container> create(const std::filesystem::path& path,
                                      const DatasetDescriptor& descriptor,
                                      std::span<const uint64_t> chunk_shape) override {
        return Container::create(path, descriptor, chunk_shape);
    }
};

// ---------------------------------------------------------------------------
// Processing plugins
// ---------------------------------------------------------------------------

// Shared boilerplate: plugins that read every input with one pattern and
// keep the first input's geometry for the (single) output.
class PointwisePlugin : public ProcessingPlugin {
  public:
    SymbolicPlan symbolic_plan(const Params& params) const override {
        SymbolicPlan plan;
        const std::string pattern = params.at("pattern");
        for (int i = 0; i < spec().nr_in_datasets; ++i) plan.in_patterns.push_back(pattern);
        plan.out_patterns.resize(spec().nr_out_datasets);  // inherit
        return plan;
    }

    PluginSetup setup(const Params& params,
                      const std::vector<DatasetDescriptor>& in_datasets) override {
        const std::string pattern = params.at("pattern");
        const uint64_t frames = params.at("frames").get<uint64_t>();
        PluginSetup s;
        for (const auto& d : in_datasets) {
            d.pattern(pattern);  // UnknownPattern if absent
            s.in_views.push_back({d.name, pattern, frames, {}});
        }
        PluginEntry tmp;
        tmp.params = params;
        const auto outs = tmp.out_datasets();
        OutDataset out;
        out.descriptor = in_datasets.at(0);
        out.descriptor.name = outs.at(0);
        out.descriptor.dtype = output_dtype(in_datasets.at(0));
        out.write_pattern = pattern;
        out.frames_per_call = frames;
        s.outputs.push_back(std::move(out));
        return s;
    }

  protected:
    virtual DType output_dtype(const DatasetDescriptor& in) const { return DType::F32; }
};

class DarkFlatCorrect final : public PointwisePlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "dark_flat_correct";
        s.nr_in_datasets = 3;
        s.nr_out_datasets = 1;
        s.params = {
            {"in_datasets", "string[]", json::array({"tomo", "dark", "flat"}),
             "raw, dark and flat datasets"},
            {"out_datasets", "string[]", json::array({"tomo"}), "corrected output"},
            {"pattern", "string", "PROJECTION", "access pattern"},
            {"frames", "int", 1, "frames per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        const auto& raw = in[0];
        const auto& dark = in[1];
        const auto& flat = in[2];
        const uint64_t n = raw.frame_elems();
        if (dark.frame_elems() != n || flat.frame_elems() != n)
            throw Error(Errc::shape_mismatch, "dark/flat frames do not match the raw frame");
        auto& o = out[0];
        for (uint64_t j = 0; j < raw.frames; ++j)
            for (uint64_t e = 0; e < n; ++e)
                o.values[j * n + e] = tomo::dark_flat_value(
                    raw.values[j * n + e], dark.values[j * n + e], flat.values[j * n + e]);
    }
};

class MinusLog final : public PointwisePlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "minus_log";
        s.nr_in_datasets = 1;
        s.nr_out_datasets = 1;
        s.params = {
            {"in_datasets", "string[]", json::array({"tomo"}), "corrected transmission data"},
            {"out_datasets", "string[]", json::array({"tomo"}), "absorption output"},
            {"pattern", "string", "SINOGRAM", "access pattern"},
            {"frames", "int", 1, "frames per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        const auto& v = in[0].values;
        auto& o = out[0].values;
        for (size_t e = 0; e < v.size(); ++e) o[e] = tomo::minus_log_value(v[e]);
    }
};

class DatasetRatio final : public PointwisePlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "dataset_ratio";
        s.nr_in_datasets = 2;
        s.nr_out_datasets = 1;
        s.params = {
            {"in_datasets", "string[]", json::array({"num", "den"}),
             "numerator and denominator datasets"},
            {"out_datasets", "string[]", json::array({"ratio"}), "ratio output"},
            {"pattern", "string", "SINOGRAM", "access pattern"},
            {"frames", "int", 1, "frames per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        const auto& num = in[0];
        const auto& den = in[1];
        const uint64_t n = num.frame_elems();
        if (den.frame_elems() != n)
            throw Error(Errc::shape_mismatch, "denominator frames do not match the numerator");
        auto& o = out[0];
        for (uint64_t j = 0; j < num.frames; ++j)
            for (uint64_t e = 0; e < n; ++e)
                o.values[j * n + e] =
                    tomo::ratio_value(num.values[j * n + e], den.values[j * n + e]);
    }
};

class Identity : public PointwisePlugin {
  public:
    static PluginSpec make_spec(std::string name, Driver driver) {
        PluginSpec s;
        s.name = std::move(name);
        s.nr_in_datasets = 1;
        s.nr_out_datasets = 1;
        s.driver = driver;
        s.params = {
            {"in_datasets", "string[]", json::array({"tomo"}), "input dataset"},
            {"out_datasets", "string[]", json::array({"tomo"}), "output dataset"},
            {"pattern", "string", "PROJECTION", "access pattern"},
            {"frames", "int", 1, "frames per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec("identity", Driver::Cpu);
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        out[0].values = in[0].values;
    }

  protected:
    // Identity preserves the element type bit-for-bit.
    DType output_dtype(const DatasetDescriptor& in) const override { return in.dtype; }
};

class IdentityAccel final : public Identity {
  public:
    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec("identity_accel", Driver::Accelerator);
        return s;
    }
};

class MedianFilter3x3 final : public PointwisePlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "median_filter_3x3";
        s.nr_in_datasets = 1;
        s.nr_out_datasets = 1;
        s.params = {
            {"in_datasets", "string[]", json::array({"tomo"}), "input dataset"},
            {"out_datasets", "string[]", json::array({"tomo"}), "filtered output"},
            {"pattern", "string", "SINOGRAM", "access pattern"},
            {"frames", "int", 1, "frames per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    PluginSetup setup(const Params& params,
                      const std::vector<DatasetDescriptor>& in_datasets) override {
        PluginSetup s = PointwisePlugin::setup(params, in_datasets);
        const auto& d = in_datasets[0];
        const Pattern& p = d.pattern(s.in_views[0].pattern_name);
        if (p.core_dims.size() != 2)
            throw Error(Errc::shape_mismatch,
                        "median_filter_3x3 needs a pattern with two core dimensions");
        if (p.slice_dims.empty())
            throw Error(Errc::shape_mismatch,
                        "median_filter_3x3 needs at least one slice dimension");
        // One frame of padding along the first slice dimension; the window
        // is 3 wide there and 3x3 over the core plane.
        s.in_views[0].padding.assign(d.ndims(), 0);
        s.in_views[0].padding[p.slice_dims[0]] = 1;

        ndims_ = d.ndims();
        padded_dim_ = p.slice_dims[0];
        in_window_.assign(ndims_, 1);
        out_window_.assign(ndims_, 1);
        core_a_ = ndims_;
        core_b_ = ndims_;
        for (size_t dim = 0; dim < ndims_; ++dim) {
            if (p.is_core(dim)) {
                in_window_[dim] = d.shape[dim];
                out_window_[dim] = d.shape[dim];
                if (core_a_ == ndims_)
                    core_a_ = dim;
                else
                    core_b_ = dim;
            }
        }
        in_window_[padded_dim_] = 3;
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        const auto in_strides = row_major_strides(in_window_);
        const auto out_strides = row_major_strides(out_window_);
        const uint64_t ea = in_window_[core_a_], eb = in_window_[core_b_];
        const auto& src = in[0];
        auto& dst = out[0];
        double window[27];
        for (uint64_t j = 0; j < src.frames; ++j) {
            const double* s = src.values.data() + j * src.frame_elems();
            double* o = dst.values.data() + j * dst.frame_elems();
            for (uint64_t a = 0; a < ea; ++a) {
                for (uint64_t b = 0; b < eb; ++b) {
                    size_t n = 0;
                    for (uint64_t w = 0; w < 3; ++w) {
                        for (int da = -1; da <= 1; ++da) {
                            for (int db = -1; db <= 1; ++db) {
                                const uint64_t ca = uint64_t(std::clamp<int64_t>(
                                    int64_t(a) + da, 0, int64_t(ea) - 1));
                                const uint64_t cb = uint64_t(std::clamp<int64_t>(
                                    int64_t(b) + db, 0, int64_t(eb) - 1));
                                window[n++] = s[ca * in_strides[core_a_] +
                                                cb * in_strides[core_b_] +
                                                w * in_strides[padded_dim_]];
                            }
                        }
                    }
                    o[a * out_strides[core_a_] + b * out_strides[core_b_]] =
                        tomo::median27(std::span<double>(window, 27));
                }
            }
        }
    }

  private:
    size_t ndims_ = 0;
    size_t padded_dim_ = 0;
    size_t core_a_ = 0, core_b_ = 0;
    std::vector<uint64_t> in_window_, out_window_;
};

class FbpRecon final : public ProcessingPlugin {
  public:
    static PluginSpec make_spec() {
        PluginSpec s;
        s.name = "fbp_recon";
        s.nr_in_datasets = 1;
        s.nr_out_datasets = 1;
        s.params = {
            {"in_datasets", "string[]", json::array({"tomo"}), "absorption sinograms"},
            {"out_datasets", "string[]", json::array({"recon"}), "reconstructed slices"},
            {"center", "number", -1.0, "rotation axis in detector pixels; -1 = n_x/2"},
            {"frames", "int", 1, "sinograms per call"},
        };
        return s;
    }

    const PluginSpec& spec() const override {
        static const PluginSpec s = make_spec();
        return s;
    }

    SymbolicPlan symbolic_plan(const Params&) const override {
        SymbolicPlan plan;
        plan.in_patterns = {"SINOGRAM"};
        plan.out_patterns = {std::vector<std::string>{"RECON"}};
        return plan;
    }

    PluginSetup setup(const Params& params,
                      const std::vector<DatasetDescriptor>& in_datasets) override {
        const auto& d = in_datasets.at(0);
        const Pattern& sino = d.pattern("SINOGRAM");
        if (sino.core_dims.size() != 2)
            throw Error(Errc::shape_mismatch, "SINOGRAM must have core dims (x, theta)");
        x_dim_ = sino.core_dims[0];
        theta_dim_ = sino.core_dims[1];
        n_x_ = d.shape[x_dim_];
        n_theta_ = d.shape[theta_dim_];
        ndims_ = d.ndims();
        in_window_.assign(ndims_, 1);
        in_window_[x_dim_] = n_x_;
        in_window_[theta_dim_] = n_theta_;

        angles_.clear();
        if (d.metadata.contains("angles_deg")) {
            const auto& a = d.metadata.at("angles_deg");
            if (a.size() != n_theta_)
                throw Error(Errc::angles_mismatch,
                            std::to_string(a.size()) + " angles for " +
                                std::to_string(n_theta_) + " projections");
            for (const auto& v : a)
                angles_.push_back(v.get<double>() * std::numbers::pi / 180.0);
        } else {
            for (uint64_t a = 0; a < n_theta_; ++a)
                angles_.push_back(std::numbers::pi * double(a) / double(n_theta_));
        }
        center_ = params.at("center").get<double>();
        if (center_ < 0) center_ = double(n_x_) / 2.0;

        const uint64_t frames = params.at("frames").get<uint64_t>();
        PluginEntry tmp;
        tmp.params = params;
        const uint64_t n_slices = frame_count(d, "SINOGRAM");

        OutDataset out;
        out.descriptor.name = tmp.out_datasets().at(0);
        out.descriptor.shape = {n_slices, n_x_, n_x_};
        out.descriptor.dtype = DType::F32;
        out.descriptor.axis_labels = {"slice.index", "recon_y.pixels", "recon_x.pixels"};
        out.descriptor.add_pattern(Pattern{"RECON", {2, 1}, {0}});
        out.descriptor.metadata = d.metadata;
        out.write_pattern = "RECON";
        out.frames_per_call = frames;

        PluginSetup s;
        s.in_views.push_back({d.name, "SINOGRAM", frames, {}});
        s.outputs.push_back(std::move(out));
        return s;
    }

    void process(const ProcessCall&, const std::vector<FrameBlock>& in,
                 std::vector<FrameBlock>& out) const override {
        const auto strides = row_major_strides(in_window_);
        const auto& src = in[0];
        auto& dst = out[0];
        std::vector<double> sino(n_theta_ * n_x_);
        for (uint64_t j = 0; j < src.frames; ++j) {
            const double* s = src.values.data() + j * src.frame_elems();
            for (uint64_t a = 0; a < n_theta_; ++a)
                for (uint64_t i = 0; i < n_x_; ++i)
                    sino[a * n_x_ + i] = s[a * strides[theta_dim_] + i * strides[x_dim_]];
            tomo::fbp_slice(sino, n_theta_, n_x_, angles_, center_,
                            std::span<double>(dst.values.data() + j * dst.frame_elems(),
                                              n_x_ * n_x_));
        }
    }

  private:
    size_t ndims_ = 0, x_dim_ = 0, theta_dim_ = 0;
    uint64_t n_x_ = 0, n_theta_ = 0;
    double center_ = -1.0;
    std::vector<double> angles_;
    std::vector<uint64_t> in_window_;
};

}  // namespace

void register_tomo_plugins(PluginRegistry& registry) {
    registry.add_loader(SyntheticTomoLoader::make_spec(),
                        [] { return std::make_unique<SyntheticTomoLoader>(); });
    registry.add_loader(RawContainerLoader::make_spec(),
                        [] { return std::make_unique<RawContainerLoader>(); });
    registry.add_saver(ContainerSaver::make_spec(), [] { return std::make_unique<ContainerSaver>(); });
    registry.add_processing(DarkFlatCorrect::make_spec(),
                            [] { return std::make_unique<DarkFlatCorrect>(); });
    registry.add_processing(MinusLog::make_spec(), [] { return std::make_unique<MinusLog>(); });
    registry.add_processing(MedianFilter3x3::make_spec(),
                            [] { return std::make_unique<MedianFilter3x3>(); });
    registry.add_processing(FbpRecon::make_spec(), [] { return std::make_unique<FbpRecon>(); });
    registry.add_processing(DatasetRatio::make_spec(),
                            [] { return std::make_unique<DatasetRatio>(); });
    registry.add_processing(Identity::make_spec("identity", Driver::Cpu),
                            [] { return std::make_unique<Identity>(); });
    registry.add_processing(Identity::make_spec("identity_accel", Driver::Accelerator),
                            [] { return std::make_unique<IdentityAccel>(); });
}

void register_builtin_plugins(PluginRegistry& registry) { register_tomo_plugins(registry); }

}  // namespace oocpipe
