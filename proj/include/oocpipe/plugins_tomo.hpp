#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oocpipe/plugin.hpp"

namespace oocpipe {

// ---------------------------------------------------------------------------
// Synthetic phantom
// ---------------------------------------------------------------------------

// Disks in the reconstruction plane, centers in unit-square coordinates with
// the rotation axis at (0.5, 0.5). Projections are analytic chord lengths,
// so the forward model is exact.
struct PhantomSpec {
    struct Disk {
        double cx = 0.5;
        double cy = 0.5;
        double radius = 0.25;
        double density = 1.0;
    };
    std::vector<Disk> disks;
    uint64_t detector_bins = 64;  // n_x
    uint64_t angle_count = 90;    // n_theta, uniform over [0, 180) degrees

    static PhantomSpec from_params(const Params& params);
    void validate() const;  // InvalidSpec
};

namespace tomo {

inline constexpr double kEpsilon = 1e-6;
inline constexpr double kFlatCounts = 50000.0;  // I0
inline constexpr double kDarkCounts = 1000.0;   // d0

// Detector-bin center in rotation-centered coordinates: bin i of n maps to
// (i + 0.5)/n - 0.5.
double detector_coord(uint64_t bin, uint64_t bins);

// Sum of chord lengths (scaled by density) through all disks along the ray
// at `angle_rad` with signed offset `s` from the rotation center.
double line_integral(const PhantomSpec& spec, double angle_rad, double s);

// Deterministic per-element jitter in [0, 1) for synthetic data texture.
double jitter01(uint64_t key);

double dark_flat_value(double raw, double dark, double flat);
double minus_log_value(double v);
double ratio_value(double num, double den);
double median27(std::span<double> window);  // reorders its argument

// Filtered back-projection of one sinogram (layout sino[a*n_x + i]) onto an
// n_x * n_x grid (row-major, row = y). Rows are zero-padded to the next
// power of two >= 2*n_x, ramp-filtered, inverse-transformed and accumulated
// along each angle with linear interpolation, scaled by pi/n_theta.
// `center` is the detector coordinate of the rotation axis (default n_x/2).
void fbp_slice(std::span<const double> sino, uint64_t n_theta, uint64_t n_x,
               std::span<const double> angles_rad, double center, std::span<double> out);

}  // namespace tomo

void register_tomo_plugins(PluginRegistry& registry);

}  // namespace oocpipe
