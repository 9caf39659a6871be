#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oocpipe/error.hpp"

namespace oocpipe {

// ---------------------------------------------------------------------------
// Element types
// ---------------------------------------------------------------------------

enum class DType : uint8_t {
    U16 = 0,
    F32 = 1,
    F64 = 2,
};

inline uint32_t dtype_bytes(DType t) {
    switch (t) {
        case DType::U16: return 2;
        case DType::F32: return 4;
        case DType::F64: return 8;
    }
    throw Error(Errc::invalid_inputs, "unknown dtype code");
}

const char* dtype_name(DType t);
DType dtype_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

// A pattern splits a dataset's dimensions into core dimensions (delivered in
// full with every frame) and slice dimensions (iterated one index at a time).
// slice_dims order matters: slice_dims[0] is the fastest-changing dimension
// when frames are enumerated.
struct Pattern {
    std::string name;
    std::vector<size_t> core_dims;
    std::vector<size_t> slice_dims;

    size_t ndims() const { return core_dims.size() + slice_dims.size(); }

    bool is_core(size_t dim) const;
    bool is_first_slice(size_t dim) const {
        return !slice_dims.empty() && slice_dims.front() == dim;
    }
};

// ---------------------------------------------------------------------------
// Dataset descriptors
// ---------------------------------------------------------------------------

// Everything the framework knows about one dataset apart from the values:
// name, extents, element type, axis labels ("label.units" per dimension),
// the pattern table, and free-form metadata.
struct DatasetDescriptor {
    std::string name;
    std::vector<uint64_t> shape;
    DType dtype = DType::F32;
    std::vector<std::string> axis_labels;
    std::map<std::string, Pattern> patterns;
    nlohmann::json metadata = nlohmann::json::object();

    size_t ndims() const { return shape.size(); }
    uint64_t element_count() const;

    const Pattern& pattern(const std::string& pattern_name) const;
    void add_pattern(Pattern p);

    // Throws unless shape, labels and every pattern are mutually consistent.
    void validate() const;
};

// A plugin's binding of one dataset for the duration of a plugin run: which
// pattern to slice by, how many frames per process call, and per-dimension
// pad widths (slice dimensions only; core entries must be zero).
struct PluginDatasetView {
    std::string dataset_name;
    std::string pattern_name;
    uint64_t frames_per_call = 1;
    std::vector<uint64_t> padding;  // empty means no padding

    void validate_against(const DatasetDescriptor& desc) const;
};

// ---------------------------------------------------------------------------
// Dimension classification
// ---------------------------------------------------------------------------

// Role of one dimension under one pattern: a core dimension, the first slice
// dimension, or any later slice dimension.
enum class DimRole : uint8_t { Core, Slice, Other };

// Unordered pair of roles under the (now, next) pattern pair.
enum class DimClass : uint8_t {
    CoreCore,
    CoreSlice,
    CoreOther,
    SliceSlice,
    SliceOther,
    OtherOther,
};

const char* dim_class_name(DimClass c);

DimRole dim_role(const Pattern& pattern, size_t dim);
DimClass pair_roles(DimRole a, DimRole b);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Throws OverlappingDims / MissingDims / DimOutOfRange unless the pattern's
// core and slice lists partition {0..ndims-1}.
void validate_pattern(size_t ndims, const Pattern& pattern);
void validate_pattern(const DatasetDescriptor& desc, const Pattern& pattern);

// Number of frames the pattern yields: product of the slice-dim extents,
// 1 when there are no slice dimensions.
uint64_t frame_count(const DatasetDescriptor& desc, const std::string& pattern_name);
uint64_t frame_count(const std::vector<uint64_t>& shape, const Pattern& pattern);

// Mixed-radix decomposition of a frame ordinal over the slice dims, with
// slice_dims[0] as the fastest-varying digit. Returns one coordinate per
// slice dim, in slice_dims order.
std::vector<uint64_t> frame_coords(const DatasetDescriptor& desc, const std::string& pattern_name,
                                   uint64_t ordinal);
std::vector<uint64_t> frame_coords(const std::vector<uint64_t>& shape, const Pattern& pattern,
                                   uint64_t ordinal);

// Per-dimension role pairs for the (now, next) pattern pair. Symmetric in
// its arguments.
std::vector<DimClass> classify_dims(const Pattern& now, const Pattern& next);

}  // namespace oocpipe
