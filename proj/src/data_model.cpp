#include "oocpipe/data_model.hpp"

#include <algorithm>
#include <numeric>

namespace oocpipe {

const char* dtype_name(DType t) {
    switch (t) {
        case DType::U16: return "u16";
        case DType::F32: return "f32";
        case DType::F64: return "f64";
    }
    return "?";
}

DType dtype_from_name(const std::string& name) {
    if (name == "u16") return DType::U16;
    if (name == "f32") return DType::F32;
    if (name == "f64") return DType::F64;
    throw Error(Errc::invalid_inputs, "unknown dtype name '" + name + "'");
}

bool Pattern::is_core(size_t dim) const {
    return std::find(core_dims.begin(), core_dims.end(), dim) != core_dims.end();
}

uint64_t DatasetDescriptor::element_count() const {
    uint64_t n = 1;
    for (uint64_t e : shape) n *= e;
    return n;
}

const Pattern& DatasetDescriptor::pattern(const std::string& pattern_name) const {
    auto it = patterns.find(pattern_name);
    if (it == patterns.end())
        throw Error(Errc::unknown_pattern,
                    "dataset '" + name + "' has no pattern '" + pattern_name + "'");
    return it->second;
}

void DatasetDescriptor::add_pattern(Pattern p) {
    validate_pattern(ndims(), p);
    patterns[p.name] = std::move(p);
}

void DatasetDescriptor::validate() const {
    if (name.empty()) throw Error(Errc::invalid_inputs, "dataset name must be non-empty");
    if (axis_labels.size() != shape.size())
        throw Error(Errc::invalid_inputs, "dataset '" + name + "': " +
                                              std::to_string(axis_labels.size()) +
                                              " axis labels for " + std::to_string(shape.size()) +
                                              " dimensions");
    for (uint64_t e : shape)
        if (e == 0) throw Error(Errc::invalid_inputs, "dataset '" + name + "': zero extent");
    for (const auto& [pname, p] : patterns) validate_pattern(ndims(), p);
}

void PluginDatasetView::validate_against(const DatasetDescriptor& desc) const {
    const Pattern& p = desc.pattern(pattern_name);
    if (frames_per_call == 0)
        throw Error(Errc::invalid_inputs, "frames_per_call must be positive");
    if (padding.empty()) return;
    if (padding.size() != desc.ndims())
        throw Error(Errc::shape_mismatch, "padding has " + std::to_string(padding.size()) +
                                              " entries for " + std::to_string(desc.ndims()) +
                                              " dimensions");
    for (size_t d = 0; d < padding.size(); ++d)
        if (padding[d] != 0 && p.is_core(d))
            throw Error(Errc::invalid_inputs,
                        "padding on core dimension " + std::to_string(d) + " must be zero");
}

const char* dim_class_name(DimClass c) {
    switch (c) {
        case DimClass::CoreCore: return "core/core";
        case DimClass::CoreSlice: return "core/slice";
        case DimClass::CoreOther: return "core/other";
        case DimClass::SliceSlice: return "slice/slice";
        case DimClass::SliceOther: return "slice/other";
        case DimClass::OtherOther: return "other/other";
    }
    return "?";
}

DimRole dim_role(const Pattern& pattern, size_t dim) {
    if (pattern.is_core(dim)) return DimRole::Core;
    if (pattern.is_first_slice(dim)) return DimRole::Slice;
    return DimRole::Other;
}

DimClass pair_roles(DimRole a, DimRole b) {
    // Order within the pair is irrelevant.
    if (a > b) std::swap(a, b);
    if (a == DimRole::Core) {
        if (b == DimRole::Core) return DimClass::CoreCore;
        if (b == DimRole::Slice) return DimClass::CoreSlice;
        return DimClass::CoreOther;
    }
    if (a == DimRole::Slice) {
        if (b == DimRole::Slice) return DimClass::SliceSlice;
        return DimClass::SliceOther;
    }
    return DimClass::OtherOther;
}

void validate_pattern(size_t ndims, const Pattern& pattern) {
    std::vector<uint8_t> seen(ndims, 0);
    auto visit = [&](const std::vector<size_t>& dims) {
        for (size_t d : dims) {
            if (d >= ndims)
                throw Error(Errc::dim_out_of_range,
                            "pattern '" + pattern.name + "': dimension " + std::to_string(d) +
                                " out of range for ndims=" + std::to_string(ndims));
            if (seen[d]++)
                throw Error(Errc::overlapping_dims, "pattern '" + pattern.name +
                                                        "': dimension " + std::to_string(d) +
                                                        " listed twice");
        }
    };
    visit(pattern.core_dims);
    visit(pattern.slice_dims);
    for (size_t d = 0; d < ndims; ++d)
        if (!seen[d])
            throw Error(Errc::missing_dims, "pattern '" + pattern.name + "': dimension " +
                                                std::to_string(d) + " not covered");
}

void validate_pattern(const DatasetDescriptor& desc, const Pattern& pattern) {
    validate_pattern(desc.ndims(), pattern);
}

uint64_t frame_count(const std::vector<uint64_t>& shape, const Pattern& pattern) {
    uint64_t n = 1;
    for (size_t d : pattern.slice_dims) n *= shape.at(d);
    return n;
}

uint64_t frame_count(const DatasetDescriptor& desc, const std::string& pattern_name) {
    return frame_count(desc.shape, desc.pattern(pattern_name));
}

std::vector<uint64_t> frame_coords(const std::vector<uint64_t>& shape, const Pattern& pattern,
                                   uint64_t ordinal) {
    const uint64_t total = frame_count(shape, pattern);
    if (ordinal >= total)
        throw Error(Errc::ordinal_out_of_range, "ordinal " + std::to_string(ordinal) +
                                                    " >= frame count " + std::to_string(total));
    std::vector<uint64_t> coords(pattern.slice_dims.size());
    uint64_t rest = ordinal;
    for (size_t k = 0; k < pattern.slice_dims.size(); ++k) {
        const uint64_t extent = shape.at(pattern.slice_dims[k]);
        coords[k] = rest % extent;
        rest /= extent;
    }
    return coords;
}

std::vector<uint64_t> frame_coords(const DatasetDescriptor& desc, const std::string& pattern_name,
                                   uint64_t ordinal) {
    return frame_coords(desc.shape, desc.pattern(pattern_name), ordinal);
}

std::vector<DimClass> classify_dims(const Pattern& now, const Pattern& next) {
    const size_t ndims = now.ndims();
    if (next.ndims() != ndims)
        throw Error(Errc::ndims_mismatch, "patterns '" + now.name + "' (" +
                                              std::to_string(ndims) + "d) and '" + next.name +
                                              "' (" + std::to_string(next.ndims()) +
                                              "d) disagree");
    validate_pattern(ndims, now);
    validate_pattern(ndims, next);
    std::vector<DimClass> classes(ndims);
    for (size_t d = 0; d < ndims; ++d)
        classes[d] = pair_roles(dim_role(now, d), dim_role(next, d));
    return classes;
}

}  // namespace oocpipe
