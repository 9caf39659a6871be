#include "oocpipe/error.hpp"

namespace oocpipe {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::overlapping_dims: return "OverlappingDims";
        case Errc::missing_dims: return "MissingDims";
        case Errc::dim_out_of_range: return "DimOutOfRange";
        case Errc::unknown_pattern: return "UnknownPattern";
        case Errc::ordinal_out_of_range: return "OrdinalOutOfRange";
        case Errc::ndims_mismatch: return "NdimsMismatch";
        case Errc::invalid_chunk_shape: return "InvalidChunkShape";
        case Errc::io_failure: return "IoFailure";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::bad_magic: return "BadMagic";
        case Errc::unsupported_version: return "UnsupportedVersion";
        case Errc::too_large: return "TooLarge";
        case Errc::invalid_inputs: return "InvalidInputs";
        case Errc::unknown_dataset: return "UnknownDataset";
        case Errc::unknown_plugin: return "UnknownPlugin";
        case Errc::no_accelerators: return "NoAccelerators";
        case Errc::plugin_failure: return "PluginFailure";
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::angles_mismatch: return "AnglesMismatch";
        case Errc::bad_index: return "BadIndex";
        case Errc::unknown_param: return "UnknownParam";
        case Errc::malformed_log: return "MalformedLog";
    }
    return "UnknownError";
}

}  // namespace oocpipe
