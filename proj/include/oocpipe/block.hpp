#pragma once

#include <cstdint>
#include <vector>

namespace oocpipe {

// A batch of frames in flight between the container and a plugin.
//
// `window` has one extent per dataset dimension: core dimensions carry their
// full extent, slice dimensions carry 1 + 2*pad. Values are stored
// frame-major, then row-major over the dataset's dimension order, so frame j
// occupies values[j*frame_elems() .. (j+1)*frame_elems()).
struct FrameBlock {
    uint64_t frames = 0;
    std::vector<uint64_t> window;
    std::vector<double> values;

    uint64_t frame_elems() const {
        uint64_t n = 1;
        for (uint64_t e : window) n *= e;
        return n;
    }

    uint64_t total_elems() const { return frames * frame_elems(); }

    static FrameBlock zeros(uint64_t frames, std::vector<uint64_t> window) {
        FrameBlock b;
        b.frames = frames;
        b.window = std::move(window);
        b.values.assign(b.total_elems(), 0.0);
        return b;
    }
};

// Row-major strides for a given extent list (innermost dimension last).
std::vector<uint64_t> row_major_strides(const std::vector<uint64_t>& extents);

}  // namespace oocpipe
