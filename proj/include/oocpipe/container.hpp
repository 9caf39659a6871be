#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "oocpipe/block.hpp"
#include "oocpipe/data_model.hpp"

namespace oocpipe {

// On-disk layout (all integers little-endian):
//
//   magic           8 bytes "SAVUCNT1"
//   version         u32
//   dtype code      u8
//   ndims           u8
//   shape           u64 per dim
//   chunk_shape     u64 per dim
//   dataset name    u16 length + UTF-8 bytes
//   axis labels     u8 count, each u16 length + UTF-8
//   patterns        u8 count, each u16-length name, u8 n_core + core dims
//                   (u8 each), u8 n_slice + slice dims (u8 each)
//   chunk index     u64 per chunk-grid cell, row-major; 0 = unwritten,
//                   otherwise the absolute file offset of the chunk payload
//
// Chunks are stored full-size (edge chunks zero-padded past the shape), so
// the payload offset of grid cell s is always data_start + s * chunk_bytes
// and disjoint cells never share file ranges.
struct ContainerHeader {
    static constexpr char kMagic[8] = {'S', 'A', 'V', 'U', 'C', 'N', 'T', '1'};
    static constexpr uint32_t kVersion = 1;
    static constexpr size_t kMaxDims = 8;

    DatasetDescriptor descriptor;  // metadata dict is not persisted
    std::vector<uint64_t> chunk_shape;

    std::vector<uint8_t> encode() const;
    static ContainerHeader decode(std::span<const uint8_t> bytes, size_t* header_size = nullptr);

    void validate() const;
};

enum class OpenMode { Read, ReadWrite };

struct StorageStats {
    uint64_t chunks_read = 0;
    uint64_t chunks_written = 0;
};

// One chunked dataset on disk. Thread-safety: concurrent readers are always
// safe; concurrent writers must target disjoint chunk sets or rely on the
// per-chunk serialization this class provides (read-modify-write of a chunk
// happens under a per-chunk lock).
class Container {
  public:
    ~Container();
    Container(const Container&) = delete;
    Container& operator=(const Container&) = delete;

    static std::shared_ptr<Container> create(const std::filesystem::path& path,
                                             const DatasetDescriptor& descriptor,
                                             std::span<const uint64_t> chunk_shape);
    static std::shared_ptr<Container> open(const std::filesystem::path& path, OpenMode mode);

    const DatasetDescriptor& descriptor() const { return header_.descriptor; }
    const std::vector<uint64_t>& shape() const { return header_.descriptor.shape; }
    const std::vector<uint64_t>& chunk_shape() const { return header_.chunk_shape; }
    const std::filesystem::path& path() const { return path_; }
    OpenMode mode() const { return mode_; }

    uint64_t chunk_count() const;

    // Reads `count` consecutive frames starting at `start` (clipped to the
    // remaining frames). `padding` is empty or one pad width per dimension;
    // padded positions beyond the dataset edge replicate the edge value.
    FrameBlock read_frames(const std::string& pattern_name, uint64_t start, uint64_t count,
                           std::span<const uint64_t> padding = {}) const;
    FrameBlock read_frames(const Pattern& pattern, uint64_t start, uint64_t count,
                           std::span<const uint64_t> padding = {}) const;

    // Writes block.frames frames starting at ordinal `start`. The block
    // window must be exactly the unpadded frame window (core extents, 1 per
    // slice dim).
    void write_frames(const std::string& pattern_name, uint64_t start, const FrameBlock& block);
    void write_frames(const Pattern& pattern, uint64_t start, const FrameBlock& block);

    StorageStats stats() const;

  private:
    Container() = default;

    struct FrameGeometry;
    FrameGeometry make_geometry(const Pattern& pattern, std::span<const uint64_t> padding) const;

    uint64_t chunk_slot(std::span<const uint64_t> cell) const;
    void load_chunk(uint64_t slot, std::vector<uint8_t>& buf) const;
    void store_chunk(uint64_t slot, const std::vector<uint8_t>& buf);

    double element_from_bytes(const uint8_t* p) const;
    void element_to_bytes(double v, uint8_t* p) const;

    std::filesystem::path path_;
    ContainerHeader header_;
    OpenMode mode_ = OpenMode::Read;
    int fd_ = -1;

    uint64_t data_start_ = 0;
    uint64_t chunk_bytes_ = 0;
    std::vector<uint64_t> grid_;          // chunk cells per dimension
    std::vector<uint64_t> chunk_strides_; // element strides within a chunk

    std::unique_ptr<std::atomic<uint64_t>[]> index_;
    mutable std::array<std::mutex, 64> chunk_locks_;

    mutable std::atomic<uint64_t> chunks_read_{0};
    std::atomic<uint64_t> chunks_written_{0};
};

}  // namespace oocpipe
