#include "oocpipe/container.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

namespace oocpipe {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_str16(std::vector<uint8_t>& out, const std::string& s) {
    if (s.size() > 0xffff) throw Error(Errc::invalid_inputs, "string too long for header");
    put_u16(out, static_cast<uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

class Reader {
  public:
    explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        auto p = take(2);
        return static_cast<uint16_t>(p[0] | (p[1] << 8));
    }
    uint32_t u32() {
        auto p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        auto p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
        return v;
    }
    std::string str16() {
        uint16_t n = u16();
        auto p = take(n);
        return std::string(reinterpret_cast<const char*>(p.data()), n);
    }
    size_t consumed() const { return pos_; }

  private:
    std::span<const uint8_t> take(size_t n) {
        if (pos_ + n > bytes_.size())
            throw Error(Errc::bad_magic, "truncated container header");
        auto p = bytes_.subspan(pos_, n);
        pos_ += n;
        return p;
    }

    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

ssize_t pread_full(int fd, void* buf, size_t n, off_t off) {
    auto* p = static_cast<uint8_t*>(buf);
    size_t done = 0;
    while (done < n) {
        ssize_t r = ::pread(fd, p + done, n - done, off + static_cast<off_t>(done));
        if (r < 0) return r;
        if (r == 0) break;  // EOF: caller zero-fills
        done += static_cast<size_t>(r);
    }
    return static_cast<ssize_t>(done);
}

void pwrite_full(int fd, const void* buf, size_t n, off_t off) {
    const auto* p = static_cast<const uint8_t*>(buf);
    size_t done = 0;
    while (done < n) {
        ssize_t r = ::pwrite(fd, p + done, n - done, off + static_cast<off_t>(done));
        if (r < 0) throw Error(Errc::io_failure, "pwrite: " + std::string(std::strerror(errno)));
        done += static_cast<size_t>(r);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Header encode/decode
// ---------------------------------------------------------------------------

void ContainerHeader::validate() const {
    descriptor.validate();
    const size_t ndims = descriptor.ndims();
    if (ndims > kMaxDims)
        throw Error(Errc::invalid_inputs, "ndims " + std::to_string(ndims) + " exceeds 8");
    if (chunk_shape.size() != ndims)
        throw Error(Errc::invalid_chunk_shape, "chunk shape rank mismatch");
    for (size_t d = 0; d < ndims; ++d)
        if (chunk_shape[d] < 1 || chunk_shape[d] > descriptor.shape[d])
            throw Error(Errc::invalid_chunk_shape,
                        "chunk extent " + std::to_string(chunk_shape[d]) +
                            " out of [1, " + std::to_string(descriptor.shape[d]) +
                            "] in dimension " + std::to_string(d));
    if (descriptor.axis_labels.size() > 0xff || descriptor.patterns.size() > 0xff)
        throw Error(Errc::invalid_inputs, "too many labels or patterns for header");
}

std::vector<uint8_t> ContainerHeader::encode() const {
    validate();
    std::vector<uint8_t> out;
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    out.push_back(static_cast<uint8_t>(descriptor.dtype));
    out.push_back(static_cast<uint8_t>(descriptor.ndims()));
    for (uint64_t e : descriptor.shape) put_u64(out, e);
    for (uint64_t e : chunk_shape) put_u64(out, e);
    put_str16(out, descriptor.name);
    out.push_back(static_cast<uint8_t>(descriptor.axis_labels.size()));
    for (const auto& label : descriptor.axis_labels) put_str16(out, label);
    out.push_back(static_cast<uint8_t>(descriptor.patterns.size()));
    for (const auto& [pname, p] : descriptor.patterns) {
        put_str16(out, pname);
        out.push_back(static_cast<uint8_t>(p.core_dims.size()));
        for (size_t d : p.core_dims) out.push_back(static_cast<uint8_t>(d));
        out.push_back(static_cast<uint8_t>(p.slice_dims.size()));
        for (size_t d : p.slice_dims) out.push_back(static_cast<uint8_t>(d));
    }
    return out;
}

ContainerHeader ContainerHeader::decode(std::span<const uint8_t> bytes, size_t* header_size) {
    Reader r(bytes);
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw Error(Errc::bad_magic, "not a container file");
    r.u64();  // skip magic
    uint32_t version = r.u32();
    if (version != kVersion)
        throw Error(Errc::unsupported_version, "container version " + std::to_string(version));

    ContainerHeader h;
    uint8_t dtype_code = r.u8();
    if (dtype_code > 2)
        throw Error(Errc::unsupported_version, "unknown dtype code " + std::to_string(dtype_code));
    h.descriptor.dtype = static_cast<DType>(dtype_code);
    uint8_t ndims = r.u8();
    if (ndims > kMaxDims) throw Error(Errc::unsupported_version, "ndims exceeds 8");
    h.descriptor.shape.resize(ndims);
    for (auto& e : h.descriptor.shape) e = r.u64();
    h.chunk_shape.resize(ndims);
    for (auto& e : h.chunk_shape) e = r.u64();
    h.descriptor.name = r.str16();
    uint8_t nlabels = r.u8();
    for (int i = 0; i < nlabels; ++i) h.descriptor.axis_labels.push_back(r.str16());
    uint8_t npatterns = r.u8();
    for (int i = 0; i < npatterns; ++i) {
        Pattern p;
        p.name = r.str16();
        uint8_t ncore = r.u8();
        for (int k = 0; k < ncore; ++k) p.core_dims.push_back(r.u8());
        uint8_t nslice = r.u8();
        for (int k = 0; k < nslice; ++k) p.slice_dims.push_back(r.u8());
        h.descriptor.patterns[p.name] = std::move(p);
    }
    if (header_size) *header_size = r.consumed();
    h.validate();
    return h;
}

// ---------------------------------------------------------------------------
// Container
// ---------------------------------------------------------------------------

Container::~Container() {
    if (fd_ >= 0) ::close(fd_);
}

uint64_t Container::chunk_count() const {
    uint64_t n = 1;
    for (uint64_t g : grid_) n *= g;
    return n;
}

namespace {

// Shared post-construction setup for create/open.
void init_layout(const ContainerHeader& h, uint64_t header_size, uint64_t* data_start,
                 uint64_t* chunk_bytes, std::vector<uint64_t>* grid,
                 std::vector<uint64_t>* chunk_strides) {
    const size_t ndims = h.descriptor.ndims();
    grid->resize(ndims);
    for (size_t d = 0; d < ndims; ++d)
        (*grid)[d] = ceil_div(h.descriptor.shape[d], h.chunk_shape[d]);
    *chunk_strides = row_major_strides(h.chunk_shape);
    uint64_t elems = 1;
    for (uint64_t c : h.chunk_shape) elems *= c;
    *chunk_bytes = elems * dtype_bytes(h.descriptor.dtype);
    uint64_t cells = 1;
    for (uint64_t g : *grid) cells *= g;
    *data_start = header_size + 8 * cells;
}

}  // namespace

std::shared_ptr<Container> Container::create(const std::filesystem::path& path,
                                             const DatasetDescriptor& descriptor,
                                             std::span<const uint64_t> chunk_shape) {
    auto c = std::shared_ptr<Container>(new Container);
    c->path_ = path;
    c->header_.descriptor = descriptor;
    c->header_.chunk_shape.assign(chunk_shape.begin(), chunk_shape.end());
    c->header_.validate();
    c->mode_ = OpenMode::ReadWrite;

    std::vector<uint8_t> header_bytes = c->header_.encode();
    init_layout(c->header_, header_bytes.size(), &c->data_start_, &c->chunk_bytes_, &c->grid_,
                &c->chunk_strides_);

    c->fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
    if (c->fd_ < 0)
        throw Error(Errc::io_failure,
                    "cannot create '" + path.string() + "': " + std::strerror(errno));

    const uint64_t cells = c->chunk_count();
    std::vector<uint8_t> index_bytes(8 * cells, 0);
    pwrite_full(c->fd_, header_bytes.data(), header_bytes.size(), 0);
    pwrite_full(c->fd_, index_bytes.data(), index_bytes.size(),
                static_cast<off_t>(header_bytes.size()));
    // Reserve the full payload region so chunk offsets are fixed; the file
    // stays sparse until chunks are written.
    if (::ftruncate(c->fd_, static_cast<off_t>(c->data_start_ + cells * c->chunk_bytes_)) != 0)
        throw Error(Errc::io_failure, "ftruncate: " + std::string(std::strerror(errno)));

    c->index_ = std::make_unique<std::atomic<uint64_t>[]>(cells);
    for (uint64_t i = 0; i < cells; ++i) c->index_[i].store(0, std::memory_order_relaxed);
    return c;
}

std::shared_ptr<Container> Container::open(const std::filesystem::path& path, OpenMode mode) {
    auto c = std::shared_ptr<Container>(new Container);
    c->path_ = path;
    c->mode_ = mode;
    c->fd_ = ::open(path.c_str(), mode == OpenMode::Read ? O_RDONLY : O_RDWR);
    if (c->fd_ < 0)
        throw Error(Errc::io_failure,
                    "cannot open '" + path.string() + "': " + std::strerror(errno));

    const auto file_size = std::filesystem::file_size(path);
    std::vector<uint8_t> prefix(std::min<uint64_t>(file_size, 1 << 20));
    if (pread_full(c->fd_, prefix.data(), prefix.size(), 0) < 0)
        throw Error(Errc::io_failure, "pread: " + std::string(std::strerror(errno)));

    size_t header_size = 0;
    c->header_ = ContainerHeader::decode(prefix, &header_size);
    init_layout(c->header_, header_size, &c->data_start_, &c->chunk_bytes_, &c->grid_,
                &c->chunk_strides_);

    const uint64_t cells = c->chunk_count();
    std::vector<uint64_t> raw_index(cells);
    if (pread_full(c->fd_, raw_index.data(), 8 * cells, static_cast<off_t>(header_size)) !=
        static_cast<ssize_t>(8 * cells))
        throw Error(Errc::bad_magic, "truncated chunk index");
    c->index_ = std::make_unique<std::atomic<uint64_t>[]>(cells);
    for (uint64_t i = 0; i < cells; ++i)
        c->index_[i].store(raw_index[i], std::memory_order_relaxed);
    return c;
}

uint64_t Container::chunk_slot(std::span<const uint64_t> cell) const {
    uint64_t slot = 0;
    for (size_t d = 0; d < grid_.size(); ++d) slot = slot * grid_[d] + cell[d];
    return slot;
}

void Container::load_chunk(uint64_t slot, std::vector<uint8_t>& buf) const {
    buf.resize(chunk_bytes_);
    const uint64_t off = index_[slot].load(std::memory_order_acquire);
    if (off == 0) {
        std::fill(buf.begin(), buf.end(), 0);
        return;
    }
    ssize_t got = pread_full(fd_, buf.data(), chunk_bytes_, static_cast<off_t>(off));
    if (got < 0) throw Error(Errc::io_failure, "pread: " + std::string(std::strerror(errno)));
    if (static_cast<uint64_t>(got) < chunk_bytes_)
        std::fill(buf.begin() + got, buf.end(), 0);
}

void Container::store_chunk(uint64_t slot, const std::vector<uint8_t>& buf) {
    const uint64_t off = data_start_ + slot * chunk_bytes_;
    pwrite_full(fd_, buf.data(), chunk_bytes_, static_cast<off_t>(off));
    index_[slot].store(off, std::memory_order_release);
    uint64_t le = off;
    pwrite_full(fd_, &le, 8, static_cast<off_t>(data_start_ - 8 * chunk_count() + 8 * slot));
}

double Container::element_from_bytes(const uint8_t* p) const {
    switch (header_.descriptor.dtype) {
        case DType::U16: {
            uint16_t v;
            std::memcpy(&v, p, 2);
            return static_cast<double>(v);
        }
        case DType::F32: {
            float v;
            std::memcpy(&v, p, 4);
            return static_cast<double>(v);
        }
        case DType::F64: {
            double v;
            std::memcpy(&v, p, 8);
            return v;
        }
    }
    return 0.0;
}

void Container::element_to_bytes(double v, uint8_t* p) const {
    switch (header_.descriptor.dtype) {
        case DType::U16: {
            long long r = std::llround(v);
            uint16_t u = static_cast<uint16_t>(std::clamp<long long>(r, 0, 0xffff));
            std::memcpy(p, &u, 2);
            return;
        }
        case DType::F32: {
            float f = static_cast<float>(v);
            std::memcpy(p, &f, 4);
            return;
        }
        case DType::F64: {
            std::memcpy(p, &v, 8);
            return;
        }
    }
}

// Per-call geometry shared by the read and write paths.
struct Container::FrameGeometry {
    Pattern pattern;
    std::vector<uint64_t> pads;        // one per dim (zeros when unpadded)
    std::vector<uint64_t> window;      // block extents per dim
    std::vector<int> slice_pos;        // dim -> index into pattern.slice_dims, -1 for core
    uint64_t total_frames = 0;
};

Container::FrameGeometry Container::make_geometry(const Pattern& pattern,
                                                  std::span<const uint64_t> padding) const {
    const auto& shape = header_.descriptor.shape;
    validate_pattern(shape.size(), pattern);

    FrameGeometry g;
    g.pattern = pattern;
    g.pads.assign(shape.size(), 0);
    if (!padding.empty()) {
        if (padding.size() != shape.size())
            throw Error(Errc::shape_mismatch, "padding rank mismatch");
        g.pads.assign(padding.begin(), padding.end());
        for (size_t d = 0; d < shape.size(); ++d)
            if (g.pads[d] != 0 && pattern.is_core(d))
                throw Error(Errc::invalid_inputs, "padding on core dimension");
    }
    g.slice_pos.assign(shape.size(), -1);
    for (size_t k = 0; k < pattern.slice_dims.size(); ++k)
        g.slice_pos[pattern.slice_dims[k]] = static_cast<int>(k);
    g.window.resize(shape.size());
    for (size_t d = 0; d < shape.size(); ++d)
        g.window[d] = g.slice_pos[d] < 0 ? shape[d] : 1 + 2 * g.pads[d];
    g.total_frames = frame_count(shape, pattern);
    return g;
}

FrameBlock Container::read_frames(const std::string& pattern_name, uint64_t start, uint64_t count,
                                  std::span<const uint64_t> padding) const {
    return read_frames(header_.descriptor.pattern(pattern_name), start, count, padding);
}

FrameBlock Container::read_frames(const Pattern& pattern, uint64_t start, uint64_t count,
                                  std::span<const uint64_t> padding) const {
    FrameGeometry g = make_geometry(pattern, padding);
    if (count == 0) return FrameBlock::zeros(0, g.window);
    if (start >= g.total_frames)
        throw Error(Errc::ordinal_out_of_range,
                    "start ordinal " + std::to_string(start) + " >= " +
                        std::to_string(g.total_frames));
    count = std::min(count, g.total_frames - start);

    const auto& shape = header_.descriptor.shape;
    const size_t ndims = shape.size();
    const uint32_t esize = dtype_bytes(header_.descriptor.dtype);

    FrameBlock block = FrameBlock::zeros(count, g.window);
    const uint64_t frame_elems = block.frame_elems();

    // Per-call chunk staging. Chunks are read once per call no matter how
    // many elements they serve.
    std::unordered_map<uint64_t, std::vector<uint8_t>> cache;
    uint64_t last_slot = UINT64_MAX;
    const std::vector<uint8_t>* last_buf = nullptr;

    std::vector<uint64_t> widx(ndims, 0);   // odometer over the window
    std::vector<uint64_t> coords(ndims, 0); // dataset coords
    std::vector<uint64_t> cell(ndims, 0);

    for (uint64_t j = 0; j < count; ++j) {
        const auto fc = frame_coords(shape, pattern, start + j);
        std::fill(widx.begin(), widx.end(), 0);
        double* out = block.values.data() + j * frame_elems;
        for (uint64_t e = 0; e < frame_elems; ++e) {
            for (size_t d = 0; d < ndims; ++d) {
                if (g.slice_pos[d] < 0) {
                    coords[d] = widx[d];
                } else {
                    // Edge replication: clamp padded positions into range.
                    int64_t c = static_cast<int64_t>(fc[g.slice_pos[d]]) -
                                static_cast<int64_t>(g.pads[d]) + static_cast<int64_t>(widx[d]);
                    coords[d] = static_cast<uint64_t>(
                        std::clamp<int64_t>(c, 0, static_cast<int64_t>(shape[d]) - 1));
                }
                cell[d] = coords[d] / header_.chunk_shape[d];
            }
            const uint64_t slot = chunk_slot(cell);
            if (slot != last_slot) {
                auto [it, inserted] = cache.try_emplace(slot);
                if (inserted) load_chunk(slot, it->second);
                last_slot = slot;
                last_buf = &it->second;
            }
            uint64_t off = 0;
            for (size_t d = 0; d < ndims; ++d)
                off += (coords[d] % header_.chunk_shape[d]) * chunk_strides_[d];
            out[e] = element_from_bytes(last_buf->data() + off * esize);

            // advance the window odometer (innermost dimension fastest)
            for (size_t d = ndims; d-- > 0;) {
                if (++widx[d] < g.window[d]) break;
                widx[d] = 0;
            }
        }
    }
    chunks_read_.fetch_add(cache.size(), std::memory_order_relaxed);
    return block;
}

void Container::write_frames(const std::string& pattern_name, uint64_t start,
                             const FrameBlock& block) {
    write_frames(header_.descriptor.pattern(pattern_name), start, block);
}

void Container::write_frames(const Pattern& pattern, uint64_t start, const FrameBlock& block) {
    if (mode_ != OpenMode::ReadWrite)
        throw Error(Errc::io_failure, "container '" + path_.string() + "' is read-only");
    FrameGeometry g = make_geometry(pattern, {});
    if (block.frames == 0) return;
    if (start + block.frames > g.total_frames)
        throw Error(Errc::ordinal_out_of_range, "write past the last frame");
    if (block.window != g.window)
        throw Error(Errc::shape_mismatch, "block window does not match the frame window");
    if (block.values.size() != block.total_elems())
        throw Error(Errc::shape_mismatch, "block value count does not match its window");

    const auto& shape = header_.descriptor.shape;
    const auto& chunk = header_.chunk_shape;
    const size_t ndims = shape.size();
    const uint32_t esize = dtype_bytes(header_.descriptor.dtype);
    const uint64_t frame_elems = block.frame_elems();
    const auto wstrides = row_major_strides(g.window);

    std::vector<size_t> core_dims;
    for (size_t d = 0; d < ndims; ++d)
        if (g.slice_pos[d] < 0) core_dims.push_back(d);

    // Odometer over a per-dimension [lo, hi) box restricted to `dims`;
    // returns false when the box has been exhausted.
    auto advance = [](std::vector<uint64_t>& it, const std::vector<size_t>& dims,
                      const std::vector<uint64_t>& lo, const std::vector<uint64_t>& hi) {
        for (size_t k = dims.size(); k-- > 0;) {
            if (++it[dims[k]] < hi[dims[k]]) return true;
            it[dims[k]] = lo[dims[k]];
        }
        return false;
    };

    // Slice coordinates per frame, plus a linearized lookup set for the
    // full-cover test below.
    std::vector<std::vector<uint64_t>> fcs(block.frames);
    std::unordered_set<uint64_t> batch_tuples;
    for (uint64_t j = 0; j < block.frames; ++j) {
        fcs[j] = frame_coords(shape, pattern, start + j);
        uint64_t key = 0;
        for (size_t k = 0; k < fcs[j].size(); ++k)
            key = key * shape[pattern.slice_dims[k]] + fcs[j][k];
        batch_tuples.insert(key);
    }

    // Distinct chunk cells touched by the batch: full core coverage times
    // each frame's slice cell.
    std::vector<uint64_t> slots;
    {
        std::unordered_set<uint64_t> seen;
        std::vector<uint64_t> zero(ndims, 0);
        std::vector<uint64_t> cell(ndims, 0);
        for (uint64_t j = 0; j < block.frames; ++j) {
            std::fill(cell.begin(), cell.end(), 0);
            for (size_t d = 0; d < ndims; ++d)
                if (g.slice_pos[d] >= 0) cell[d] = fcs[j][g.slice_pos[d]] / chunk[d];
            do {
                const uint64_t slot = chunk_slot(cell);
                if (seen.insert(slot).second) slots.push_back(slot);
            } while (advance(cell, core_dims, zero, grid_));
        }
    }
    std::sort(slots.begin(), slots.end());

    uint64_t rmw_loads = 0;
    std::vector<uint8_t> buf;
    std::vector<uint64_t> cell(ndims, 0);
    std::vector<uint64_t> lo(ndims), hi(ndims), coords(ndims);
    for (uint64_t slot : slots) {
        // Decompose the slot back into grid cell coordinates, then into the
        // chunk's dataset-coordinate box clipped to the shape.
        uint64_t rest = slot;
        for (size_t d = ndims; d-- > 0;) {
            cell[d] = rest % grid_[d];
            rest /= grid_[d];
        }
        for (size_t d = 0; d < ndims; ++d) {
            lo[d] = cell[d] * chunk[d];
            hi[d] = std::min(shape[d], lo[d] + chunk[d]);
        }
        // Does the batch cover every in-shape element of this chunk? Then the
        // previous payload never shows through and the load can be skipped.
        bool covered = true;
        if (!pattern.slice_dims.empty()) {
            std::vector<uint64_t> t = lo;
            do {
                uint64_t key = 0;
                for (size_t k = 0; k < pattern.slice_dims.size(); ++k)
                    key = key * shape[pattern.slice_dims[k]] + t[pattern.slice_dims[k]];
                if (!batch_tuples.count(key)) {
                    covered = false;
                    break;
                }
            } while (advance(t, pattern.slice_dims, lo, hi));
        }

        std::lock_guard<std::mutex> guard(chunk_locks_[slot % chunk_locks_.size()]);
        const bool existing = index_[slot].load(std::memory_order_acquire) != 0;
        if (!covered && existing) {
            load_chunk(slot, buf);
            ++rmw_loads;
        } else {
            buf.assign(chunk_bytes_, 0);
        }

        for (uint64_t j = 0; j < block.frames; ++j) {
            bool in_box = true;
            for (size_t k = 0; k < pattern.slice_dims.size(); ++k) {
                size_t d = pattern.slice_dims[k];
                if (fcs[j][k] < lo[d] || fcs[j][k] >= hi[d]) {
                    in_box = false;
                    break;
                }
            }
            if (!in_box) continue;
            const double* src = block.values.data() + j * frame_elems;
            // Slice dims pinned to the frame, core dims swept over the box.
            for (size_t k = 0; k < pattern.slice_dims.size(); ++k)
                coords[pattern.slice_dims[k]] = fcs[j][k];
            for (size_t d : core_dims) coords[d] = lo[d];
            do {
                uint64_t off = 0, widx = 0;
                for (size_t d = 0; d < ndims; ++d) {
                    off += (coords[d] % chunk[d]) * chunk_strides_[d];
                    widx += (g.slice_pos[d] < 0 ? coords[d] : 0) * wstrides[d];
                }
                element_to_bytes(src[widx], buf.data() + off * esize);
            } while (advance(coords, core_dims, lo, hi));
        }
        store_chunk(slot, buf);
    }
    chunks_read_.fetch_add(rmw_loads, std::memory_order_relaxed);
    chunks_written_.fetch_add(slots.size(), std::memory_order_relaxed);
}

StorageStats Container::stats() const {
    return {chunks_read_.load(std::memory_order_relaxed),
            chunks_written_.load(std::memory_order_relaxed)};
}

std::vector<uint64_t> row_major_strides(const std::vector<uint64_t>& extents) {
    std::vector<uint64_t> strides(extents.size(), 1);
    for (size_t d = extents.size(); d-- > 1;) strides[d - 1] = strides[d] * extents[d];
    return strides;
}

}  // namespace oocpipe
