#ifndef BOAC_FEEL_DATA_HPP
#define BOAC_FEEL_DATA_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "boac/feel/model.hpp"
#include "boac/random.hpp"

namespace boac
{

struct LocalDataset
{
    int device = 0;
    Dataset data;
    /// Row indices into the dataset the partition was cut from.
    std::vector<Index> indices;

    Index size() const noexcept { return data.size(); }
};

struct BlobOptions
{
    Index dims = 64;
    int classes = 10;
    Index per_class = 100;
    /// Class centers are N(0, center_scale^2 I); examples add N(0, noise^2 I).
    double center_scale = 0.5;
    double noise = 1.0;
};

/// Gaussian blobs. Centers depend only on `center_seed`, so a train and a
/// test set drawn with different sample seeds share the same classes.
inline Dataset make_blobs(const BlobOptions& opt, std::uint64_t center_seed,
                          std::uint64_t sample_seed)
{
    if (opt.dims < 1 || opt.classes < 2 || opt.per_class < 1) {
        throw DomainError("make_blobs: invalid shape");
    }
    Rng crng(center_seed);
    RMatrix centers(opt.classes, opt.dims);
    for (Index c = 0; c < opt.classes; ++c) {
        for (Index j = 0; j < opt.dims; ++j) {
            centers(c, j) = opt.center_scale * crng.normal();
        }
    }
    Rng rng(sample_seed);
    Dataset d;
    d.classes = opt.classes;
    const Index n = opt.classes * opt.per_class;
    d.features.resize(n, opt.dims);
    d.labels.resize(static_cast<std::size_t>(n));
    // Interleave classes so any prefix is roughly balanced.
    for (Index i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % opt.classes);
        d.labels[static_cast<std::size_t>(i)] = c;
        for (Index j = 0; j < opt.dims; ++j) {
            d.features(i, j) = centers(c, j) + opt.noise * rng.normal();
        }
    }
    return d;
}

/// Uniformly shuffled split into K parts whose sizes differ by at most one.
inline std::vector<LocalDataset> partition_iid(const Dataset& data, int k, std::uint64_t seed)
{
    if (k < 1 || data.size() < k) {
        throw DomainError("partition_iid: need 1 <= K <= dataset size");
    }
    std::vector<Index> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<LocalDataset> parts(static_cast<std::size_t>(k));
    const Index n = data.size();
    for (int d = 0; d < k; ++d) {
        const Index lo = n * d / k;
        const Index hi = n * (d + 1) / k;
        auto& p = parts[static_cast<std::size_t>(d)];
        p.device = d;
        p.indices.assign(order.begin() + lo, order.begin() + hi);
        std::sort(p.indices.begin(), p.indices.end());
        p.data = data.subset(p.indices);
    }
    return parts;
}

/// Label-sorted shards, `shards_per_device` random shards per device.
inline std::vector<LocalDataset> partition_label_skew(const Dataset& data, int k,
                                                      int shards_per_device, std::uint64_t seed)
{
    const Index shards = static_cast<Index>(k) * shards_per_device;
    if (k < 1 || shards_per_device < 1 || data.size() < shards) {
        throw DomainError("partition_label_skew: not enough examples for the shards");
    }
    std::vector<Index> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return data.labels[static_cast<std::size_t>(a)] < data.labels[static_cast<std::size_t>(b)];
    });
    std::vector<Index> shard_ids(static_cast<std::size_t>(shards));
    std::iota(shard_ids.begin(), shard_ids.end(), Index{0});
    Rng rng(seed);
    std::shuffle(shard_ids.begin(), shard_ids.end(), rng.engine());
    const Index n = data.size();
    std::vector<LocalDataset> parts(static_cast<std::size_t>(k));
    for (int d = 0; d < k; ++d) {
        auto& p = parts[static_cast<std::size_t>(d)];
        p.device = d;
        for (int s = 0; s < shards_per_device; ++s) {
            const Index id = shard_ids[static_cast<std::size_t>(d * shards_per_device + s)];
            for (Index r = n * id / shards; r < n * (id + 1) / shards; ++r) {
                p.indices.push_back(order[static_cast<std::size_t>(r)]);
            }
        }
        std::sort(p.indices.begin(), p.indices.end());
        p.data = data.subset(p.indices);
    }
    return parts;
}

/// Throws unless the parts are non-empty, pairwise disjoint and cover
/// [0, total) exactly.
inline void check_partition(const std::vector<LocalDataset>& parts, Index total)
{
    std::vector<char> seen(static_cast<std::size_t>(total), 0);
    Index count = 0;
    for (const auto& p : parts) {
        if (p.size() == 0) {
            throw DomainError("partition: device " + std::to_string(p.device) + " has no data");
        }
        p.data.validate();
        for (Index i : p.indices) {
            if (i < 0 || i >= total || seen[static_cast<std::size_t>(i)]) {
                throw DomainError("partition: example " + std::to_string(i) +
                                  " is out of range or assigned twice");
            }
            seen[static_cast<std::size_t>(i)] = 1;
            ++count;
        }
    }
    if (count != total) {
        throw DomainError("partition: examples left unassigned");
    }
}

// IDX files (MNIST layout): big-endian magic, dimension sizes, then bytes.

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

namespace detail
{

inline std::uint32_t read_be32(std::istream& in, const std::string& path)
{
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
        throw DomainError("idx: truncated header in " + path);
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

inline std::vector<unsigned char> read_idx(const std::string& path, std::uint32_t magic,
                                           std::vector<std::uint32_t>& dims)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DomainError("idx: cannot open " + path);
    }
    const std::uint32_t got = read_be32(in, path);
    if (got != magic) {
        throw DomainError("idx: bad magic in " + path);
    }
    const std::uint32_t ndims = magic & 0xff;
    dims.clear();
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < ndims; ++i) {
        dims.push_back(read_be32(in, path));
        total *= dims.back();
    }
    std::vector<unsigned char> bytes(total);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(total))) {
        throw DomainError("idx: truncated payload in " + path);
    }
    return bytes;
}

} // namespace detail

struct IdxOptions
{
    /// Average-pool factor; images are zero-padded symmetrically to a
    /// multiple of it first (28x28 with pool 4 becomes 32x32 then 8x8).
    int pool = 1;
    /// Keep only the first `limit` examples when positive.
    Index limit = 0;
};

/// Images scaled to [0, 1], one flattened row-major image per row.
inline Dataset load_idx(const std::string& image_path, const std::string& label_path,
                        const IdxOptions& opt = {})
{
    if (opt.pool < 1) {
        throw DomainError("load_idx: pool factor must be positive");
    }
    std::vector<std::uint32_t> idims;
    std::vector<std::uint32_t> ldims;
    const auto pixels = detail::read_idx(image_path, kIdxImageMagic, idims);
    const auto labels = detail::read_idx(label_path, kIdxLabelMagic, ldims);
    if (idims[0] != ldims[0]) {
        throw DomainError("load_idx: image and label counts differ");
    }
    Index n = static_cast<Index>(idims[0]);
    if (opt.limit > 0) {
        n = std::min(n, opt.limit);
    }
    const Index rows = idims[1];
    const Index cols = idims[2];
    const Index p = opt.pool;
    const Index prows = (rows + p - 1) / p * p;
    const Index pcols = (cols + p - 1) / p * p;
    const Index r0 = (prows - rows) / 2;
    const Index c0 = (pcols - cols) / 2;
    const Index orows = prows / p;
    const Index ocols = pcols / p;

    Dataset d;
    d.classes = 10;
    d.features = RMatrix::Zero(n, orows * ocols);
    d.labels.resize(static_cast<std::size_t>(n));
    const double scale = 1.0 / (255.0 * static_cast<double>(p * p));
    for (Index i = 0; i < n; ++i) {
        const unsigned char* img = pixels.data() + i * rows * cols;
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) {
                const Index o = ((r + r0) / p) * ocols + (c + c0) / p;
                d.features(i, o) += scale * img[r * cols + c];
            }
        }
        const int y = labels[static_cast<std::size_t>(i)];
        d.labels[static_cast<std::size_t>(i)] = y;
        d.classes = std::max(d.classes, y + 1);
    }
    d.validate();
    return d;
}

} // namespace boac

#endif
