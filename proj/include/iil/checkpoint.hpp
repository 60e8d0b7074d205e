#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "iil/errors.hpp"
#include "iil/tensor.hpp"

namespace iil {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts need byte swaps");

namespace detail {

inline constexpr char kParamMagic[9] = {'I', 'I', 'L', 'P', 'A', 'R', 'A', 'M', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, std::size_t& offset, const char* what) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw FormatError(std::string("truncated ") + what, offset);
    offset += sizeof(T);
    return v;
}

}  // namespace detail

// Checkpoint layout: magic "IILPARAM1", then per-tensor records of
// (u32 name length, name bytes, u32 rank, u64 extents, f64 payload), until EOF.
inline void save_checkpoint(const std::string& path,
                            const std::vector<NamedParam>& params) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for write: " + path);
    os.write(detail::kParamMagic, sizeof(detail::kParamMagic));
    for (const NamedParam& p : params) {
        detail::write_pod(os, static_cast<std::uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        detail::write_pod(os, static_cast<std::uint32_t>(p.tensor->shape.size()));
        for (std::size_t e : p.tensor->shape)
            detail::write_pod(os, static_cast<std::uint64_t>(e));
        os.write(reinterpret_cast<const char*>(p.tensor->values.data()),
                 static_cast<std::streamsize>(p.tensor->values.size() * sizeof(double)));
    }
    if (!os) throw IoError("write failed: " + path);
}

struct LoadedTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;
};

inline std::vector<LoadedTensor> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[sizeof(detail::kParamMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, detail::kParamMagic, sizeof(magic)) != 0)
        throw FormatError("bad checkpoint magic", 0);
    std::size_t offset = sizeof(magic);

    std::vector<LoadedTensor> out;
    while (true) {
        is.peek();
        if (is.eof()) break;
        LoadedTensor t;
        const auto name_len = detail::read_pod<std::uint32_t>(is, offset, "name length");
        t.name.resize(name_len);
        is.read(t.name.data(), name_len);
        if (!is) throw FormatError("truncated name", offset);
        offset += name_len;
        const auto rank = detail::read_pod<std::uint32_t>(is, offset, "rank");
        std::size_t count = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            const auto e = detail::read_pod<std::uint64_t>(is, offset, "extent");
            if (e == 0) throw FormatError("zero extent", offset - sizeof(std::uint64_t));
            t.shape.push_back(static_cast<std::size_t>(e));
            count *= static_cast<std::size_t>(e);
        }
        t.values.resize(count);
        is.read(reinterpret_cast<char*>(t.values.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!is) throw FormatError("truncated payload", offset);
        offset += count * sizeof(double);
        out.push_back(std::move(t));
    }
    return out;
}

// Restores values into an existing parameter list, matching by name.
inline void restore_params(const std::vector<LoadedTensor>& loaded,
                           const std::vector<NamedParam>& params) {
    for (const NamedParam& p : params) {
        bool found = false;
        for (const LoadedTensor& t : loaded) {
            if (t.name != p.name) continue;
            if (t.shape != p.tensor->shape)
                throw DimensionError("checkpoint tensor shape mismatch for " + p.name);
            p.tensor->values = t.values;
            p.tensor->zero_grad();
            found = true;
            break;
        }
        if (!found) throw FormatError("missing tensor " + p.name, 0);
    }
}

}  // namespace iil
