#include "checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cipherlab {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'N', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("checkpoint truncated: " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in, const std::string& path) {
    const std::uint32_t bits = get_u32(in, path);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

} // namespace

void write_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        if (t.data.size() != shape_numel(t.shape))
            throw std::invalid_argument("checkpoint tensor '" + t.name + "' shape/data mismatch");
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (std::size_t e : t.shape) put_u32(out, static_cast<std::uint32_t>(e));
        for (float v : t.data) put_f32(out, v);
    }
    if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

std::vector<NamedTensor> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a CGN1 checkpoint: " + path);
    const std::uint32_t count = get_u32(in, path);
    std::vector<NamedTensor> tensors;
    tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedTensor t;
        const std::uint32_t name_len = get_u32(in, path);
        t.name.resize(name_len);
        if (!in.read(t.name.data(), name_len))
            throw std::runtime_error("checkpoint truncated: " + path);
        const std::uint32_t rank = get_u32(in, path);
        t.shape.resize(rank);
        for (auto& e : t.shape) e = get_u32(in, path);
        t.data.resize(shape_numel(t.shape));
        for (auto& v : t.data) v = get_f32(in, path);
        tensors.push_back(std::move(t));
    }
    return tensors;
}

} // namespace cipherlab
