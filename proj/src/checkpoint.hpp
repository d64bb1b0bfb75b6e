#pragma once

#include <string>
#include <vector>

#include "tensor.hpp"

namespace cipherlab {

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<float> data;
};

// Checkpoint container: magic "CGN1", then a little-endian u32 tensor count;
// per tensor a u32 name length, the UTF-8 name, u32 rank, u32 extents and the
// raw 32-bit little-endian float payload.
void write_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::string& path);

} // namespace cipherlab
