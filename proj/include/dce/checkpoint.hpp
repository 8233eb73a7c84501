#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "dce/tensor.hpp"

namespace dce {

// Binary checkpoint container: a JSON manifest followed by raw little-endian
// float64 tensor payloads.
//
//   bytes 0..7   magic "DCECKPT\0"
//   bytes 8..11  u32 little-endian manifest length
//   manifest     UTF-8 JSON; tensors listed as {name, shape, dtype, offset,
//                nbytes} with offsets relative to the payload section
//   payload      concatenated tensor data
//
// The manifest carries model kind, dims, a training-config echo and (for the
// customer model) context standardization statistics.
struct Checkpoint {
    nlohmann::json manifest;
    std::map<std::string, Tensor> tensors;
};

void save_checkpoint(const std::string& path, const nlohmann::json& manifest,
                     const std::vector<const Param*>& params);
Checkpoint load_checkpoint(const std::string& path);

// Copies tensor data from a loaded checkpoint into the model's parameter
// list; throws IoError if a tensor is missing or shaped differently.
void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params);

}  // namespace dce
