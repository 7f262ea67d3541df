#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace penh {

// Checkpoint archive: named f64 tensors plus a JSON header. The header
// carries whatever the writer wants (config snapshot, step, rng state); the
// tensor directory inside it is maintained by write_checkpoint_file.
//
// Layout: 8-byte magic, u32 format version, u64 header length, header JSON,
// then each tensor's raw little-endian doubles in directory order.
struct CheckpointData {
  nlohmann::json header;
  std::vector<std::pair<std::string, std::vector<double>>> tensors;

  const std::vector<double>* find(const std::string& name) const;
};

void write_checkpoint_file(const CheckpointData& data, const std::string& path);

// FormatError on anything malformed or truncated; CheckpointVersionError
// when the file is a checkpoint from an unknown format version.
CheckpointData read_checkpoint_file(const std::string& path);

}  // namespace penh
