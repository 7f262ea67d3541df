#include "core/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>

#include "core/error.hpp"

namespace penh {

namespace {

constexpr char kMagic[8] = {'P', 'E', 'N', 'H', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

const std::vector<double>* CheckpointData::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void write_checkpoint_file(const CheckpointData& data, const std::string& path) {
  nlohmann::json header = data.header;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& [name, t] : data.tensors)
    dir.push_back({{"name", name}, {"size", t.size()}});
  header["tensors"] = std::move(dir);
  std::string text = header.dump();

  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(ErrorCode::IoError, "cannot write checkpoint: " + path);
  uint32_t version = kVersion;
  uint64_t len = text.size();
  bool ok = std::fwrite(kMagic, 1, 8, f.get()) == 8 &&
            std::fwrite(&version, sizeof(version), 1, f.get()) == 1 &&
            std::fwrite(&len, sizeof(len), 1, f.get()) == 1 &&
            std::fwrite(text.data(), 1, text.size(), f.get()) == text.size();
  for (const auto& [name, t] : data.tensors)
    ok = ok && std::fwrite(t.data(), sizeof(double), t.size(), f.get()) == t.size();
  if (!ok || std::fflush(f.get()) != 0)
    fail(ErrorCode::IoError, "short write on checkpoint: " + path);
}

CheckpointData read_checkpoint_file(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) fail(ErrorCode::NotFound, "checkpoint not found: " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kMagic, 8) != 0)
    fail(ErrorCode::FormatError, "'" + path + "' is not a checkpoint archive");
  uint32_t version = 0;
  uint64_t len = 0;
  if (std::fread(&version, sizeof(version), 1, f.get()) != 1)
    fail(ErrorCode::FormatError, "checkpoint truncated: " + path);
  if (version != kVersion)
    fail(ErrorCode::CheckpointVersionError,
         "checkpoint '" + path + "' has format version " + std::to_string(version) +
             "; this build reads version " + std::to_string(kVersion));
  if (std::fread(&len, sizeof(len), 1, f.get()) != 1)
    fail(ErrorCode::FormatError, "checkpoint truncated: " + path);

  std::string text(len, '\0');
  if (len > 0 && std::fread(text.data(), 1, len, f.get()) != len)
    fail(ErrorCode::FormatError, "checkpoint header truncated: " + path);
  CheckpointData data;
  try {
    data.header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, "bad checkpoint header in '" + path + "': " + e.what());
  }
  if (!data.header.contains("tensors") || !data.header["tensors"].is_array())
    fail(ErrorCode::FormatError, "checkpoint header lacks a tensor directory: " + path);

  for (const auto& entry : data.header["tensors"]) {
    std::string name;
    uint64_t size = 0;
    try {
      name = entry.at("name").get<std::string>();
      size = entry.at("size").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::FormatError, "bad tensor directory entry in '" + path + "': " + e.what());
    }
    std::vector<double> t(size);
    if (std::fread(t.data(), sizeof(double), size, f.get()) != size)
      fail(ErrorCode::FormatError, "checkpoint tensor '" + name + "' truncated: " + path);
    data.tensors.emplace_back(std::move(name), std::move(t));
  }
  // a stray byte after the last tensor means the directory lied
  if (std::fgetc(f.get()) != EOF)
    fail(ErrorCode::FormatError, "trailing bytes after checkpoint payload: " + path);
  return data;
}

}  // namespace penh
