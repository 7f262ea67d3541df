#include "core/enhance.hpp"

#include <algorithm>
#include <filesystem>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/convert.hpp"
#include "core/error.hpp"

namespace fs = std::filesystem;

namespace penh {

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

Enhancer::Enhancer(const std::string& checkpoint_path) {
  CheckpointData data = read_checkpoint_file(checkpoint_path);
  GeneratorConfig gcfg;
  try {
    if (data.header.at("kind").get<std::string>() != "train-state")
      fail(ErrorCode::FormatError,
           "'" + checkpoint_path + "' is not a training checkpoint");
    const nlohmann::json& cfg = data.header.at("config");
    gcfg.schedule = cfg.at("schedule").get<std::vector<int>>();
    gcfg.use_residual_blocks = cfg.at("variant").at("use_residual_blocks").get<bool>();
    gcfg.use_gates = cfg.at("variant").at("use_gates").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError,
         "checkpoint '" + checkpoint_path + "' header is incomplete: " + e.what());
  }
  gen_ = std::make_unique<Generator>(gcfg, 0);
  for (Parameter* p : gen_->parameters()) {
    const std::vector<double>* t = data.find(p->name);
    if (!t || t->size() != p->value.size())
      fail(ErrorCode::FormatError, "checkpoint '" + checkpoint_path + "' " +
                                       (t ? "size mismatch on" : "missing tensor") + " '" +
                                       p->name + "'");
    p->value = *t;
  }
}

ImageTensor Enhancer::enhance(const ImageTensor& input) const {
  validate_image(input, "enhance input");
  int d = gen_->divisor();
  int ph = (input.height + d - 1) / d * d;
  int pw = (input.width + d - 1) / d * d;
  ImageTensor padded = pad_reflect(input, ph, pw);
  Tensor x = batch_to_tensor({padded});
  Tensor y = gen_->forward(x, nullptr);
  ImageTensor out = tensor_to_image(y, 0);
  return crop(out, input.height, input.width);
}

int Enhancer::enhance_path(const std::string& input_path, const std::string& out_dir) const {
  fs::path in(input_path);
  std::error_code ec;
  if (!fs::exists(in, ec)) fail(ErrorCode::NotFound, "no such input '" + input_path + "'");

  std::vector<fs::path> inputs;
  if (fs::is_directory(in, ec)) {
    for (const auto& entry : fs::directory_iterator(in))
      if (entry.is_regular_file() && is_image_file(entry.path())) inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) fail(ErrorCode::EmptyCorpus, "no images under '" + input_path + "'");
  } else {
    inputs.push_back(in);
  }

  fs::create_directories(out_dir);
  for (const fs::path& p : inputs) {
    ImageTensor img = load_image(p.string());
    save_image(enhance(img), (fs::path(out_dir) / p.filename()).string());
  }
  return static_cast<int>(inputs.size());
}

}  // namespace penh
