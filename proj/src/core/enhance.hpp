#pragma once

#include <memory>
#include <string>

#include "core/generator.hpp"
#include "core/image.hpp"

namespace penh {

// Inference wrapper around a generator restored from a training checkpoint.
// Only the g/ tensors are read; discriminator and optimizer state stay in the
// file. Inputs of any size are handled by reflect-padding to the generator's
// divisor and cropping the output back.
class Enhancer {
 public:
  explicit Enhancer(const std::string& checkpoint_path);

  ImageTensor enhance(const ImageTensor& input) const;

  // input_path may be a single image or a directory; outputs keep their
  // filenames under out_dir. Returns the number of images written.
  int enhance_path(const std::string& input_path, const std::string& out_dir) const;

  const Generator& generator() const { return *gen_; }

 private:
  std::unique_ptr<Generator> gen_;
};

}  // namespace penh
