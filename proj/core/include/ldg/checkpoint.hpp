#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ldg/tensor.hpp"

namespace ldg {

/// Named collection of trainable leaf tensors. Iteration order is the
/// registration order, which keeps optimizer sweeps and checkpoints
/// deterministic.
class ParamStore {
 public:
  Tensor add(const std::string& name, Shape shape, std::vector<double> init);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool has(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return entries_;
  }
  std::vector<std::pair<std::string, Tensor>>& entries_mut() { return entries_; }
  size_t size() const { return entries_.size(); }

  void zero_all_grads();

  /// Binary checkpoint, versioned; values round-trip bit-exactly.
  void save(const std::string& path) const;
  /// Loads values into the already-registered tensors; names and shapes
  /// must match exactly.
  void load(const std::string& path);

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

}  // namespace ldg
