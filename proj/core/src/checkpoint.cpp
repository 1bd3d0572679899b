#include "ldg/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "ldg/errors.hpp"

namespace ldg {

namespace {

constexpr char kMagic[8] = {'L', 'D', 'G', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError(path + ": truncated checkpoint");
  return v;
}

}  // namespace

Tensor ParamStore::add(const std::string& name, Shape shape,
                       std::vector<double> init) {
  require(!has(name), "ParamStore: duplicate parameter " + name);
  Tensor t = Tensor::leaf(std::move(shape), std::move(init));
  entries_.emplace_back(name, t);
  return t;
}

Tensor& ParamStore::at(const std::string& name) {
  for (auto& [n, t] : entries_)
    if (n == name) return t;
  throw ContractError("ParamStore: unknown parameter " + name);
}

const Tensor& ParamStore::at(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return t;
  throw ContractError("ParamStore: unknown parameter " + name);
}

bool ParamStore::has(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return true;
  return false;
}

void ParamStore::zero_all_grads() {
  for (auto& [n, t] : entries_) t.zero_grad();
}

void ParamStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<uint32_t>(entries_.size()));
  for (const auto& [name, t] : entries_) {
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(t.shape().size()));
    for (int d : t.shape()) write_u32(out, static_cast<uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.values().size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed for " + path);
}

void ParamStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw IoError(path + ": not a checkpoint file (bad magic)");
  const uint32_t count = read_u32(in, path);
  if (count != entries_.size())
    throw ConfigError(path + ": checkpoint has " + std::to_string(count) +
                      " parameters, model expects " +
                      std::to_string(entries_.size()));
  for (auto& [name, t] : entries_) {
    const uint32_t name_len = read_u32(in, path);
    std::string file_name(name_len, '\0');
    in.read(file_name.data(), name_len);
    if (file_name != name)
      throw ConfigError(path + ": parameter order mismatch, expected '" + name +
                        "', found '" + file_name + "'");
    const uint32_t ndim = read_u32(in, path);
    Shape shape(ndim);
    for (uint32_t i = 0; i < ndim; ++i)
      shape[i] = static_cast<int>(read_u32(in, path));
    if (shape != t.shape())
      throw ConfigError(path + ": shape mismatch for parameter '" + name + "'");
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.values().size() * sizeof(double)));
    if (!in) throw IoError(path + ": truncated checkpoint");
  }
}

}  // namespace ldg
