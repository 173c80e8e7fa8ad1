/* Copyright 2026 The freqattn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/autograd.hpp"
#include "freqattn/tensor.hpp"

namespace freqattn {

namespace binio {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename T>
void write_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("unexpected end of stream");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace binio

// Named parameters with gradient slots. Entries keep registration order so
// that iteration, optimizer state and checkpoints are deterministic.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Var node;
  };

  // Registers a new parameter. Duplicate names are rejected so two layers or
  // views can never alias the same tensor.
  Var add(const std::string& name, Tensor value) {
    if (name.empty()) throw std::invalid_argument("empty parameter name");
    if (index_.count(name)) {
      throw std::invalid_argument("duplicate parameter: " + name);
    }
    index_[name] = entries_.size();
    auto node = constant(std::move(value));
    node->grad_buffer();
    entries_.push_back({name, node});
    return node;
  }

  bool contains(const std::string& name) const { return index_.count(name); }

  const Var& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
      throw std::out_of_range("unknown parameter: " + name);
    }
    return entries_[it->second].node;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t num_scalars() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.node->value.size();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.node->grad_buffer().fill(0.0);
  }

  // Deep copy: fresh nodes with copied values and zeroed gradients.
  ParamStore clone() const {
    ParamStore out;
    for (const auto& e : entries_) out.add(e.name, e.node->value);
    return out;
  }

  // Checkpoint layout (little-endian): u64 count, then per entry
  // u32 name_len, name bytes, u32 rank, rank x u64 dims, f64 payload.
  void save(std::ostream& os) const {
    binio::write_le<std::uint64_t>(os, entries_.size());
    for (const auto& e : entries_) {
      binio::write_le<std::uint32_t>(os,
                                     static_cast<std::uint32_t>(e.name.size()));
      os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
      const auto& shape = e.node->value.shape();
      binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(shape.size()));
      for (auto d : shape) binio::write_le<std::uint64_t>(os, d);
      for (double v : e.node->value.data()) binio::write_le<double>(os, v);
    }
    if (!os) throw std::runtime_error("failed to write checkpoint");
  }

  static ParamStore load(std::istream& is) {
    ParamStore out;
    const auto count = binio::read_le<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto len = binio::read_le<std::uint32_t>(is);
      std::string name(len, '\0');
      if (!is.read(name.data(), len)) {
        throw std::runtime_error("truncated checkpoint name");
      }
      const auto rank = binio::read_le<std::uint32_t>(is);
      Shape shape(rank);
      for (auto& d : shape) d = binio::read_le<std::uint64_t>(is);
      Tensor t(shape);
      for (auto& v : t.data()) v = binio::read_le<double>(is);
      out.add(name, std::move(t));
    }
    return out;
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    save(os);
  }

  static ParamStore load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load(is);
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace freqattn
