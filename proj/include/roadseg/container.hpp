#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roadseg/core.hpp"

namespace roadseg {

/// Self-describing binary tensor container.
///
/// Layout, all integers little-endian:
///   bytes 0..3   magic "RSPC"
///   bytes 4..5   version (uint16), currently 1
///   bytes 6..9   header_len (uint32)
///   ...          header: UTF-8 JSON array, one object per tensor with
///                fields name, dtype ("f32"|"u8"), shape, offset
///   ...          payload: concatenated row-major tensors; offset is the
///                byte position relative to the start of the payload
struct ContainerEntry {
    std::string name;
    std::string dtype;  // "f32" or "u8"
    std::vector<int64_t> shape;
    std::vector<uint8_t> bytes;  // raw little-endian payload

    int64_t numel() const {
        int64_t n = 1;
        for (int64_t d : shape) n *= d;
        return n;
    }
};

ContainerEntry make_entry(const std::string& name, const Tensor& t);
ContainerEntry make_entry(const std::string& name, const ByteTensor& t);
ContainerEntry make_json_entry(const std::string& name, const std::string& json_text);

Tensor entry_to_tensor(const ContainerEntry& e);
ByteTensor entry_to_bytes(const ContainerEntry& e);
std::string entry_to_json_text(const ContainerEntry& e);

/// Writes entries to `path`. Throws std::invalid_argument on duplicate names.
void write_container(const std::string& path, const std::vector<ContainerEntry>& entries);

/// Reads a container; every structural violation throws DataError with a
/// message naming the failing check (magic, version, header, truncation...).
std::vector<ContainerEntry> read_container(const std::string& path);

/// Name-indexed view over read entries.
class ContainerIndex {
  public:
    explicit ContainerIndex(std::vector<ContainerEntry> entries);
    bool has(const std::string& name) const { return by_name_.count(name) > 0; }
    const ContainerEntry& get(const std::string& name) const;
    Tensor tensor(const std::string& name) const { return entry_to_tensor(get(name)); }
    ByteTensor bytes(const std::string& name) const { return entry_to_bytes(get(name)); }
    std::string json_text(const std::string& name) const { return entry_to_json_text(get(name)); }
    const std::vector<ContainerEntry>& entries() const { return entries_; }

  private:
    std::vector<ContainerEntry> entries_;
    std::map<std::string, size_t> by_name_;
};

inline ContainerIndex read_container_index(const std::string& path) {
    return ContainerIndex(read_container(path));
}

}  // namespace roadseg
