#include "roadseg/container.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include <json.hpp>

namespace roadseg {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'R', 'S', 'P', 'C'};
constexpr uint16_t kVersion = 1;

size_t element_size(const std::string& dtype) {
    if (dtype == "f32") return 4;
    if (dtype == "u8") return 1;
    throw DataError("container: unknown dtype '" + dtype + "'");
}

void put_u16(std::vector<uint8_t>& out, uint16_t x) {
    out.push_back(static_cast<uint8_t>(x & 0xff));
    out.push_back(static_cast<uint8_t>((x >> 8) & 0xff));
}

void put_u32(std::vector<uint8_t>& out, uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((x >> (8 * i)) & 0xff));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

ContainerEntry make_entry(const std::string& name, const Tensor& t) {
    ContainerEntry e;
    e.name = name;
    e.dtype = "f32";
    e.shape = t.shape;
    e.bytes.resize(t.v.size() * sizeof(float));
    static_assert(sizeof(float) == 4);
    std::memcpy(e.bytes.data(), t.v.data(), e.bytes.size());
    return e;
}

ContainerEntry make_entry(const std::string& name, const ByteTensor& t) {
    ContainerEntry e;
    e.name = name;
    e.dtype = "u8";
    e.shape = t.shape;
    e.bytes.assign(t.v.begin(), t.v.end());
    return e;
}

ContainerEntry make_json_entry(const std::string& name, const std::string& json_text) {
    ContainerEntry e;
    e.name = name;
    e.dtype = "u8";
    e.shape = {static_cast<int64_t>(json_text.size())};
    e.bytes.assign(json_text.begin(), json_text.end());
    return e;
}

Tensor entry_to_tensor(const ContainerEntry& e) {
    if (e.dtype != "f32")
        throw DataError("container: tensor '" + e.name + "' is " + e.dtype + ", expected f32");
    Tensor t(e.shape);
    std::memcpy(t.v.data(), e.bytes.data(), e.bytes.size());
    return t;
}

ByteTensor entry_to_bytes(const ContainerEntry& e) {
    if (e.dtype != "u8")
        throw DataError("container: tensor '" + e.name + "' is " + e.dtype + ", expected u8");
    ByteTensor t(e.shape);
    std::memcpy(t.v.data(), e.bytes.data(), e.bytes.size());
    return t;
}

std::string entry_to_json_text(const ContainerEntry& e) {
    return std::string(e.bytes.begin(), e.bytes.end());
}

void write_container(const std::string& path, const std::vector<ContainerEntry>& entries) {
    json header = json::array();
    int64_t offset = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        const ContainerEntry& e = entries[i];
        const size_t expected = static_cast<size_t>(e.numel()) * element_size(e.dtype);
        if (expected != e.bytes.size())
            throw std::invalid_argument("container: entry '" + e.name +
                                        "' payload size does not match shape");
        for (size_t j = 0; j < i; ++j)
            if (entries[j].name == e.name)
                throw std::invalid_argument("container: duplicate tensor name '" + e.name + "'");
        header.push_back({{"name", e.name},
                          {"dtype", e.dtype},
                          {"shape", e.shape},
                          {"offset", offset}});
        offset += static_cast<int64_t>(e.bytes.size());
    }
    const std::string header_text = header.dump();

    std::vector<uint8_t> head;
    head.insert(head.end(), kMagic, kMagic + 4);
    put_u16(head, kVersion);
    put_u32(head, static_cast<uint32_t>(header_text.size()));
    head.insert(head.end(), header_text.begin(), header_text.end());

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("container: cannot open '" + path + "' for writing");
    if (std::fwrite(head.data(), 1, head.size(), f.get()) != head.size())
        throw std::runtime_error("container: short write to '" + path + "'");
    for (const ContainerEntry& e : entries) {
        if (!e.bytes.empty() &&
            std::fwrite(e.bytes.data(), 1, e.bytes.size(), f.get()) != e.bytes.size())
            throw std::runtime_error("container: short write to '" + path + "'");
    }
}

std::vector<ContainerEntry> read_container(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw DataError("container: cannot open '" + path + "'");
    std::fseek(f.get(), 0, SEEK_END);
    const long file_len = std::ftell(f.get());
    std::fseek(f.get(), 0, SEEK_SET);
    std::vector<uint8_t> buf(static_cast<size_t>(file_len));
    if (file_len > 0 && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
        throw DataError("container: short read from '" + path + "'");

    if (buf.size() < 10) throw DataError("container: truncated header in '" + path + "'");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw DataError("container: bad magic in '" + path + "'");
    const uint16_t version = static_cast<uint16_t>(buf[4] | (buf[5] << 8));
    if (version != kVersion)
        throw DataError("container: unsupported version " + std::to_string(version) + " in '" +
                        path + "'");
    const uint32_t header_len = static_cast<uint32_t>(buf[6]) | (static_cast<uint32_t>(buf[7]) << 8) |
                                (static_cast<uint32_t>(buf[8]) << 16) |
                                (static_cast<uint32_t>(buf[9]) << 24);
    if (10 + static_cast<size_t>(header_len) > buf.size())
        throw DataError("container: truncated header in '" + path + "'");

    json header;
    try {
        header = json::parse(buf.begin() + 10, buf.begin() + 10 + header_len);
    } catch (const json::exception& ex) {
        throw DataError("container: invalid header JSON in '" + path + "': " + ex.what());
    }
    if (!header.is_array()) throw DataError("container: header is not a JSON array in '" + path + "'");

    const uint8_t* payload = buf.data() + 10 + header_len;
    const int64_t payload_len = static_cast<int64_t>(buf.size()) - 10 - header_len;

    std::vector<ContainerEntry> entries;
    std::map<std::string, bool> seen;
    for (const json& item : header) {
        ContainerEntry e;
        try {
            e.name = item.at("name").get<std::string>();
            e.dtype = item.at("dtype").get<std::string>();
            e.shape = item.at("shape").get<std::vector<int64_t>>();
        } catch (const json::exception& ex) {
            throw DataError("container: malformed tensor record in '" + path + "': " + ex.what());
        }
        const int64_t offset = item.value("offset", int64_t{-1});
        if (seen.count(e.name))
            throw DataError("container: duplicate tensor name '" + e.name + "' in '" + path + "'");
        seen[e.name] = true;
        for (int64_t d : e.shape)
            if (d < 0) throw DataError("container: negative dimension for '" + e.name + "'");
        const int64_t size = e.numel() * static_cast<int64_t>(element_size(e.dtype));
        if (offset < 0 || offset + size > payload_len)
            throw DataError("container: truncated payload for tensor '" + e.name + "' in '" +
                            path + "'");
        e.bytes.assign(payload + offset, payload + offset + size);
        entries.push_back(std::move(e));
    }
    return entries;
}

ContainerIndex::ContainerIndex(std::vector<ContainerEntry> entries)
    : entries_(std::move(entries)) {
    for (size_t i = 0; i < entries_.size(); ++i) by_name_[entries_[i].name] = i;
}

const ContainerEntry& ContainerIndex::get(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw DataError("container: missing tensor '" + name + "'");
    return entries_[it->second];
}

}  // namespace roadseg
