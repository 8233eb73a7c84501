#include "dce/checkpoint.hpp"

#include <cstring>

#include "dce/errors.hpp"
#include "dce/fs_util.hpp"

namespace dce {

namespace {

constexpr char kMagic[8] = {'D', 'C', 'E', 'C', 'K', 'P', 'T', '\0'};

void append_u32_le(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_f64_le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

double read_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const nlohmann::json& manifest,
                     const std::vector<const Param*>& params) {
    nlohmann::json mf = manifest;
    mf["container"] = "dce-checkpoint";
    mf["format_version"] = 1;

    nlohmann::json tensor_list = nlohmann::json::array();
    std::string payload;
    for (const Param* p : params) {
        nlohmann::json entry;
        entry["name"] = p->name;
        entry["shape"] = p->value.shape;
        entry["dtype"] = "f64";
        entry["offset"] = payload.size();
        entry["nbytes"] = p->value.size() * 8;
        tensor_list.push_back(entry);
        for (double v : p->value.data) append_f64_le(payload, v);
    }
    mf["tensors"] = tensor_list;

    const std::string mf_str = mf.dump();
    std::string blob;
    blob.reserve(12 + mf_str.size() + payload.size());
    blob.append(kMagic, 8);
    append_u32_le(blob, static_cast<std::uint32_t>(mf_str.size()));
    blob += mf_str;
    blob += payload;
    atomic_write_file(path, blob);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string blob = read_file(path);
    if (blob.size() < 12 || std::memcmp(blob.data(), kMagic, 8) != 0)
        throw IoError("not a checkpoint file: " + path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    const std::uint32_t mf_len = read_u32_le(bytes + 8);
    if (blob.size() < 12 + static_cast<std::size_t>(mf_len))
        throw IoError("truncated checkpoint manifest: " + path);

    Checkpoint ckpt;
    try {
        ckpt.manifest = nlohmann::json::parse(blob.substr(12, mf_len));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad checkpoint manifest in " + path + ": " + e.what());
    }

    const std::size_t payload_start = 12 + mf_len;
    for (const auto& entry : ckpt.manifest.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        const std::size_t offset = entry.at("offset").get<std::size_t>();
        const std::size_t nbytes = entry.at("nbytes").get<std::size_t>();
        if (entry.at("dtype").get<std::string>() != "f64")
            throw IoError("unsupported tensor dtype in " + path);
        if (nbytes != shape_numel(shape) * 8)
            throw IoError("tensor byte count does not match shape in " + path);
        if (payload_start + offset + nbytes > blob.size())
            throw IoError("truncated tensor payload in " + path);
        if (ckpt.tensors.count(name)) throw IoError("duplicate tensor " + name + " in " + path);

        Tensor t(shape);
        const unsigned char* src = bytes + payload_start + offset;
        for (std::size_t j = 0; j < t.size(); ++j) t.data[j] = read_f64_le(src + 8 * j);
        ckpt.tensors.emplace(name, std::move(t));
    }
    return ckpt;
}

void restore_params(const Checkpoint& ckpt, const std::vector<Param*>& params) {
    for (Param* p : params) {
        auto it = ckpt.tensors.find(p->name);
        if (it == ckpt.tensors.end()) throw IoError("checkpoint missing tensor: " + p->name);
        if (it->second.shape != p->value.shape)
            throw IoError("checkpoint tensor " + p->name + " has shape " +
                          shape_to_string(it->second.shape) + ", expected " +
                          shape_to_string(p->value.shape));
        p->value = it->second;
        p->zero_grad();
    }
}

}  // namespace dce
