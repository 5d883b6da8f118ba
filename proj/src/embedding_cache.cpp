#include "ctxpress/embedding_cache.hpp"

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "ctxpress/hashing.hpp"

namespace ctxpress {
namespace {

constexpr char kMagic[4] = {'C', 'X', 'E', 'V'};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string encode_vector_file(const Embedding& vector) {
    std::string out(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(vector.size()));
    put_u64(out, 0);
    for (float f : vector) put_u32(out, std::bit_cast<std::uint32_t>(f));
    return out;
}

std::optional<Embedding> decode_vector_file(std::string_view bytes, std::size_t dimension) {
    if (bytes.size() < kHeaderSize || bytes.substr(0, 4) != std::string_view(kMagic, 4))
        return std::nullopt;
    const std::uint32_t d = get_u32(bytes, 4);
    if (d != dimension || bytes.size() != kHeaderSize + 4ull * d) return std::nullopt;
    Embedding v(d);
    for (std::uint32_t i = 0; i < d; ++i)
        v[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4ull * i));
    return v;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string EmbeddingCache::key(std::string_view fingerprint, std::size_t dimension,
                                std::string_view text) {
    std::string material(fingerprint);
    material += '\x1f';
    material += std::to_string(dimension);
    material += '\x1f';
    material += text;
    // Two independent 64-bit digests give a 128-bit content address.
    const std::uint64_t a = fnv1a64(material);
    const std::uint64_t b = splitmix64(fnv1a64(material, 0x84222325cbf29ce4ULL));
    return hex64(a) + hex64(b);
}

std::filesystem::path EmbeddingCache::path_for(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".vec");
}

std::optional<Embedding> EmbeddingCache::get(const std::string& key, std::size_t dimension) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_vector_file(buf.str(), dimension);
}

void EmbeddingCache::put(const std::string& key, const Embedding& vector) const {
    static std::atomic<std::uint64_t> counter{0};
    const auto target = path_for(key);
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    auto tmp = target;
    tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        const auto bytes = encode_vector_file(vector);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::filesystem::remove(tmp, ec);
            return;
        }
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace ctxpress
