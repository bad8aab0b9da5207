#include "swarmlab/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "swarmlab/errors.hpp"

namespace swarmlab {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        const std::streamsize got = f.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!f) break;
    }
    return h;
}

std::string file_hash_hex(const std::string& path) {
    char out[17];
    std::snprintf(out, sizeof out, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    return out;
}

nlohmann::json manifest_entry(const std::string& path) {
    return {{"path", path}, {"fnv1a64", file_hash_hex(path)}};
}

void write_manifest(const std::string& path, const nlohmann::json& body) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << body.dump(2) << '\n';
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace swarmlab
