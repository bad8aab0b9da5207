#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace swarmlab {

/// FNV-1a 64-bit content hash; cheap, stable across platforms, good enough
/// for change detection in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);

std::uint64_t fnv1a64_file(const std::string& path);  // throws DataError

/// 16-hex-digit rendering of the file hash.
std::string file_hash_hex(const std::string& path);

/// {"path": ..., "fnv1a64": "<hex>"} for one existing file.
nlohmann::json manifest_entry(const std::string& path);

/// Pretty-printed JSON with a trailing newline; keys sort alphabetically, so
/// rewriting the same body gives identical bytes.
void write_manifest(const std::string& path, const nlohmann::json& body);

}  // namespace swarmlab
