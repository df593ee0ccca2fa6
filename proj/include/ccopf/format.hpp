#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace ccopf::format {

// Shortest decimal representation that round-trips to the same double.
std::string shortest(double v);

// FNV-1a content digest, hex encoded.  Used for manifest provenance only.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::string digest_hex(const std::string& content);
std::string file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ccopf::format
