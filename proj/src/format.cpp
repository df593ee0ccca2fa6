#include "ccopf/format.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ccopf::format {

std::string shortest(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), ptr);
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& content) {
  std::uint64_t h = fnv1a(content.data(), content.size());
  std::array<char, 17> buf{};
  static const char* hexdigits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hexdigits[h & 0xF];
    h >>= 4;
  }
  return std::string(buf.data(), 16);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string file_digest(const std::filesystem::path& path) {
  return digest_hex(read_file(path));
}

}  // namespace ccopf::format
