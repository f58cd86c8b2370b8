#pragma once

#include <filesystem>
#include <string>

namespace cfrg {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file(const std::filesystem::path& path);

} // namespace cfrg
