#pragma once

#include <filesystem>
#include <string>

namespace wgqed::cli {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace wgqed::cli
