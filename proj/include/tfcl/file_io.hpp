#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tfcl::io {

std::vector<char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const char> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
/// create_directories, throwing ErrorKind::io on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace tfcl::io
