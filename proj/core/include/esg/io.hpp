#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace esg::io {

// Whole-file read; throws IoError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a temp file in the target directory, then renames into place,
// so a partially written stage output never exists under its final name.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

}  // namespace esg::io
