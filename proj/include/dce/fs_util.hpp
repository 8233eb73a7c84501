#pragma once

#include <string>

namespace dce {

// Writes content to path atomically (temp file in the same directory, then
// rename). Throws IoError on failure; never leaves a partial file at path.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace dce
