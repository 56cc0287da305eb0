#pragma once

#include <cstdint>
#include <string>

namespace kac {

// Writes to a temp file in the same directory, then renames into place.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace kac
