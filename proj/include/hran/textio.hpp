#pragma once

#include <string>

namespace hran {

// Shortest round-trip decimal text for a double (locale-free).
std::string fmt_double(double x);

// Whole-file write-then-rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace hran
