#pragma once

#include <stdexcept>
#include <string>

namespace hran {

// Bad input data: malformed records, dimension mismatches, invalid configs.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failures: missing files, unwritable paths.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hran
