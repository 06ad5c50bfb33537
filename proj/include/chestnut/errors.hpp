#pragma once

#include <stdexcept>
#include <string>

namespace chestnut {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Input text was readable but does not look like the expected format.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Active-user selection could not produce the requested population.
struct SelectionError : std::runtime_error {
  explicit SelectionError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chestnut
