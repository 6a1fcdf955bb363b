#pragma once

#include <filesystem>
#include <string>

#include "spectral/field.hpp"

namespace kgeft {

struct FldRecord {
  Field field;
  std::string name;
  double time = 0.0;
};

// One JSON header line, then little-endian float64 (re, im) pairs in row-major order.
void write_fld(const std::filesystem::path& path, const Field& f, const std::string& name, double time);
FldRecord read_fld(const std::filesystem::path& path);

}  // namespace kgeft
