#pragma once

#include <cstdio>
#include <string>

namespace latids::detail {

/// 17 significant digits: lossless round-trip for doubles, byte-stable output.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace latids::detail
