#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntrugkp {

using i64 = long long;
using i128 = __int128;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Arithmetic left the audited 62-bit working range. All i64 paths assume
// |value| < 2^62; anything bigger must go through the GMP routines instead.
struct WidthOverflow : Error {
  explicit WidthOverflow(const std::string& msg) : Error("width overflow: " + msg) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& msg) : Error("invalid config: " + msg) {}
};

inline i64 checked_i64(i128 x, const char* where) {
  constexpr i128 lim = (i128)1 << 62;
  if (x >= lim || x <= -lim) throw WidthOverflow(where);
  return (i64)x;
}

// Dense row-major integer matrix. Small dimensions only (<= 96 per side here).
struct IntMat {
  int rows = 0, cols = 0;
  std::vector<i64> v;

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0) {}

  i64& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  i64 at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  i64* row(int r) { return v.data() + static_cast<size_t>(r) * cols; }
  const i64* row(int r) const { return v.data() + static_cast<size_t>(r) * cols; }

  bool operator==(const IntMat& o) const {
    return rows == o.rows && cols == o.cols && v == o.v;
  }
};

IntMat identity_mat(int n);
IntMat mat_mul(const IntMat& a, const IntMat& b);
IntMat mat_transpose(const IntMat& a);
IntMat mat_scale(const IntMat& a, i64 s);

// 2n x 2n symplectic form [[0, I], [-I, 0]].
IntMat symplectic_form(int n);

std::string mat_to_string(const IntMat& a);  // row per line, space-separated
IntMat mat_from_string(const std::string& text);

}  // namespace ntrugkp
