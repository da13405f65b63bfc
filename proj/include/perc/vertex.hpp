#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace perc {

// Maximum ambient dimension supported by the fixed-capacity vertex type.
// Covers Z^d for d <= 11 plus the extra direction of the split lattices.
inline constexpr int kMaxDim = 12;

// A lattice vertex: integer coordinates in an ambient dimension `dim`.
// Coordinates beyond `dim` stay zero so that equality and hashing can look
// at the whole array.
struct Vertex {
  std::array<int32_t, kMaxDim> c{};
  int32_t dim = 0;

  static Vertex origin(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("vertex dimension out of range");
    Vertex v;
    v.dim = d;
    return v;
  }

  int32_t operator[](int i) const { return c[static_cast<size_t>(i)]; }
  int32_t& operator[](int i) { return c[static_cast<size_t>(i)]; }

  Vertex shifted(int axis, int32_t delta) const {
    Vertex v = *this;
    v.c[static_cast<size_t>(axis)] += delta;
    return v;
  }

  int64_t l1() const {
    int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += std::abs(static_cast<int64_t>(c[static_cast<size_t>(i)]));
    return s;
  }

  int32_t linf() const {
    int32_t m = 0;
    for (int i = 0; i < dim; ++i) {
      int32_t a = c[static_cast<size_t>(i)] < 0 ? -c[static_cast<size_t>(i)] : c[static_cast<size_t>(i)];
      if (a > m) m = a;
    }
    return m;
  }

  bool operator==(const Vertex& o) const = default;

  // Lexicographic order on (dim, coordinates); used as a tie-break only.
  bool lex_less(const Vertex& o) const {
    if (dim != o.dim) return dim < o.dim;
    for (int i = 0; i < dim; ++i) {
      if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)])
        return c[static_cast<size_t>(i)] < o.c[static_cast<size_t>(i)];
    }
    return false;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ",";
      s += std::to_string(c[static_cast<size_t>(i)]);
    }
    s += ")";
    return s;
  }
};

}  // namespace perc
