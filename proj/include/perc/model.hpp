#pragma once

#include <stdexcept>
#include <string>

namespace perc {

enum class Kind { bond, site };
enum class Orientation { non_oriented, oriented };

// Which percolation model a computation targets: dimension, bond vs site,
// oriented vs non-oriented.
struct ModelSpec {
  int d = 2;
  Kind kind = Kind::bond;
  Orientation orientation = Orientation::non_oriented;

  bool oriented() const { return orientation == Orientation::oriented; }
  bool operator==(const ModelSpec&) const = default;
};

inline ModelSpec bond_model(int d) { return {d, Kind::bond, Orientation::non_oriented}; }
inline ModelSpec oriented_bond_model(int d) { return {d, Kind::bond, Orientation::oriented}; }
inline ModelSpec site_model(int d) { return {d, Kind::site, Orientation::non_oriented}; }
inline ModelSpec oriented_site_model(int d) { return {d, Kind::site, Orientation::oriented}; }

inline std::string family_name(const ModelSpec& m) {
  std::string s = m.oriented() ? "oriented-" : "";
  s += (m.kind == Kind::bond) ? "bond" : "site";
  return s;
}

// Parses "bond", "oriented-bond", "site", "oriented-site".
inline ModelSpec parse_family(const std::string& name, int d) {
  if (name == "bond") return bond_model(d);
  if (name == "oriented-bond") return oriented_bond_model(d);
  if (name == "site") return site_model(d);
  if (name == "oriented-site") return oriented_site_model(d);
  throw std::invalid_argument("unknown family: " + name);
}

inline void require_dimension(const ModelSpec& m, int dim, const char* what) {
  if (m.d != dim) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace perc
