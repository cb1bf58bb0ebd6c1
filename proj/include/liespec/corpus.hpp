#pragma once

// Built-in example instances. They are embedded so the tool is self-contained;
// `examples emit` writes them out as files.

#include <string>
#include <vector>

#include "liespec/io.hpp"
#include "liespec/types.hpp"

namespace liespec::corpus {

struct Entry {
  std::string name;
  std::string description;
  const char* text;
};

inline const std::vector<Entry>& entries() {
  // g2: the two-dimensional non-nilpotent solvable algebra [x, y] = y acting
  // on C^2, with y defective. Joint spectrum {(0, 1/2), (0, -3/2)}.
  static const char* g2 = R"JSON({
  "name": "g2",
  "space_dim": 2,
  "generators": [
    {"label": "y", "matrix": [[[1, 0], [1, 0]], [[-1, 0], [-1, 0]]]},
    {"label": "x", "matrix": [[[0.5, 0], [1, 0]], [[0, 0], [-0.5, 0]]]}
  ]
})JSON";

  // heisenberg: [p, q] = z on C^3 by elementary matrices; nilpotent, spectrum
  // {(0, 0, 0)}.
  static const char* heisenberg = R"JSON({
  "name": "heisenberg",
  "space_dim": 3,
  "generators": [
    {"label": "p", "matrix": [[[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [1, 0]], [[0, 0], [0, 0], [0, 0]]]},
    {"label": "q", "matrix": [[[0, 0], [1, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]]},
    {"label": "z", "matrix": [[[0, 0], [0, 0], [1, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]]}
  ]
})JSON";

  // abelian_diag: three-dimensional space, two commuting diagonal generators;
  // spectrum {(1, 5), (2, 4), (3, 7)}.
  static const char* abelian_diag = R"JSON({
  "name": "abelian_diag",
  "space_dim": 3,
  "generators": [
    {"label": "a", "matrix": [[[1, 0], [0, 0], [0, 0]], [[0, 0], [2, 0], [0, 0]], [[0, 0], [0, 0], [3, 0]]]},
    {"label": "b", "matrix": [[[5, 0], [0, 0], [0, 0]], [[0, 0], [4, 0], [0, 0]], [[0, 0], [0, 0], [7, 0]]]}
  ]
})JSON";

  // commuting_diag: the diagonal pair diag(1,2), diag(3,4); spectrum
  // {(1, 3), (2, 4)}.
  static const char* commuting_diag = R"JSON({
  "name": "commuting_diag",
  "space_dim": 2,
  "generators": [
    {"label": "a", "matrix": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]},
    {"label": "b", "matrix": [[[3, 0], [0, 0]], [[0, 0], [4, 0]]]}
  ]
})JSON";

  // sl2: e, f, h with [h, e] = -2e under the bracket in use; not solvable, so
  // every spectral operation rejects it.
  static const char* sl2 = R"JSON({
  "name": "sl2",
  "space_dim": 2,
  "generators": [
    {"label": "e", "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]},
    {"label": "f", "matrix": [[[0, 0], [0, 0]], [[1, 0], [0, 0]]]},
    {"label": "h", "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}
  ]
})JSON";

  static const std::vector<Entry> list{
      {"g2", "two-dimensional solvable algebra [x, y] = y on C^2", g2},
      {"heisenberg", "Heisenberg relations [p, q] = z on C^3", heisenberg},
      {"abelian_diag", "two commuting diagonal generators on C^3", abelian_diag},
      {"commuting_diag", "the diagonal pair diag(1,2), diag(3,4)", commuting_diag},
      {"sl2", "non-solvable rejection case", sl2},
  };
  return list;
}

inline const Entry& get(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.name == name) return e;
  }
  throw ParseError("unknown example '" + name + "'; available: g2, heisenberg, abelian_diag, commuting_diag, sl2");
}

inline io::Instance load(const std::string& name) {
  const Entry& e = get(name);
  return io::parse_instance_string(e.text, "example " + name);
}

}  // namespace liespec::corpus
