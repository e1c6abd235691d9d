#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace brw {

enum class VertexKind { tree, finite };

// Site address. Finite-graph sites carry an integer id. Tree sites carry
// a reduced path word from the root: the first letter picks one of the
// root's d neighbours, later letters pick one of the d-1 forward edges.
// Reduced words (no step immediately undone) biject with tree vertices.
struct Vertex {
  VertexKind kind = VertexKind::tree;
  std::uint32_t id = 0;                // finite
  std::vector<std::uint8_t> word;      // tree; empty = root

  static Vertex root() { return Vertex{}; }
  static Vertex finite(std::uint32_t id) {
    return Vertex{VertexKind::finite, id, {}};
  }
  static Vertex tree_path(std::vector<std::uint8_t> w) {
    return Vertex{VertexKind::tree, 0, std::move(w)};
  }

  bool is_tree_root() const { return kind == VertexKind::tree && word.empty(); }
  int depth() const { return static_cast<int>(word.size()); }

  // "o", "o/2/0", or the integer id for finite graphs.
  std::string str() const;
  static Vertex parse(const std::string& s);

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// Tree distance between reduced path words: depths minus twice the
// longest common prefix.
int tree_distance(const Vertex& a, const Vertex& b);

}  // namespace brw
