#include "brw/vertex.hpp"

#include <algorithm>
#include <stdexcept>

namespace brw {

std::string Vertex::str() const {
  if (kind == VertexKind::finite) return std::to_string(id);
  std::string out = "o";
  for (auto c : word) {
    out += '/';
    out += std::to_string(static_cast<int>(c));
  }
  return out;
}

Vertex Vertex::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("vertex: empty address");
  if (s[0] == 'o') {
    Vertex v = Vertex::root();
    std::size_t pos = 1;
    while (pos < s.size()) {
      if (s[pos] != '/') throw std::invalid_argument("vertex: bad path " + s);
      ++pos;
      std::size_t end = s.find('/', pos);
      if (end == std::string::npos) end = s.size();
      const std::string part = s.substr(pos, end - pos);
      if (part.empty()) throw std::invalid_argument("vertex: bad path " + s);
      const int c = std::stoi(part);
      if (c < 0 || c > 255) throw std::invalid_argument("vertex: bad letter");
      v.word.push_back(static_cast<std::uint8_t>(c));
      pos = end;
    }
    return v;
  }
  return Vertex::finite(static_cast<std::uint32_t>(std::stoul(s)));
}

int tree_distance(const Vertex& a, const Vertex& b) {
  const auto& u = a.word;
  const auto& v = b.word;
  std::size_t l = 0;
  const std::size_t m = std::min(u.size(), v.size());
  while (l < m && u[l] == v[l]) ++l;
  return static_cast<int>(u.size() + v.size() - 2 * l);
}

}  // namespace brw
