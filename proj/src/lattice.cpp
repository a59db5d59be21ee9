#include "qd/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace qd {

std::string SiteId::str() const {
  auto p = [](int a, int b) { return std::to_string(a) + "," + std::to_string(b); };
  switch (kind) {
    case SiteKind::Edge: return "e" + p(i, j) + ";" + p(k, l);
    case SiteKind::VertexAncilla: return "v" + p(i, j);
    case SiteKind::FaceAncilla: return "f" + p(i, j);
  }
  return "?";
}

Direction parse_direction(const std::string& s) {
  if (s == "right") return Direction::Right;
  if (s == "left") return Direction::Left;
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  throw std::invalid_argument("unknown direction '" + s + "'");
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Right: return "right";
    case Direction::Left: return "left";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
  }
  return "?";
}

Lattice::Lattice(int rows, int cols) : n_(rows), m_(cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("lattice dimensions must be positive");
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j < m_; ++j) edges_.push_back({{i, j}, {i, j + 1}, true});
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= m_; ++j) edges_.push_back({{i, j}, {i + 1, j}, false});
}

int Lattice::vertex_index(VertexId v) const {
  if (!has_vertex(v)) throw std::out_of_range("vertex outside the lattice");
  return v.i * (m_ + 1) + v.j;
}

int Lattice::face_index(FaceId f) const {
  if (!has_face(f)) throw std::out_of_range("face outside the lattice");
  return f.i * m_ + f.j;
}

int Lattice::h_edge(int i, int j) const {
  if (i < 0 || i > n_ || j < 0 || j >= m_) throw std::out_of_range("horizontal edge outside the lattice");
  return i * m_ + j;
}

int Lattice::v_edge(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j > m_) throw std::out_of_range("vertical edge outside the lattice");
  return (n_ + 1) * m_ + i * (m_ + 1) + j;
}

int Lattice::edge_between(VertexId a, VertexId b) const {
  if (a.i == b.i && std::abs(a.j - b.j) == 1) return h_edge(a.i, std::min(a.j, b.j));
  if (a.j == b.j && std::abs(a.i - b.i) == 1) return v_edge(std::min(a.i, b.i), a.j);
  throw std::invalid_argument("vertices are not adjacent");
}

int Lattice::site_position(const SiteId& s) const {
  switch (s.kind) {
    case SiteKind::Edge: return edge_between({s.i, s.j}, {s.k, s.l});
    case SiteKind::VertexAncilla: return vertex_site({s.i, s.j});
    case SiteKind::FaceAncilla: return face_site({s.i, s.j});
  }
  throw std::logic_error("bad site kind");
}

SiteId Lattice::site(int position) const {
  if (position < 0 || position >= num_sites()) throw std::out_of_range("site position");
  if (position < num_edges()) {
    const Edge& e = edges_[position];
    return {SiteKind::Edge, e.from.i, e.from.j, e.to.i, e.to.j};
  }
  position -= num_edges();
  if (position < num_vertices()) {
    VertexId v = vertex(position);
    return {SiteKind::VertexAncilla, v.i, v.j, 0, 0};
  }
  FaceId f = face(position - num_vertices());
  return {SiteKind::FaceAncilla, f.i, f.j, 0, 0};
}

std::vector<VertexId> Lattice::corners(FaceId f) const {
  face_index(f);
  return {{f.i, f.j}, {f.i, f.j + 1}, {f.i + 1, f.j + 1}, {f.i + 1, f.j}};
}

bool Lattice::is_corner(FaceId f, VertexId v) const {
  auto c = corners(f);
  return std::find(c.begin(), c.end(), v) != c.end();
}

OrientedCycle Lattice::face_cycle(FaceId f, VertexId base) const {
  auto c = corners(f);
  auto it = std::find(c.begin(), c.end(), base);
  if (it == c.end()) throw std::invalid_argument("base vertex is not a corner of the face");
  int start = static_cast<int>(it - c.begin());
  OrientedCycle cyc{f, base, {}};
  for (int k = 0; k < 4; ++k) {
    VertexId a = c[(start + k) % 4], b = c[(start + k + 1) % 4];
    int e = edge_between(a, b);
    cyc.edges.push_back({e, edges_[e].from == a ? +1 : -1});
  }
  return cyc;
}

std::vector<StarEdge> Lattice::vertex_star(VertexId v) const {
  vertex_index(v);
  std::vector<StarEdge> star;
  if (v.j < m_) star.push_back({h_edge(v.i, v.j), true});
  if (v.i < n_) star.push_back({v_edge(v.i, v.j), true});
  if (v.j > 0) star.push_back({h_edge(v.i, v.j - 1), false});
  if (v.i > 0) star.push_back({v_edge(v.i - 1, v.j), false});
  return star;
}

std::vector<FaceId> Lattice::faces_of_edge(int e) const {
  const Edge& ed = edges_.at(e);
  std::vector<FaceId> out;
  std::vector<FaceId> cand = ed.horizontal ? std::vector<FaceId>{{ed.from.i - 1, ed.from.j}, {ed.from.i, ed.from.j}}
                                           : std::vector<FaceId>{{ed.from.i, ed.from.j - 1}, {ed.from.i, ed.from.j}};
  for (auto f : cand)
    if (has_face(f)) out.push_back(f);
  return out;
}

int Lattice::shared_edge(FaceId a, FaceId b) const {
  for (int e = 0; e < num_edges(); ++e) {
    auto fs = faces_of_edge(e);
    if (fs.size() == 2 && ((fs[0] == a && fs[1] == b) || (fs[0] == b && fs[1] == a))) return e;
  }
  throw std::invalid_argument("faces are not adjacent");
}

FaceId Lattice::neighbor(FaceId f, Direction d) const {
  switch (d) {
    case Direction::Right: return {f.i, f.j + 1};
    case Direction::Left: return {f.i, f.j - 1};
    case Direction::Up: return {f.i + 1, f.j};
    case Direction::Down: return {f.i - 1, f.j};
  }
  return f;
}

VertexId Lattice::neighbor(VertexId v, Direction d) const {
  switch (d) {
    case Direction::Right: return {v.i, v.j + 1};
    case Direction::Left: return {v.i, v.j - 1};
    case Direction::Up: return {v.i + 1, v.j};
    case Direction::Down: return {v.i - 1, v.j};
  }
  return v;
}

}  // namespace qd
