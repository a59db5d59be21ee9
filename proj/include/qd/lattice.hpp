// Planar square lattice with boundary: oriented edges, counterclockwise faces,
// vertex and face ancilla slots, and the canonical site order.
#pragma once

#include <string>
#include <vector>

namespace qd {

struct VertexId {
  int i = 0, j = 0;  // row, column; v(0,0) is bottom-left
  bool operator==(const VertexId&) const = default;
};
struct FaceId {
  int i = 0, j = 0;  // corners v(i,j), v(i,j+1), v(i+1,j), v(i+1,j+1)
  bool operator==(const FaceId&) const = default;
};

enum class SiteKind { Edge, VertexAncilla, FaceAncilla };

struct SiteId {
  SiteKind kind = SiteKind::Edge;
  int i = 0, j = 0;  // vertex/face coordinates, or the edge's start vertex
  int k = 0, l = 0;  // edge end vertex
  std::string str() const;
  bool operator==(const SiteId&) const = default;
};

struct Edge {
  VertexId from, to;  // orientation: toward increasing column / row
  bool horizontal = true;
};

struct CycleEdge {
  int edge = 0;
  int o = 1;  // +1 iff the edge direction agrees with the counterclockwise face orientation
};

struct OrientedCycle {
  FaceId face;
  VertexId base;
  std::vector<CycleEdge> edges;  // counterclockwise from base
};

struct StarEdge {
  int edge = 0;
  bool out = true;  // e = [v,*] if out, e = [*,v] if in
};

enum class Direction { Right, Left, Up, Down };
Direction parse_direction(const std::string& s);
std::string to_string(Direction d);

class Lattice {
 public:
  Lattice(int rows, int cols);  // rows x cols faces

  int rows() const { return n_; }
  int cols() const { return m_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_vertices() const { return (n_ + 1) * (m_ + 1); }
  int num_faces() const { return n_ * m_; }
  int num_sites() const { return num_edges() + num_vertices() + num_faces(); }

  bool has_vertex(VertexId v) const { return v.i >= 0 && v.i <= n_ && v.j >= 0 && v.j <= m_; }
  bool has_face(FaceId f) const { return f.i >= 0 && f.i < n_ && f.j >= 0 && f.j < m_; }
  int vertex_index(VertexId v) const;
  int face_index(FaceId f) const;
  VertexId vertex(int index) const { return {index / (m_ + 1), index % (m_ + 1)}; }
  FaceId face(int index) const { return {index / m_, index % m_}; }

  // Horizontal edge v(i,j) -> v(i,j+1); vertical edge v(i,j) -> v(i+1,j).
  int h_edge(int i, int j) const;
  int v_edge(int i, int j) const;
  // Edge joining two adjacent vertices (either order); throws if not adjacent.
  int edge_between(VertexId a, VertexId b) const;
  const Edge& edge(int e) const { return edges_.at(e); }

  // Canonical site positions: edges, then vertex ancillas, then face ancillas.
  int edge_site(int e) const { return e; }
  int vertex_site(VertexId v) const { return num_edges() + vertex_index(v); }
  int face_site(FaceId f) const { return num_edges() + num_vertices() + face_index(f); }
  int site_position(const SiteId& s) const;
  SiteId site(int position) const;

  std::vector<VertexId> corners(FaceId f) const;  // counterclockwise from bottom-left
  bool is_corner(FaceId f, VertexId v) const;
  OrientedCycle face_cycle(FaceId f, VertexId base) const;
  std::vector<StarEdge> vertex_star(VertexId v) const;
  std::vector<FaceId> faces_of_edge(int e) const;
  // The edge shared by two adjacent faces; throws otherwise.
  int shared_edge(FaceId a, FaceId b) const;
  FaceId neighbor(FaceId f, Direction d) const;  // may be off-lattice
  VertexId neighbor(VertexId v, Direction d) const;

 private:
  int n_, m_;
  std::vector<Edge> edges_;
};

}  // namespace qd
