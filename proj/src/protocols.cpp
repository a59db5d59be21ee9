#include "qd/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qd {

namespace {

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Right: return Direction::Left;
    case Direction::Left: return Direction::Right;
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
  }
  return d;
}

// Orientation of edge e in the counterclockwise boundary of f.
int orientation_in(const Lattice& L, FaceId f, int e) {
  for (const auto& ce : L.face_cycle(f, L.corners(f)[0]).edges)
    if (ce.edge == e) return ce.o;
  throw std::invalid_argument("edge is not on the face boundary");
}

// Corner at which the shared edge is traversed last in f's boundary.
VertexId transfer_base(const Lattice& L, FaceId f, int e) {
  return orientation_in(L, f, e) > 0 ? L.edge(e).to : L.edge(e).from;
}

Direction direction_between(const Lattice& L, FaceId a, FaceId b) {
  for (Direction d : {Direction::Right, Direction::Left, Direction::Up, Direction::Down})
    if (L.neighbor(a, d) == b) return d;
  throw std::invalid_argument("fluxes do not occupy adjacent faces");
}

Mat dft_matrix(int d) { return LocalBasis::dft(d).vectors; }

// Controlled multiplication of a face ancilla by the boundary product, on a Run or a Branch.
template <class T>
void lambda_on(const Model& M, T& target, FaceId f, VertexId base, bool inverse) {
  const int anc = M.L.face_site(f);
  const auto cyc = M.L.face_cycle(f, base);
  const int n = static_cast<int>(cyc.edges.size());
  for (int s = 0; s < n; ++s) {
    const auto& ce = cyc.edges[inverse ? n - 1 - s : s];
    const FiniteGroup& G = M.G;
    const int o = ce.o;
    Family fam = left_family(G, [&](int x) {
      int h = o > 0 ? G.inv(x) : x;
      return inverse ? G.inv(h) : h;
    });
    target.controlled(M.L.edge_site(ce.edge), anc, fam, inverse ? "Lambda^-1" : "Lambda");
  }
}

// Controlled gauge transformation T_{g(c)}(v) from an ancilla value c.
template <class T>
void controlled_gauge_on(const Model& M, T& target, int control, VertexId v, const std::function<int(int)>& g_of,
                         const std::string& name) {
  const FiniteGroup& G = M.G;
  for (const auto& se : M.L.vertex_star(v)) {
    Family fam = se.out ? left_family(G, g_of) : right_family(G, [&](int c) {
      int g = g_of(c);
      return g < 0 ? -1 : G.inv(g);
    });
    target.controlled(control, M.L.edge_site(se.edge), fam, name);
  }
}

bool holds_identity(const SparseState& s, int site) {
  for (const auto& [k, a] : s.amplitudes())
    if (s.get(k, site) != 0) return false;
  return true;
}

// Probability-weighted outcome distribution over all branches.
std::vector<double> weighted_distribution(const Run& run, int site, const LocalBasis& B) {
  std::vector<double> p(B.size(), 0.0);
  double total = 0.0;
  for (const auto& b : run.branches()) {
    auto q = outcome_probabilities(b.state, site, B);
    for (int k = 0; k < B.size(); ++k) p[k] += b.probability * q[k];
    total += b.probability;
  }
  for (double& x : p) x /= total;
  return p;
}

int class_of_name(const FiniteGroup& G, const std::string& element) { return G.class_of(G.element_index(element)); }

}  // namespace

// ------------------------------------------------------------ building blocks

void prepare_ancilla(Run& run, int site, const Mat& U, const std::string& name) {
  require_identity(run, site, name);
  run.single(site, LocalOp(U), name);
}

void controlled_gauge(const Model& M, Run& run, VertexId v, const std::string& name) {
  controlled_gauge_on(M, run, M.L.vertex_site(v), v, [](int c) { return c; }, name);
}

void require_identity(const Run& run, int site, const std::string& what) {
  for (const auto& b : run.branches())
    if (!holds_identity(b.state, site))
      throw AncillaContamination(what + ": ancilla site " + std::to_string(site) + " is not in |e>");
}

void flux_to_ancilla(const Model& M, Run& run, FaceId f, VertexId base) { lambda_on(M, run, f, base, false); }

void flux_to_ancilla_inverse(const Model& M, Run& run, FaceId f, VertexId base) { lambda_on(M, run, f, base, true); }

// -------------------------------------------------------------- ground state

Run ground_state_synthesis(const Model& M, const OutcomePolicy& policy) {
  Run run(M.vacuum(), policy);
  const int d = M.G.order();
  const LocalBasis dft = LocalBasis::dft(d);
  const Mat F = dft_matrix(d);
  // Project A(v) = 1 at v; the outcome j is undone by Z^j on an edge leaving v
  // that no earlier step has touched.
  auto project_vertex = [&](VertexId v, int edge) {
    const int anc = M.L.vertex_site(v);
    prepare_ancilla(run, anc, F, "prepare ~0");
    controlled_gauge(M, run, v);
    run.measure(anc, dft, "measure DFT", MeasureMode::Reset);
    run.each([&](Branch& b) {
      const int j = b.last_outcome();
      if (j == 0) return;
      std::vector<cd> z(d);
      for (int x = 0; x < d; ++x) z[x] = root_of_unity(static_cast<long>(j) * x, d);
      b.single(M.L.edge_site(edge), LocalOp::diagonal(z), "Z^" + std::to_string(j));
    });
  };
  const int n = M.L.rows(), m = M.L.cols();
  for (int k = 0; k < m; ++k)
    for (int j = 0; j <= n; ++j) project_vertex({j, k}, M.L.h_edge(j, k));
  for (int j = 0; j < n; ++j) project_vertex({j, m}, M.L.v_edge(j, m));
  run.track_support();
  return run;
}

SparseState ground_state(const Model& M) {
  Run run = ground_state_synthesis(M, OutcomePolicy::postselect(0));
  return run.only().state;
}

// ---------------------------------------------------------- magnetic fluxes

std::pair<AnyonHandle, AnyonHandle> create_magnetic_pair(const Model& M, Run& run, int cls, FaceId f, Direction d,
                                                         int phase_shift) {
  const FiniteGroup& G = M.G;
  const FaceId f2 = M.L.neighbor(f, d);
  if (!M.L.has_face(f) || !M.L.has_face(f2)) throw std::out_of_range("flux pair does not fit in the lattice");
  const auto& C = G.classes().at(cls);
  const int e = M.L.shared_edge(f, f2);
  // The face in which the shared edge is positively oriented controls the pair.
  const bool f_controls = orientation_in(M.L, f, e) > 0;
  const FaceId fc = f_controls ? f : f2, fo = f_controls ? f2 : f;
  const VertexId v = M.L.edge(e).to;
  AnyonHandle hc{AnyonHandle::Kind::Magnetic, fc, v, v, G.class_of(G.inv(C.representative)), 0, "flux"};
  AnyonHandle ho{AnyonHandle::Kind::Magnetic, fo, v, v, cls, 0, "flux"};
  if (C.representative == G.identity()) {
    run.each([](Branch& b) { b.note("trivial class: no-op"); });
    return {hc, ho};
  }
  const int anc = M.L.face_site(fc), edge = M.L.edge_site(e);
  const LocalBasis B = LocalBasis::class_phase(G, cls);
  prepare_ancilla(run, anc, B.vectors, "prepare 0_[l]");
  run.controlled(anc, edge, right_family(G, [&](int g) { return C.contains(g) ? g : -1; }), "F_[l]");
  run.measure(anc, B, "measure class phase", MeasureMode::Reset);

  const int n = C.size();
  run.each([&](Branch& b) {
    const int ex = ((b.last_outcome() + phase_shift) % n + n) % n;
    if (ex == 0) return;
    // The ancilla learns l_m^-1 from the boundary of fc; the phase undoes the
    // measurement's relative phases, then the ancilla is uncomputed.
    lambda_on(M, b, fc, v, false);
    std::vector<cd> ph(G.order(), 1.0);
    for (int a = 0; a < G.order(); ++a) {
      int pos = C.position(G.inv(a));
      if (pos >= 0) ph[a] = root_of_unity(static_cast<long>(ex) * pos, n);
    }
    b.single(anc, LocalOp::diagonal(ph), "Z^" + std::to_string(ex) + "_[l]");
    lambda_on(M, b, fc, v, true);
  });
  require_identity(run, anc, "create_magnetic_pair");
  run.track_support();
  return {hc, ho};
}

void move_flux(const Model& M, Run& run, AnyonHandle& h, Direction d) {
  const FiniteGroup& G = M.G;
  const FaceId f = h.face, f2 = M.L.neighbor(f, d);
  if (!M.L.has_face(f2)) throw std::out_of_range("move_flux: destination face outside the lattice");
  const int e = M.L.shared_edge(f, f2);
  const int o = orientation_in(M.L, f, e);
  const VertexId v = transfer_base(M.L, f, e);
  const int a = M.L.face_site(f), a2 = M.L.face_site(f2), edge = M.L.edge_site(e);
  require_identity(run, a, "move_flux (source ancilla)");
  require_identity(run, a2, "move_flux (destination ancilla)");

  flux_to_ancilla(M, run, f, v);
  // Y(f,e): right multiplication if e is positively oriented in f, left by the inverse otherwise.
  Family y = o > 0 ? right_family(G, [](int c) { return c; }) : left_family(G, [&](int c) { return G.inv(c); });
  run.controlled(a, edge, y, "Y");
  flux_to_ancilla(M, run, f2, v);
  run.swap(edge, a2, "swap");
  run.controlled(edge, a, left_family(G, [&](int c) { return G.inv(c); }), "u");
  run.swap(edge, a2, "swap");
  flux_to_ancilla_inverse(M, run, f2, v);

  require_identity(run, a, "move_flux (source ancilla after transport)");
  require_identity(run, a2, "move_flux (destination ancilla after transport)");
  h.face = f2;
  h.base = v;
  run.track_support();
}

void move_flux_path(const Model& M, Run& run, AnyonHandle& h, const std::vector<Direction>& path) {
  for (Direction d : path) move_flux(M, run, h, d);
}

// Λ(v,f_A) then Y into the partner face: the ancilla of A carries A's flux.
static int transfer_flux_to_ancilla(const Model& M, Run& run, const AnyonHandle& A, const AnyonHandle& B) {
  const Direction d = direction_between(M.L, A.face, B.face);
  (void)d;
  const int e = M.L.shared_edge(A.face, B.face);
  const int o = orientation_in(M.L, A.face, e);
  const VertexId v = transfer_base(M.L, A.face, e);
  const int a = M.L.face_site(A.face);
  require_identity(run, a, "fusion");
  flux_to_ancilla(M, run, A.face, v);
  const FiniteGroup& G = M.G;
  Family y = o > 0 ? right_family(G, [](int c) { return c; }) : left_family(G, [&](int c) { return G.inv(c); });
  run.controlled(a, M.L.edge_site(e), y, "Y");
  return a;
}

FusionReport fuse_magnetic_pair(const Model& M, Run& run, const AnyonHandle& A, const AnyonHandle& B) {
  const int a = transfer_flux_to_ancilla(M, run, A, B);
  const LocalBasis basis = LocalBasis::class_phase(M.G, A.cls);
  FusionReport r;
  r.labels = basis.labels;
  r.distribution = weighted_distribution(run, a, basis);
  r.vacuum_probability = r.distribution[0];
  run.measure(a, basis, "measure fusion", MeasureMode::Reset);
  return r;
}

double flux_flux_probability(const Model& M, Run& run, const AnyonHandle& A, const AnyonHandle& B) {
  const FiniteGroup& G = M.G;
  const int a = transfer_flux_to_ancilla(M, run, A, B);
  const LocalBasis basis = LocalBasis::interference_x(G, G.element_index("c+"), G.element_index("c-"));
  const double p = weighted_distribution(run, a, basis)[1];
  run.measure(a, basis, "measure phi+-", MeasureMode::Reset);
  return p;
}

// -------------------------------------------------------- electric charges

template <class T>
static void charge_to_ancilla_on(const Model& M, T& target, VertexId v, int edge, bool inverse) {
  const FiniteGroup& G = M.G;
  const Edge& ed = M.L.edge(edge);
  bool out;
  if (ed.from == v)
    out = true;
  else if (ed.to == v)
    out = false;
  else
    throw std::invalid_argument("edge is not incident to the vertex");
  const bool use_inverse = out == inverse;  // K: R_x on outgoing, R_{x^-1} on incoming edges
  Family fam = right_family(G, [&](int x) { return use_inverse ? G.inv(x) : x; });
  target.controlled(M.L.edge_site(edge), M.L.vertex_site(v), fam, inverse ? "K^-1" : "K");
}

void charge_to_ancilla(const Model& M, Run& run, VertexId v, int edge, bool inverse) {
  charge_to_ancilla_on(M, run, v, edge, inverse);
}

static std::pair<AnyonHandle, AnyonHandle> charge_handles(const Model& M, VertexId a, VertexId b, int irrep) {
  std::string label = irrep >= 0 ? M.G.irreps()[irrep].label : "outcome-dependent";
  AnyonHandle ha{AnyonHandle::Kind::Electric, {}, a, a, 0, irrep, label};
  AnyonHandle hb{AnyonHandle::Kind::Electric, {}, b, b, 0, irrep, label};
  return {ha, hb};
}

std::pair<AnyonHandle, AnyonHandle> create_electric_pair_probabilistic(const Model& M, Run& run, int edge) {
  const Edge& ed = M.L.edge(edge);
  const int anc = M.L.vertex_site(ed.from);
  require_identity(run, anc, "create_electric_pair_probabilistic");
  charge_to_ancilla(M, run, ed.from, edge, false);
  run.measure(anc, LocalBasis::irrep(M.G), "measure irrep basis", MeasureMode::Reset);
  return charge_handles(M, ed.from, ed.to, -1);
}

static bool is_s3(const FiniteGroup& G) { return G.name() == "s3"; }

std::pair<AnyonHandle, AnyonHandle> create_electric_vacuum_pair(const Model& M, Run& run, int edge, int irrep) {
  const FiniteGroup& G = M.G;
  if (irrep < 0 || irrep >= static_cast<int>(G.irreps().size())) throw std::invalid_argument("not an irrep of the group");
  const Irrep& R = G.irreps()[irrep];
  const Edge& ed = M.L.edge(edge);
  const int site = M.L.edge_site(edge);
  if (R.dim == 1) {
    run.single(site, LocalOp::diagonal(charge_creation_coeffs(G, R)), "W_" + R.label);
    return charge_handles(M, ed.from, ed.to, irrep);
  }
  if (!is_s3(G) || R.dim != 2) throw std::invalid_argument("adaptive charge creation is defined for R2 of S3");

  using namespace s3;
  const cd xi = root_of_unity(1, 3), xis = std::conj(xi);
  const cd sq = root_of_unity(1, 6);  // xi^{1/2}
  const cd I(0.0, 1.0);
  const VertexId v = ed.from;
  const int anc = M.L.vertex_site(v);
  const int d = G.order();

  const LocalBasis pm = LocalBasis::interference_x(G, e, t0);
  prepare_ancilla(run, anc, pm.vectors, "prepare +");
  Family fam(d, LocalOp::identity(d));
  fam[e] = LocalOp::diagonal({1.0, 1.0, xi, xis, xi, xis});
  fam[t0] = LocalOp::diagonal({1.0, -1.0, std::conj(sq), sq, xis, xi});
  run.controlled(anc, site, fam, "controlled U0/U1");
  run.measure(anc, pm, "measure +-", MeasureMode::Reset);

  const std::string flag = "wr2_failed";
  Mat U3 = Mat::Zero(d, d);
  const double r3 = 1.0 / std::sqrt(3.0);
  U3(e, t0) = U3(e, t1) = U3(e, t2) = r3;
  U3(t1, t0) = r3, U3(t1, t1) = xi * r3, U3(t1, t2) = xis * r3;
  U3(t2, t0) = r3, U3(t2, t1) = xis * r3, U3(t2, t2) = xi * r3;
  U3(t0, e) = 1.0;
  U3(cp, cp) = U3(cm, cm) = 1.0;
  const LocalOp u2 = LocalOp::diagonal({1.0, 1.0, xis, xi, I, -I});
  const LocalOp u3(U3);
  run.each([&](Branch& b) {
    if (b.last_outcome() != 1) return;
    b.vars[flag] = 1;
    b.single(site, u2, "U2");
    // The ancilla was reset to |e> by the measurement; copy t_j edge values into it.
    b.controlled(site, anc, right_family(G, [](int c) { return c >= t0 && c <= t2 ? c : -1; }), "X");
    // Gauge transformation T_{t_j^-1}(v), controlled by the ancilla copy of the edge.
    controlled_gauge_on(M, b, anc, v, [&](int c) { return c >= t0 && c <= t2 ? G.inv(c) : -1; }, "Y");
    b.single(anc, u3, "U3");
  });
  run.measure(anc, LocalBasis::dft(d), "measure DFT", MeasureMode::Reset,
              [&](const Branch& b) { return b.vars.count(flag) > 0; });
  run.each([&](Branch& b) {
    if (!b.vars.count(flag)) return;
    b.vars.erase(flag);
    const int k = b.last_outcome();
    if (k == 0) return;
    // The ancilla's |t0> component picks up exp(-2 pi i k/|G|) relative to |e>;
    // it multiplies exactly the c+- components of the edge.
    std::vector<cd> ph(d, 1.0);
    ph[cp] = ph[cm] = root_of_unity(k, d);
    b.single(site, LocalOp::diagonal(ph), "phase correction " + std::to_string(k));
  });
  run.track_support();
  return charge_handles(M, ed.from, ed.to, irrep);
}

std::pair<AnyonHandle, AnyonHandle> create_electric_chain_pair(const Model& M, Run& run,
                                                               const std::vector<VertexId>& path, int irrep) {
  const FiniteGroup& G = M.G;
  if (path.size() < 2) throw std::invalid_argument("chain needs at least two vertices");
  const Irrep& R = G.irreps().at(irrep);
  if (R.dim != 1) throw std::invalid_argument("chain pairs are built for one-dimensional irreps");
  std::vector<int> edges;
  for (size_t k = 0; k + 1 < path.size(); ++k) edges.push_back(M.L.edge_between(path[k], path[k + 1]));
  for (const auto& v : path) require_identity(run, M.L.vertex_site(v), "create_electric_chain_pair");
  const size_t L = edges.size();
  // Accumulate the ordered product along the path in the travelling ancilla.
  for (size_t k = 0; k < L; ++k) {
    charge_to_ancilla(M, run, path[k], edges[k], false);
    if (k + 1 < L) {
      run.swap(M.L.vertex_site(path[k]), M.L.edge_site(edges[k]), "swap");
      run.swap(M.L.edge_site(edges[k]), M.L.vertex_site(path[k + 1]), "swap");
    }
  }
  const int last = M.L.vertex_site(path[L - 1]);
  run.single(last, LocalOp::diagonal(charge_creation_coeffs(G, R)), "W_" + R.label);
  for (size_t k = L; k-- > 0;) {
    charge_to_ancilla(M, run, path[k], edges[k], true);
    if (k > 0) {
      run.swap(M.L.edge_site(edges[k - 1]), M.L.vertex_site(path[k]), "swap");
      run.swap(M.L.vertex_site(path[k - 1]), M.L.edge_site(edges[k - 1]), "swap");
    }
  }
  for (const auto& v : path) require_identity(run, M.L.vertex_site(v), "create_electric_chain_pair");
  return charge_handles(M, path.front(), path.back(), irrep);
}

static void move_charge_impl(const Model& M, Run& run, AnyonHandle& h, Direction d, int string_edge,
                             std::vector<double>* readout) {
  const FiniteGroup& G = M.G;
  const VertexId v = h.vertex, v2 = M.L.neighbor(v, d);
  if (!M.L.has_vertex(v2)) throw std::out_of_range("move_charge: destination vertex outside the lattice");
  const int ec = M.L.edge_between(v, v2);
  int ein = string_edge;
  if (ein < 0) {
    const VertexId back = M.L.neighbor(v, opposite(d));
    if (M.L.has_vertex(back)) {
      ein = M.L.edge_between(v, back);
    } else {
      for (const auto& se : M.L.vertex_star(v))
        if (se.edge != ec) {
          ein = se.edge;
          break;
        }
    }
  }
  if (ein < 0 || ein == ec) throw std::invalid_argument("move_charge needs a string edge distinct from the step edge");
  const int a = M.L.vertex_site(v), a2 = M.L.vertex_site(v2);
  require_identity(run, a, "move_charge (source ancilla)");
  require_identity(run, a2, "move_charge (destination ancilla)");

  charge_to_ancilla(M, run, v, ein, true);
  charge_to_ancilla(M, run, v2, ec, true);
  controlled_gauge(M, run, v);
  controlled_gauge(M, run, v2);
  charge_to_ancilla(M, run, v, ec, true);
  require_identity(run, a, "move_charge (source ancilla after disentangling)");

  // Re-impose A(v) = 1 at the vacated vertex.
  const int dd = G.order();
  prepare_ancilla(run, a, dft_matrix(dd), "prepare ~0");
  controlled_gauge(M, run, v);
  run.measure(a, LocalBasis::dft(dd), "measure DFT", MeasureMode::Reset);
  const bool ein_out = M.L.edge(ein).from == v;
  run.each([&](Branch& b) {
    const int j = b.last_outcome();
    if (j == 0) return;
    std::vector<cd> z(dd);
    for (int x = 0; x < dd; ++x) z[x] = root_of_unity(static_cast<long>(j) * (ein_out ? x : G.inv(x)), dd);
    b.single(M.L.edge_site(ein), LocalOp::diagonal(z), "Z^" + std::to_string(j));
  });
  // Disentangles the destination ancilla.
  const LocalBasis basis = LocalBasis::irrep(G);
  if (readout) *readout = weighted_distribution(run, a2, basis);
  run.measure(a2, basis, "measure irrep basis", MeasureMode::Reset);
  h.vertex = v2;
  run.track_support();
}

void move_charge(const Model& M, Run& run, AnyonHandle& h, Direction d, int string_edge) {
  move_charge_impl(M, run, h, d, string_edge, nullptr);
}

static std::vector<int> irrep_of_outcome(const FiniteGroup& G) {
  std::vector<int> out;
  for (int r = 0; r < static_cast<int>(G.irreps().size()); ++r)
    for (int k = 0; k < G.irreps()[r].dim * G.irreps()[r].dim; ++k) out.push_back(r);
  return out;
}

static Direction line_direction(VertexId a, VertexId b) {
  if (a.i == b.i && a.j != b.j) return b.j > a.j ? Direction::Right : Direction::Left;
  if (a.j == b.j && a.i != b.i) return b.i > a.i ? Direction::Up : Direction::Down;
  throw std::invalid_argument("charges must share a row or a column");
}

static FusionReport by_irrep(const FiniteGroup& G, const std::vector<double>& dist) {
  const auto owner = irrep_of_outcome(G);
  FusionReport r;
  for (const auto& R : G.irreps()) r.labels.push_back(R.label);
  r.distribution.assign(G.irreps().size(), 0.0);
  for (size_t k = 0; k < dist.size(); ++k) r.distribution[owner[k]] += dist[k];
  r.vacuum_probability = r.distribution[0];
  return r;
}

FusionReport transport_onto_partner(const Model& M, Run& run, AnyonHandle A, const AnyonHandle& B, int string_edge) {
  const Direction d = line_direction(A.vertex, B.vertex);
  while (!(M.L.neighbor(A.vertex, d) == B.vertex)) move_charge(M, run, A, d, string_edge);
  std::vector<double> dist;
  move_charge_impl(M, run, A, d, string_edge, &dist);
  return by_irrep(M.G, dist);
}

FusionReport fuse_electric_pair(const Model& M, Run& run, AnyonHandle A, const AnyonHandle& B, int string_edge) {
  const Direction d = line_direction(A.vertex, B.vertex);
  while (!(M.L.neighbor(A.vertex, d) == B.vertex)) move_charge(M, run, A, d, string_edge);

  // Total charge of the two neighbouring vertices: one ancilla in |~0> controls
  // T_g on both stars, then is read out in the irrep basis (R1+ = vacuum).
  const int a2 = M.L.vertex_site(B.vertex);
  prepare_ancilla(run, a2, dft_matrix(M.G.order()), "prepare ~0");
  controlled_gauge_on(M, run, a2, A.vertex, [](int c) { return c; }, "W(region)");
  controlled_gauge(M, run, B.vertex, "W(region)");
  const LocalBasis basis = LocalBasis::irrep(M.G);
  FusionReport r = by_irrep(M.G, weighted_distribution(run, a2, basis));
  run.measure(a2, basis, "measure total charge", MeasureMode::Reset);
  return r;
}

// --------------------------------------------------------------------- dyons

RepeatStats apply_diagonal_repeat_until_success(const FiniteGroup& G, Run& run, int ancilla, int target,
                                                const std::vector<cd>& diag, long max_attempts) {
  const int d = G.order();
  if (static_cast<int>(diag.size()) != d) throw std::invalid_argument("diagonal has the wrong size");
  double scale = 0.0;
  for (cd x : diag) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw std::invalid_argument("zero operator cannot be applied");
  // D = (U0 + U1)/2 with U0,1 = exp(i(phi +- theta)), |d| = cos(theta).
  std::vector<cd> u0(d), u1(d);
  for (int g = 0; g < d; ++g) {
    cd x = diag[g] / scale;
    double th = std::acos(std::min(1.0, std::abs(x)));
    double ph = std::abs(x) > 0 ? std::arg(x) : 0.0;
    u0[g] = std::polar(1.0, ph + th);
    u1[g] = std::polar(1.0, ph - th);
  }
  Family fam(d, LocalOp::identity(d));
  fam[0] = LocalOp::diagonal(u0);
  fam[1] = LocalOp::diagonal(u1);
  const LocalBasis pm = LocalBasis::interference_x(G, 0, 1);
  const LocalOp prep(pm.vectors);

  RepeatStats stats;
  double weight = 0.0;
  for (auto& b : run.branches()) {
    if (!holds_identity(b.state, ancilla)) throw AncillaContamination("repeat-until-success ancilla is not in |e>");
    const SparseState saved = b.state;
    for (long attempt = 1;; ++attempt) {
      if (attempt > max_attempts) throw std::runtime_error("repeat-until-success exceeded the attempt cap");
      ++stats.attempts;
      b.single(ancilla, prep, "prepare +");
      b.controlled(ancilla, target, fam, "controlled U0/U1");
      auto p = outcome_probabilities(b.state, ancilla, pm);
      bool success;
      switch (run.policy().kind) {
        case OutcomePolicy::Kind::Sample: success = run.uniform() < p[0]; break;
        default: success = true; break;  // the loop terminates with probability one
      }
      if (attempt == 1) {
        stats.success_probability += b.probability * p[0];
        weight += b.probability;
      }
      const int k = success ? 0 : 1;
      if (p[k] < 1e-12) continue;
      b.state = project(b.state, ancilla, pm, k, MeasureMode::Reset);
      ++b.counts.measurements;
      b.outcomes.push_back(k);
      b.transcript.push_back({"measure +- (repeat until success)", {ancilla}, k, p[k], p});
      if (success) break;
      b.state = saved;
      b.note("restart from a fresh pair");
    }
  }
  if (weight > 0) stats.success_probability /= weight;
  run.track_support();
  return stats;
}

std::vector<cd> dyon_coefficients(const FiniteGroup& G, const std::string& which) {
  if (!is_s3(G)) throw std::invalid_argument("dyon operators are defined for S3");
  int cls;
  std::string label;
  if (which == "R1_1") {
    cls = class_of_name(G, "c+"), label = "Z3^2";
  } else if (which == "R2_1") {
    cls = class_of_name(G, "c+"), label = "Z3^1";
  } else if (which == "R4_1") {
    cls = class_of_name(G, "t0"), label = "Z2^1";
  } else {
    throw std::invalid_argument("unknown dyon label '" + which + "' (R1_1|R2_1|R4_1)");
  }
  const auto& irreps = G.centralizer_irreps(cls);
  for (const auto& R : irreps)
    if (R.label == label) return centralizer_projector_coeffs(G, cls, R, 0, 0);
  throw std::logic_error("centralizer irrep missing");
}

std::pair<AnyonHandle, AnyonHandle> create_dyon_pair(const Model& M, Run& run, const std::string& which, FaceId f,
                                                     RepeatStats* stats) {
  const auto coeffs = dyon_coefficients(M.G, which);
  const int cls = class_of_name(M.G, which == "R4_1" ? "t0" : "c+");
  const FaceId below{f.i - 1, f.j};
  if (!M.L.has_face(f) || !M.L.has_face(below)) throw std::out_of_range("dyon pair does not fit in the lattice");
  auto [hc, ho] = create_magnetic_pair(M, run, cls, f, Direction::Down);
  const int e = M.L.shared_edge(f, below);
  const VertexId v = M.L.edge(e).from;
  RepeatStats st = apply_diagonal_repeat_until_success(M.G, run, M.L.vertex_site(v), M.L.edge_site(e), coeffs);
  if (stats) *stats = st;
  AnyonHandle a{AnyonHandle::Kind::Dyonic, f, hc.base, v, hc.cls, 0, which};
  AnyonHandle b{AnyonHandle::Kind::Dyonic, below, ho.base, M.L.edge(e).to, ho.cls, 0, which};
  return {a, b};
}

// ------------------------------------------------------------ interferometry

FluxFluxReport interferometry_flux_flux(const OutcomePolicy& policy) {
  const Model M("s3", 3, 4);
  const FiniteGroup& G = M.G;
  const int tcls = class_of_name(G, "t0"), ccls = class_of_name(G, "c+");
  FluxFluxReport rep;
  rep.layout =
      "3x4 faces from |e...e>: [t] pair f(1,1)|f(1,2), partner moved to f(1,3); [c] pair f(2,2)|f(2,3); "
      "f(2,2) encircles f(1,1) counterclockwise through f(2,1) f(2,0) f(1,0) f(0,0) f(0,1) f(0,2) f(1,2)";
  auto experiment = [&](bool braid) {
    Run run(M.vacuum(), policy);
    auto [ta, tb] = create_magnetic_pair(M, run, tcls, {1, 1}, Direction::Right);
    move_flux(M, run, tb, Direction::Right);
    auto [ca, cb] = create_magnetic_pair(M, run, ccls, {2, 2}, Direction::Right);
    if (braid) {
      using D = Direction;
      move_flux_path(M, run, ca, {D::Left, D::Left, D::Down, D::Down, D::Right, D::Right, D::Up, D::Up});
      rep.moves = 9;
    }
    double p = flux_flux_probability(M, run, ca, cb);
    rep.peak_support = std::max(rep.peak_support, run.peak_support());
    return p;
  };
  rep.p_before = experiment(false);
  rep.p_after = experiment(true);

  const Model M2("s3", 2, 2);
  Run run(ground_state(M2), policy);
  auto [ca, cb] = create_magnetic_pair(M2, run, ccls, {0, 0}, Direction::Right);
  rep.p_before_ground = flux_flux_probability(M2, run, ca, cb);
  rep.peak_support = std::max(rep.peak_support, run.peak_support());
  return rep;
}

FluxChargeReport interferometry_flux_charge(const Model& M, int irrep, int h, const OutcomePolicy& policy) {
  const FiniteGroup& G = M.G;
  const int edge = M.L.h_edge(0, 0);
  const VertexId v = M.L.edge(edge).from;
  const int anc = M.L.vertex_site(v);
  // Interferometer qubit levels |e> and |q>; q = h unless h is trivial.
  const int q = h != G.identity() ? h : 1;
  Run base(ground_state(M), policy);
  create_electric_vacuum_pair(M, base, edge, irrep);

  auto hadamard_test = [&](const LocalBasis& readout) {
    Run run = base;
    prepare_ancilla(run, anc, LocalBasis::interference_x(G, G.identity(), q).vectors, "prepare psi_x+");
    controlled_gauge_on(M, run, anc, v, [&](int c) { return c == q ? h : -1; }, "controlled braid T_h");
    auto dist = weighted_distribution(run, anc, readout);
    run.measure(anc, readout, "measure " + readout.name, MeasureMode::Reset);
    return dist;
  };
  FluxChargeReport r;
  r.x_distribution = hadamard_test(LocalBasis::interference_x(G, G.identity(), q));
  r.y_distribution = hadamard_test(LocalBasis::interference_y(G, G.identity(), q));
  r.re_amp = r.x_distribution[0] - r.x_distribution[1];
  r.im_amp = r.y_distribution[0] - r.y_distribution[1];
  return r;
}

}  // namespace qd
