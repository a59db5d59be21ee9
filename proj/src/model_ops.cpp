#include "qd/model_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace qd {

SparseState Model::vacuum() const {
  return init_basis(L.num_sites(), G.order(), std::vector<int>(L.num_sites(), G.identity()));
}

LocalOp left_op(const FiniteGroup& G, int g) { return LocalOp::permutation(G.left_regular(g)); }
LocalOp right_op(const FiniteGroup& G, int g) { return LocalOp::permutation(G.right_regular(g)); }

static Family make_family(const FiniteGroup& G, const std::function<int(int)>& element_of_control, bool left) {
  Family f;
  f.reserve(G.order());
  for (int c = 0; c < G.order(); ++c) {
    int g = element_of_control(c);
    if (g < 0 || g == G.identity())
      f.push_back(LocalOp::identity(G.order()));
    else
      f.push_back(left ? left_op(G, g) : right_op(G, g));
  }
  return f;
}

Family left_family(const FiniteGroup& G, const std::function<int(int)>& element_of_control) {
  return make_family(G, element_of_control, true);
}

Family right_family(const FiniteGroup& G, const std::function<int(int)>& element_of_control) {
  return make_family(G, element_of_control, false);
}

Family phase_family(const FiniteGroup& G, const std::function<cd(int, int)>& phase) {
  Family f;
  f.reserve(G.order());
  for (int c = 0; c < G.order(); ++c) {
    std::vector<cd> d(G.order());
    for (int x = 0; x < G.order(); ++x) d[x] = phase(c, x);
    f.push_back(LocalOp::diagonal(d));
  }
  return f;
}

namespace {

struct StarSites {
  std::vector<int> out, in;
};

StarSites star_sites(const Model& M, VertexId v) {
  StarSites s;
  for (const auto& se : M.L.vertex_star(v)) (se.out ? s.out : s.in).push_back(M.L.edge_site(se.edge));
  return s;
}

void gauge_key(const FiniteGroup& G, const SparseState& s, const StarSites& st, Key& k, int g) {
  const int gi = G.inv(g);
  for (int e : st.out) s.set(k, e, G.mul(g, s.get(k, e)));
  for (int e : st.in) s.set(k, e, G.mul(s.get(k, e), gi));
}

}  // namespace

void apply_gauge(const Model& M, SparseState& s, VertexId v, int g) {
  if (g == M.G.identity()) return;
  StarSites st = star_sites(M, v);
  apply_permutation(s, [&](Key& k) { gauge_key(M.G, s, st, k, g); });
}

SparseState apply_A(const Model& M, const SparseState& s, VertexId v) {
  StarSites st = star_sites(M, v);
  SparseState out(s.num_sites(), s.dim(), s.prune_threshold());
  auto& m = out.amplitudes();
  m.reserve(s.support());
  const double w = 1.0 / M.G.order();
  for (const auto& [k, a] : s.amplitudes())
    for (int g = 0; g < M.G.order(); ++g) {
      Key nk = k;
      gauge_key(M.G, s, st, nk, g);
      m[nk] += w * a;
    }
  out.prune();
  return out;
}

double vertex_projector_expect(const Model& M, const SparseState& s, VertexId v) {
  StarSites st = star_sites(M, v);
  const auto& amps = s.amplitudes();
  long double sum = 0.0;  // only the real part survives the sum over g
  for (const auto& [k, a] : amps)
    for (int g = 0; g < M.G.order(); ++g) {
      Key nk = k;
      gauge_key(M.G, s, st, nk, g);
      auto it = amps.find(nk);
      if (it != amps.end()) sum += (std::conj(it->second) * a).real();
    }
  return static_cast<double>(sum) / (M.G.order() * s.norm2());
}

int config_flux(const Model& M, const SparseState& s, const Key& k, FaceId f, VertexId base) {
  OrientedCycle cyc = M.L.face_cycle(f, base);
  int acc = M.G.identity();
  for (const auto& ce : cyc.edges) {
    int x = s.get(k, M.L.edge_site(ce.edge));
    int h = ce.o > 0 ? M.G.inv(x) : x;
    acc = M.G.mul(h, acc);
  }
  return acc;
}

std::vector<double> flux_measure(const Model& M, const SparseState& s, FaceId f, VertexId base) {
  std::vector<long double> acc(M.G.order(), 0.0);
  for (const auto& [k, a] : s.amplitudes()) acc[config_flux(M, s, k, f, base)] += std::norm(a);
  std::vector<double> p(acc.begin(), acc.end());
  const double n = s.norm2();
  for (double& x : p) x /= n;
  return p;
}

std::vector<double> flux_class_distribution(const Model& M, const SparseState& s, FaceId f) {
  std::vector<double> pc(M.G.classes().size(), 0.0);
  auto p = flux_measure(M, s, f, VertexId{f.i, f.j});
  for (int g = 0; g < M.G.order(); ++g) pc[M.G.class_of(g)] += p[g];
  return pc;
}

SparseState apply_flux_projector(const Model& M, const SparseState& s, FaceId f, VertexId base, int l) {
  SparseState out = s;
  apply_diagonal(out, [&](const Key& k) { return config_flux(M, s, k, f, base) == l ? cd{1.0} : cd{0.0}; });
  return out;
}

double face_projector_expect(const Model& M, const SparseState& s, FaceId f) {
  return flux_measure(M, s, f, VertexId{f.i, f.j})[M.G.identity()];
}

double energy(const Model& M, const SparseState& s) {
  double e = 0.0;
  for (int v = 0; v < M.L.num_vertices(); ++v) e -= vertex_projector_expect(M, s, M.L.vertex(v));
  for (int f = 0; f < M.L.num_faces(); ++f) e -= face_projector_expect(M, s, M.L.face(f));
  return e;
}

double ground_energy(const Model& M) { return -static_cast<double>(M.L.num_vertices() + M.L.num_faces()); }

}  // namespace qd
