#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qd/model_ops.hpp"
#include "qd/protocols.hpp"

using namespace qd;

namespace {

// Random superposition of a few edge configurations (ancillas in |e>).
SparseState random_edges(const Model& M, std::mt19937_64& rng, int terms) {
  SparseState s(M.L.num_sites(), M.G.order());
  std::uniform_int_distribution<int> g(0, M.G.order() - 1);
  std::normal_distribution<double> n;
  for (int t = 0; t < terms; ++t) {
    Key k{};
    for (int e = 0; e < M.L.num_edges(); ++e) s.set(k, e, g(rng));
    s.add(k, cd(n(rng), n(rng)));
  }
  s.normalize();
  return s;
}

std::vector<int> edge_values(const Model& M, const SparseState& s, const Key& k) {
  std::vector<int> v(M.L.num_edges());
  for (int e = 0; e < M.L.num_edges(); ++e) v[e] = s.get(k, e);
  return v;
}

// T_g(v) on one configuration, from the edge endpoints.
Key gauge_key(const Model& M, const SparseState& s, Key k, VertexId v, int g) {
  for (int e = 0; e < M.L.num_edges(); ++e) {
    const Edge& E = M.L.edge(e);
    if (E.from == v) s.set(k, e, M.G.mul(g, s.get(k, e)));
    else if (E.to == v) s.set(k, e, M.G.mul(s.get(k, e), M.G.inv(g)));
  }
  return k;
}

double state_err(const SparseState& a, const SparseState& b) {
  double d = 0.0;
  for (const auto& [k, x] : a.amplitudes()) d = std::max(d, std::abs(x - b.amplitude(b.config_of(k))));
  for (const auto& [k, y] : b.amplitudes()) d = std::max(d, std::abs(y - a.amplitude(a.config_of(k))));
  return d;
}

}  // namespace

TEST_CASE("gauge transformations match the edge-endpoint rule") {
  const Model M("s3", 1, 2);
  std::mt19937_64 rng(1);
  const SparseState s = random_edges(M, rng, 8);
  for (int vi = 0; vi < M.L.num_vertices(); ++vi)
    for (int g = 0; g < 6; ++g) {
      const VertexId v = M.L.vertex(vi);
      SparseState got = s;
      apply_gauge(M, got, v, g);
      SparseState want(s.num_sites(), s.dim());
      for (const auto& [k, a] : s.amplitudes()) want.add(gauge_key(M, s, k, v, g), a);
      CHECK(state_err(got, want) < 1e-14);
      // T_g T_h = T_gh
      for (int h = 0; h < 6; ++h) {
        SparseState x = s, y = s;
        apply_gauge(M, x, v, h);
        apply_gauge(M, x, v, g);
        apply_gauge(M, y, v, M.G.mul(g, h));
        CHECK(state_err(x, y) < 1e-14);
      }
    }
}

TEST_CASE("boundary products agree with an explicit corner walk") {
  for (const char* group : {"s3", "z3"}) {
    const Model M(group, 2, 2);
    std::mt19937_64 rng(5);
    const SparseState s = random_edges(M, rng, 20);
    auto mul = [&](int a, int b) { return M.G.mul(a, b); };
    auto inv = [&](int a) { return M.G.inv(a); };
    for (const auto& [k, a] : s.amplitudes())
      for (int fi = 0; fi < M.L.num_faces(); ++fi) {
        const FaceId f = M.L.face(fi);
        for (const VertexId& base : M.L.corners(f))
          CHECK(config_flux(M, s, k, f, base) == oracle::walk_flux(M.L, edge_values(M, s, k), f, base, mul, inv));
      }
  }
}

TEST_CASE("flux is gauge covariant: T_g(base) conjugates B_l") {
  const Model M("s3", 2, 2);
  std::mt19937_64 rng(9);
  const SparseState s = random_edges(M, rng, 10);
  for (const auto& [k, a] : s.amplitudes())
    for (int fi = 0; fi < 4; ++fi) {
      const FaceId f = M.L.face(fi);
      for (const VertexId& base : M.L.corners(f)) {
        const int l = config_flux(M, s, k, f, base);
        for (int g = 0; g < 6; ++g) {
          // Transform at the base: the flux is conjugated.
          CHECK(config_flux(M, s, gauge_key(M, s, k, base, g), f, base) == M.G.conjugate(g, l));
          // Transform at any other vertex: the flux is unchanged.
          for (int vi = 0; vi < M.L.num_vertices(); ++vi) {
            const VertexId v = M.L.vertex(vi);
            if (v == base) continue;
            CHECK(config_flux(M, s, gauge_key(M, s, k, v, g), f, base) == l);
          }
        }
      }
    }
}

TEST_CASE("vertex projector is idempotent and its expectation is consistent") {
  const Model M("s3", 1, 1);
  std::mt19937_64 rng(2);
  const SparseState s = random_edges(M, rng, 12);
  for (int vi = 0; vi < M.L.num_vertices(); ++vi) {
    const VertexId v = M.L.vertex(vi);
    const SparseState once = apply_A(M, s, v);
    const SparseState twice = apply_A(M, once, v);
    CHECK(state_err(once, twice) < 1e-13);
    CHECK(vertex_projector_expect(M, s, v) == doctest::Approx(std::real(inner(s, once))).epsilon(1e-12));
    CHECK(vertex_projector_expect(M, once, v) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("flux projectors resolve the identity") {
  const Model M("s3", 1, 2);
  std::mt19937_64 rng(4);
  const SparseState s = random_edges(M, rng, 15);
  const FaceId f{0, 1};
  const auto p = flux_measure(M, s, f, {0, 1});
  double sum = 0.0;
  for (int l = 0; l < 6; ++l) {
    sum += p[l];
    CHECK(apply_flux_projector(M, s, f, {0, 1}, l).norm2() == doctest::Approx(p[l]).epsilon(1e-12));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  const auto cls = flux_class_distribution(M, s, f);
  CHECK(cls[0] == doctest::Approx(p[s3::e]));
  CHECK(cls[M.G.class_of(s3::cp)] == doctest::Approx(p[s3::cp] + p[s3::cm]));
  CHECK(face_projector_expect(M, s, f) == doctest::Approx(p[s3::e]));
}

TEST_CASE("ground state energy and an R operator on a shared edge") {
  const Model M("s3", 1, 2);
  const SparseState gs = ground_state(M);
  CHECK(energy(M, gs) == doctest::Approx(ground_energy(M)).epsilon(1e-12));
  CHECK(ground_energy(M) == doctest::Approx(-(6.0 + 2.0)));
  // Right multiplication of the shared edge by c+ creates [c] fluxes on both faces.
  SparseState x = gs;
  apply_single(x, M.L.shared_edge({0, 0}, {0, 1}), right_op(M.G, s3::cp));
  const int c = M.G.class_of(s3::cp);
  CHECK(flux_class_distribution(M, x, {0, 0})[c] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flux_class_distribution(M, x, {0, 1})[c] == doctest::Approx(1.0).epsilon(1e-12));
  // The edge's end vertex sees R_{c+} conjugated by T_g; only the centralizer of
  // c+ (3 of 6 elements) leaves it unchanged, so <A> drops to 1/2 there.
  CHECK(energy(M, x) == doctest::Approx(ground_energy(M) + 2.0 + 0.5).epsilon(1e-12));
}

TEST_CASE("multiplication operators") {
  const FiniteGroup G = build_s3();
  for (int g = 0; g < 6; ++g) {
    CHECK((left_op(G, g).matrix - G.left_matrix(g)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((right_op(G, g).matrix - G.right_matrix(g)).cwiseAbs().maxCoeff() == 0.0);
  }
  const Family fam = left_family(G, [](int c) { return c == 0 ? -1 : c; });
  CHECK(fam[0].is_identity());
  CHECK((fam[3].matrix - G.left_matrix(3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Model("z2", 1, 1).vacuum().support() == 1);
}
