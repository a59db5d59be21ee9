#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qd/anyon_qc.hpp"
#include "qd/protocols.hpp"

using namespace qd;

namespace {

// Independent reference: the product of vertex projectors applied to |e...e>,
// which is flux free, so the face projectors act trivially.
SparseState projector_ground_state(const Model& M) {
  SparseState s = M.vacuum();
  for (int v = 0; v < M.L.num_vertices(); ++v) {
    s = apply_A(M, s, M.L.vertex(v));
    s.normalize();
  }
  return s;
}

void check_ground_state(const Model& M, const SparseState& s) {
  for (int v = 0; v < M.L.num_vertices(); ++v)
    CHECK(vertex_projector_expect(M, s, M.L.vertex(v)) == doctest::Approx(1.0).epsilon(1e-9));
  for (int f = 0; f < M.L.num_faces(); ++f)
    CHECK(face_projector_expect(M, s, M.L.face(f)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(energy(M, s) == doctest::Approx(-double(M.L.num_vertices() + M.L.num_faces())).epsilon(1e-9));
  CHECK(s.support() == static_cast<size_t>(std::pow(M.G.order(), M.L.num_vertices() - 1)));
}

}  // namespace

TEST_CASE("ground-state synthesis") {
  SUBCASE("S3 1x1 under every outcome chain") {
    const Model M("s3", 1, 1);
    const SparseState ref = projector_ground_state(M);
    Run run = ground_state_synthesis(M, OutcomePolicy::enumerate());
    CHECK(run.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    // The last vertex is fixed by the others, so |V| - 1 vertices are measured.
    CHECK(run.branches().size() == static_cast<size_t>(std::pow(6, M.L.num_vertices() - 1)));
    double worst = 0.0;
    for (const auto& b : run.branches()) {
      worst = std::max(worst, 1.0 - fidelity(b.state, ref));
      for (const auto& t : b.transcript)
        if (t.outcome >= 0) CHECK(t.probability == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
    CHECK(worst < 1e-12);
    check_ground_state(M, run.branches().front().state);
  }
  SUBCASE("S3 1x2 sampled") {
    const Model M("s3", 1, 2);
    Run run = ground_state_synthesis(M, OutcomePolicy::sample(3));
    check_ground_state(M, run.only().state);
    CHECK(fidelity(run.only().state, projector_ground_state(M)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Z2 2x2 and 3x3") {
    for (int n : {2, 3}) {
      const Model M("z2", n, n);
      check_ground_state(M, ground_state(M));
    }
  }
  SUBCASE("postselecting an out-of-range outcome fails") {
    CHECK_THROWS_AS(ground_state_synthesis(Model("z2", 1, 1), OutcomePolicy::postselect(7)), PostselectionFailure);
  }
}

TEST_CASE("boundary product copied to a face ancilla matches the corner walk") {
  const Model M("s3", 1, 1);
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> pick(0, 5);
  auto mul = [&](int a, int b) { return M.G.mul(a, b); };
  auto inv = [&](int a) { return M.G.inv(a); };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> cfg(M.L.num_sites(), 0), edges(M.L.num_edges());
    for (int e = 0; e < M.L.num_edges(); ++e) cfg[e] = edges[e] = pick(rng);
    for (const VertexId& base : M.L.corners({0, 0})) {
      Run run(init_basis(M.L.num_sites(), 6, cfg), OutcomePolicy::sample(0));
      flux_to_ancilla(M, run, {0, 0}, base);
      const SparseState& s = run.only().state;
      REQUIRE(s.support() == 1);
      const int anc = s.get(s.amplitudes().begin()->first, M.L.face_site({0, 0}));
      CHECK(anc == oracle::walk_flux(M.L, edges, {0, 0}, base, mul, inv));
      flux_to_ancilla_inverse(M, run, {0, 0}, base);
      CHECK(run.only().state.amplitude(cfg) == cd(1.0));
    }
  }
}

TEST_CASE("magnetic pairs: creation, transport and fusion") {
  const Model M("s3", 1, 2);
  const SparseState gs = ground_state(M);
  for (const char* rep : {"t0", "c+"}) {
    CAPTURE(rep);
    const int cls = M.G.class_of(M.G.element_index(rep));
    Run run(gs, OutcomePolicy::enumerate());
    auto [a, b] = create_magnetic_pair(M, run, cls, {0, 0}, Direction::Right);
    for (const auto& br : run.branches()) {
      CHECK(flux_class_distribution(M, br.state, a.face)[cls] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(flux_class_distribution(M, br.state, b.face)[cls] == doctest::Approx(1.0).epsilon(1e-12));
      // Vertices stay gauge invariant: the pair is chargeless.
      for (int v = 0; v < M.L.num_vertices(); ++v)
        CHECK(vertex_projector_expect(M, br.state, M.L.vertex(v)) == doctest::Approx(1.0).epsilon(1e-9));
    }
    FusionReport fr = fuse_magnetic_pair(M, run, a, b);
    CHECK(fr.vacuum_probability == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& br : run.branches()) CHECK(fidelity(br.state, gs) == doctest::Approx(1.0).epsilon(1e-9));
  }
  Run off(gs, OutcomePolicy::sample(0));
  CHECK_THROWS(create_magnetic_pair(M, off, 1, {0, 1}, Direction::Right));
}

TEST_CASE("contaminated ancillas are detected") {
  const Model M("s3", 1, 1);
  std::vector<int> cfg(M.L.num_sites(), 0);
  cfg[M.L.face_site({0, 0})] = s3::t1;
  Run run(init_basis(M.L.num_sites(), 6, cfg), OutcomePolicy::sample(0));
  CHECK_THROWS_AS(require_identity(run, M.L.face_site({0, 0}), "test"), AncillaContamination);
  CHECK_NOTHROW(require_identity(run, M.L.vertex_site({0, 0}), "test"));
  std::vector<int> vcfg(M.L.num_sites(), 0);
  vcfg[M.L.vertex_site({0, 0})] = s3::cp;
  Run run2(init_basis(M.L.num_sites(), 6, vcfg), OutcomePolicy::sample(0));
  CHECK_THROWS_AS(create_electric_pair_probabilistic(M, run2, M.L.h_edge(0, 0)), AncillaContamination);
}

TEST_CASE("electric pairs") {
  const Model M("s3", 1, 1);
  const SparseState gs = ground_state(M);
  const int edge = M.L.h_edge(0, 0);
  SUBCASE("W_R2 by the adaptive protocol") {
    const int r2 = M.G.irrep_index("R2");
    Run run(gs, OutcomePolicy::enumerate());
    create_electric_vacuum_pair(M, run, edge, r2);
    SparseState ref = gs;
    apply_single(ref, M.L.edge_site(edge), LocalOp::diagonal(charge_creation_coeffs(M.G, M.G.irreps()[r2]), false));
    ref.normalize();
    double plus = 0.0;
    for (const auto& b : run.branches()) {
      CHECK(fidelity(b.state, ref) >= 1.0 - 1e-9);
      if (b.outcomes.at(0) == 0) plus += b.probability;
    }
    CHECK(plus == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(run.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("one-dimensional charge pair is charged at both ends and fuses to the vacuum") {
    const int sign = M.G.irrep_index("R1-");
    Run run(gs, OutcomePolicy::sample(0));
    auto [a, b] = create_electric_vacuum_pair(M, run, edge, sign);
    CHECK(vertex_projector_expect(M, run.only().state, a.vertex) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(vertex_projector_expect(M, run.only().state, b.vertex) == doctest::Approx(0.0).epsilon(1e-12));
    Run fuse = run;
    FusionReport fr = fuse_electric_pair(M, fuse, a, b);
    CHECK(fr.vacuum_probability == doctest::Approx(1.0).epsilon(1e-9));
    // Carrying one charge onto the other reads out the carried charge and
    // leaves the ground state behind.
    FusionReport tr = transport_onto_partner(M, run, a, b);
    CHECK(tr.distribution[sign] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fidelity(run.only().state, gs) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("transporting an R2 charge onto its partner restores the ground state") {
    const int r2 = M.G.irrep_index("R2");
    Run run(gs, OutcomePolicy::enumerate());
    auto [a, b] = create_electric_vacuum_pair(M, run, edge, r2);
    FusionReport tr = transport_onto_partner(M, run, a, b);
    CHECK(tr.distribution[r2] == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& br : run.branches()) CHECK(fidelity(br.state, gs) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("probabilistic creation draws every irrep-basis outcome with probability 1/|G|") {
    Run run(gs, OutcomePolicy::enumerate());
    create_electric_pair_probabilistic(M, run, edge);
    CHECK(run.branches().size() == 6);
    for (const auto& b : run.branches()) CHECK(b.probability == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
}

TEST_CASE("dyon pairs carry the requested flux") {
  const Model M("s3", 2, 1);
  const SparseState gs = ground_state(M);
  for (const char* w : {"R1_1", "R4_1"}) {
    CAPTURE(w);
    Run run(gs, OutcomePolicy::sample(1));
    RepeatStats st;
    auto [a, b] = create_dyon_pair(M, run, w, {1, 0}, &st);
    CHECK(st.attempts >= 1);
    CHECK(flux_class_distribution(M, run.only().state, a.face)[a.cls] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(flux_class_distribution(M, run.only().state, b.face)[b.cls] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS(dyon_coefficients(M.G, "R9_9"));
}

TEST_CASE("flux-charge interferometry returns Re chi/|R|") {
  const Model M("s3", 1, 1);
  for (const auto& [r, h] : std::vector<std::pair<const char*, const char*>>{{"R2", "c+"}, {"R1-", "t0"}, {"R2", "t1"}, {"R1+", "c-"}}) {
    CAPTURE(r);
    CAPTURE(h);
    const int ri = M.G.irrep_index(r), hi = M.G.element_index(h);
    const Irrep& R = M.G.irreps()[ri];
    FluxChargeReport fc = interferometry_flux_charge(M, ri, hi, OutcomePolicy::enumerate());
    CHECK(fc.re_amp == doctest::Approx((R.characters[hi] / double(R.dim)).real()).epsilon(1e-9));
    CHECK(fc.re_amp == doctest::Approx(abstract_flux_charge_amplitude(M.G, ri, hi).real()).epsilon(1e-9));
    CHECK(fc.im_amp == doctest::Approx(abstract_flux_charge_amplitude(M.G, ri, hi).imag()).epsilon(1e-9));
  }
}
