#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qd/anyon_qc.hpp"

using namespace qd;

namespace {

Vec random_qutrit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec v(3);
  for (int k = 0; k < 3; ++k) v(k) = cd(n(rng), n(rng));
  return v.normalized();
}

// Vacuum weight of one K^{t_m perp} step for the flux component t_k: the charge
// sees R2(t_m^-1) R2(t_k) = R2(t_m t_k), which fuses to the vacuum with weight
// |tr R2(t_m t_k)|^2 / |R2|^2 (1 when k = m, 1/4 otherwise).
double vacuum_weight(const FiniteGroup& G, int m, int k) {
  const Irrep& R = G.irreps()[G.irrep_index("R2")];
  return std::norm(R.characters[G.mul(s3::t(m), s3::t(k))]) / 4.0;
}

}  // namespace

TEST_CASE("encoded state bookkeeping") {
  EncodedState s;
  const int a = s.append_one(z_basis_state(1));
  const int b = s.append_one(x_basis_state(2));
  CHECK(s.num_qutrits() == 2);
  CHECK(std::abs(s.amplitude({a, b}, {1, 0}) - x_basis_state(2)(0)) < 1e-15);
  CHECK(s.probabilities(b, LogicalBasis::X)[2] == doctest::Approx(1.0));
  CHECK(s.collapse(a, LogicalBasis::Z, 1) == doctest::Approx(1.0));
  CHECK(!s.alive(a));
  CHECK(s.alive(b));
  CHECK(s.num_qutrits() == 1);
  CHECK(s.norm() == doctest::Approx(1.0));
  for (int j = 0; j < 3; ++j) {
    CHECK(x_basis_state(j).norm() == doctest::Approx(1.0));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(x_basis_state(j).dot(x_basis_state(k))) == doctest::Approx(j == k ? 1.0 : 0.0));
  }
}

TEST_CASE("braid tables realize the controlled sum") {
  const FiniteGroup G = build_s3();
  const BraidTables T(G);
  // Conjugating t_k by t_b gives t_{2b-k}.
  for (int b = 0; b < 3; ++b)
    for (int k = 0; k < 3; ++k) CHECK(T.conjugate(b, k) == ((2 * b - k) % 3 + 3) % 3);
  const auto S = T.sum(1), S2 = T.sum(2), Si = T.sum_inverse();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      CHECK(S[3 * j + k] == 3 * j + (j + k) % 3);
      CHECK(Si[3 * j + k] == 3 * j + ((k - j) % 3 + 3) % 3);
      CHECK(S2[3 * j + k] == Si[3 * j + k]);
      CHECK(Si[Si[3 * j + k]] == S[3 * j + k]);
    }
}

TEST_CASE("Pauli gates obey the Weyl relation on random states") {
  const BraidTables T(build_s3());
  std::mt19937_64 rng(4);
  const cd xi = root_of_unity(1, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec psi = random_qutrit(rng);
    EncodedState zx, xz;
    const int a = zx.append_one(psi), b = xz.append_one(psi);
    apply_x(zx, T, a), apply_z(zx, T, a);
    apply_z(xz, T, b), apply_x(xz, T, b);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(zx.amplitude({a}, {k}) - xi * xz.amplitude({b}, {k})) < 1e-12);
    // X|k> = |k+1>, Z|q> = xi^q |q>.
    EncodedState x, z;
    const int qx = x.append_one(psi), qz = z.append_one(psi);
    apply_x(x, T, qx), apply_z(z, T, qz);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(x.amplitude({qx}, {(k + 1) % 3}) - psi(k)) < 1e-12);
      CHECK(std::abs(z.amplitude({qz}, {k}) - root_of_unity(k, 3) * psi(k)) < 1e-12);
    }
  }
}

TEST_CASE("K-projection channels match the trace oracle") {
  const FiniteGroup G = build_s3();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec psi = random_qutrit(rng);
    for (int m = 0; m < 3; ++m) {
      EncodedState s;
      const int q = s.append_one(psi);
      const ChargeFusion f = k_perp_channels(G, s, q, m);
      double vac = 0.0, sum = 0.0;
      for (int k = 0; k < 3; ++k) vac += std::norm(psi(k)) * vacuum_weight(G, m, k);
      for (double p : f.probabilities) sum += p;
      CHECK(f.labels.at(0) == "R1+");
      CHECK(f.probabilities[0] == doctest::Approx(vac).epsilon(1e-12));
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      // Any non-vacuum channel removes t_m.
      for (size_t c = 1; c < f.probabilities.size(); ++c) {
        if (f.probabilities[c] < 1e-12) continue;
        EncodedState t = s;
        k_perp_select(G, t, q, m, static_cast<int>(c));
        CHECK(t.probabilities(q, LogicalBasis::Z)[m] < 1e-12);
      }
    }
  }
  const KProjectionReport r = k_projection_experiment(Backend::Abstract, 0);
  CHECK(r.channels[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(k_projection_experiment(Backend::Lattice, 0), BackendUnsupported);
}

TEST_CASE("basis preparation") {
  for (int j = 0; j < 3; ++j) {
    QcRun xr(OutcomePolicy::sample(0));
    const auto qx = xr.prepare_x(j);
    CHECK(xr.only().state.probabilities(qx.id, LogicalBasis::X)[j] == doctest::Approx(1.0).epsilon(1e-12));

    QcRun zr(OutcomePolicy::postselect(0));
    PreparationStats st;
    const auto qz = zr.prepare_z(j, &st);
    CHECK(zr.only().state.probabilities(qz.id, LogicalBasis::Z)[j] == doctest::Approx(1.0).epsilon(1e-12));
    // Two projections from |t~_0>: 1/2 survives the first, then 3/8 the second.
    CHECK(st.success_probability == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    CHECK(st.attempts == 1);

    QcRun sr(OutcomePolicy::sample(17 + j));
    const auto qs = sr.prepare_z(j, &st);
    CHECK(sr.only().state.probabilities(qs.id, LogicalBasis::Z)[j] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.attempts >= 1);
  }
  QcRun tiny(OutcomePolicy::sample(0));
  // A cap of zero attempts always fails.
  CHECK_THROWS_AS(tiny.prepare_z(0, nullptr, 0), RetryLimitExceeded);
}

TEST_CASE("magic states") {
  for (MagicKind k : {MagicKind::M1, MagicKind::M2}) {
    CHECK(magic_state(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(magic_state(k, Backend::Lattice), BackendUnsupported);
  }
  // M1 = 3^-1 sum_{j,k} |j, k, jk>.
  const Vec m1 = magic_state(MagicKind::M1);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(m1(j + 3 * k + 9 * ((j * k) % 3)) - 1.0 / 3.0) < 1e-15);
  QcRun run(OutcomePolicy::sample(0));
  CHECK(run.prepare_magic(MagicKind::M1).size() == 3);
  CHECK(run.prepare_magic(MagicKind::M2).size() == 2);
}

TEST_CASE("Toffoli on basis inputs") {
  SUBCASE("every row under enumeration") {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          QcRun run(OutcomePolicy::enumerate());
          auto qa = run.add(z_basis_state(a), 1)[0], qb = run.add(z_basis_state(b), 1)[0],
               qc = run.add(z_basis_state(c), 1)[0];
          const auto out = toffoli(run, qa, qb, qc);
          CHECK(run.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
          for (const auto& br : run.branches())
            CHECK(std::abs(br.state.amplitude({out[0].id, out[1].id, out[2].id}, {a, b, (a * b + c) % 3}) - 1.0) <
                  1e-9);
        }
  }
  SUBCASE("sampled and postselected runs") {
    for (const OutcomePolicy& pol : {OutcomePolicy::sample(5), OutcomePolicy::postselect(0)}) {
      QcRun run(pol);
      auto qa = run.add(z_basis_state(2), 1)[0], qb = run.add(z_basis_state(2), 1)[0],
           qc = run.add(z_basis_state(1), 1)[0];
      const auto out = toffoli(run, qa, qb, qc);
      CHECK(std::abs(run.only().state.amplitude({out[0].id, out[1].id, out[2].id}, {2, 2, 2}) - 1.0) < 1e-9);
      CHECK(run.only().stats.count("repair_rounds") == 1);
    }
  }
  SUBCASE("superposed inputs are mapped linearly") {
    QcRun run(OutcomePolicy::sample(2));
    auto qa = run.add(x_basis_state(0), 1)[0], qb = run.add(x_basis_state(0), 1)[0], qc = run.add(z_basis_state(0), 1)[0];
    const auto out = toffoli(run, qa, qb, qc);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        CHECK(std::abs(std::abs(run.only().state.amplitude({out[0].id, out[1].id, out[2].id}, {a, b, (a * b) % 3})) -
                       1.0 / 3.0) < 1e-9);
  }
}

TEST_CASE("x-preparation readout agrees across backends") {
  for (const std::vector<int>& js : std::vector<std::vector<int>>{{0}, {2}, {1, 2}}) {
    for (LogicalBasis basis : {LogicalBasis::Z, LogicalBasis::X}) {
      const auto a = x_prep_readout(Backend::Abstract, js, basis);
      const auto l = x_prep_readout(Backend::Lattice, js, basis);
      REQUIRE(a.size() == l.size());
      for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(l[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("abstract interferometry amplitudes") {
  const FiniteGroup G = build_s3();
  CHECK(abstract_flux_flux_probability(G, false) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(abstract_flux_flux_probability(G, true) == doctest::Approx(0.5).epsilon(1e-12));
  for (size_t r = 0; r < G.irreps().size(); ++r)
    for (int h = 0; h < 6; ++h) {
      const Irrep& R = G.irreps()[r];
      CHECK(std::abs(abstract_flux_charge_amplitude(G, static_cast<int>(r), h) - R.characters[h] / double(R.dim)) <
            1e-12);
    }
}
