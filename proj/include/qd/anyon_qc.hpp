// Computation with qutrits encoded in [t]-flux pairs of D(S3).
//
// The abstract backend keeps a dense state over logical qutrits and realizes
// braids as flux-pair conjugations taken from the quantum double; electric
// ancilla pairs enter through the fusion-channel measure.  On top of it sit the
// logical Clifford gates, basis preparation and measurement, the two magic
// states and the adaptive Toffoli.  The lattice backend runs the single- and
// two-qutrit experiments that both backends can host, for cross-checking.
#pragma once

#include <array>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qd/protocols.hpp"

namespace qd {

enum class LogicalBasis { Z, X };
enum class Backend { Abstract, Lattice };
enum class MagicKind { M1, M2 };

// Handle of an encoded qutrit |t_j, t_j^-1>; the id is stable for the lifetime of a run.
struct LogicalQutrit {
  int id = -1;
  Backend backend = Backend::Abstract;
};

class BackendUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RetryLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense amplitudes over the live qutrits; the qutrit at position p has stride
// 3^p.  Measuring a qutrit removes it without renumbering the others.
class EncodedState {
 public:
  EncodedState();

  int num_qutrits() const { return static_cast<int>(id_at_.size()); }
  const Vec& amplitudes() const { return v_; }
  bool alive(int id) const { return id >= 0 && id < static_cast<int>(pos_of_.size()) && pos_of_[id] >= 0; }
  const std::vector<int>& ids() const { return id_at_; }  // position order

  // Appends `count` qutrits in the joint state (first new qutrit least significant).
  std::vector<int> append(const Vec& joint, int count);
  int append_one(const Vec& local) { return append(local, 1)[0]; }
  // Amplitude of a basis state; `ids` must list every live qutrit.
  cd amplitude(const std::vector<int>& ids, const std::vector<int>& values) const;

  // (x, y) -> table[3x + y] as a pair (x', y') encoded 3x' + y'.
  void permute2(int a, int b, const std::array<int, 9>& table);
  void phase1(int a, const std::array<cd, 3>& phases);
  // Per-value multiplication of one qutrit by a (not necessarily unitary) weight.
  void weight1(int a, const std::array<cd, 3>& w);

  std::vector<double> probabilities(int id, LogicalBasis basis) const;
  // Projects onto outcome k, removes the qutrit and renormalizes; returns the probability.
  double collapse(int id, LogicalBasis basis, int k);
  double norm() const { return v_.norm(); }
  void normalize();

 private:
  int pos(int id) const;
  long stride(int id) const;

  Vec v_;
  std::vector<int> pos_of_;  // by id, -1 once removed
  std::vector<int> id_at_;   // by position
};

// |t~_j> = 3^-1/2 sum_k xi^{-jk} |t_k>.
Vec x_basis_state(int j);
Vec z_basis_state(int j);
// Injected resource states (abstract backend only).
Vec magic_state(MagicKind kind, Backend backend = Backend::Abstract);

// Label maps of the braids on [t] pairs, built from flux-pair conjugation.
class BraidTables {
 public:
  explicit BraidTables(const FiniteGroup& G);

  // Label of the pair (t_k, t_k^-1) after flux t_b encircles both members.
  int conjugate(int b, int k) const { return conj_[b][k]; }
  // Primitive (a): the target flux encircles a |t_0> ancilla pair, the ancilla
  // flux encircles the target pair, then the two pairs are swapped.  Throws if
  // the ancilla does not end in t_0.
  int ancilla_doubling(int k) const;
  // Primitive (b): the control flux encircles both members of the target pair.
  int control_braid(int j, int k) const { return conjugate(j, k); }
  // Sigma^-1 = (b) after (a), and Sigma^power (power taken mod 3).
  std::array<int, 9> sum_inverse() const;
  std::array<int, 9> sum(int power) const;

 private:
  std::array<std::array<int, 3>, 3> conj_{};
};

// Gates on a single encoded state.
void apply_sum(EncodedState& s, const BraidTables& T, int control, int target, int power = 1);
// X^power via a controlled sum from a |t_power> ancilla, which is then discarded.
void apply_x(EncodedState& s, const BraidTables& T, int q, int power = 1);
// Z^power via a controlled sum onto a |t~_power> ancilla, which is then discarded.
void apply_z(EncodedState& s, const BraidTables& T, int q, int power = 1);

// One projection onto K^{t_m perp}: the flux of q encircles a charge of a
// vacuum R2 pair, T_{t_m^-1} acts on that charge, and the pair is fused.
// Channel order follows the irreps of G (0 = vacuum).
struct ChargeFusion {
  std::vector<std::string> labels;
  std::vector<double> probabilities;
};
ChargeFusion k_perp_channels(const FiniteGroup& G, const EncodedState& s, int q, int m);
// Applies the channel-c branch (unnormalized weights, then renormalized); returns its probability.
double k_perp_select(const FiniteGroup& G, EncodedState& s, int q, int m, int channel);

struct QcBranch {
  EncodedState state;
  double probability = 1.0;
  std::vector<int> outcomes;
  std::map<std::string, double> stats;
};

struct PreparationStats {
  long attempts = 0;
  double success_probability = 1.0;  // probability of success on one attempt sequence
};

// A computation on the abstract backend; measurements split or sample according
// to the outcome policy, exactly like a lattice run.
class QcRun {
 public:
  explicit QcRun(OutcomePolicy policy);

  std::vector<QcBranch>& branches() { return branches_; }
  const std::vector<QcBranch>& branches() const { return branches_; }
  QcBranch& only();
  const OutcomePolicy& policy() const { return policy_; }
  const FiniteGroup& group() const { return G_; }
  const BraidTables& braids() const { return T_; }
  double total_probability() const;
  double uniform();

  // Appends the same local state on every branch.
  std::vector<LogicalQutrit> add(const Vec& joint, int count);
  LogicalQutrit prepare_x(int j);
  // |t_j> from |t~_0> by K^{t_m perp} projections (m != j); a vacuum fusion
  // discards the qutrit and restarts.  Non-sampling policies take the success
  // branch directly and record its probability.
  LogicalQutrit prepare_z(int j, PreparationStats* stats = nullptr, long max_attempts = 1000);
  std::vector<LogicalQutrit> prepare_magic(MagicKind kind);

  void x(LogicalQutrit q, int power = 1);
  void z(LogicalQutrit q, int power = 1);
  void sum(LogicalQutrit control, LogicalQutrit target, int power = 1);
  void measure(LogicalQutrit q, LogicalBasis basis);
  // Measures on one branch only (used inside adaptive steps); returns the outcome.
  int measure_branch(QcBranch& b, int id, LogicalBasis basis, int forced = -1);

  template <class F>
  void each(F&& f) {
    for (auto& b : branches_) f(b);
  }

 private:
  OutcomePolicy policy_;
  FiniteGroup G_;
  BraidTables T_;
  std::mt19937_64 rng_;
  std::vector<QcBranch> branches_;
};

// |a,b,c> -> |a,b,ab+c>: magic state M1, three controlled sums, Z/Z/X
// measurements, Clifford corrections and M2 phase repair until the repair
// counts n_ab satisfy n_ab = m5 ab (mod 3).  Sampling draws the repair outcomes;
// other policies use the shortest successful repair sequence.  Branch stats:
// m1, m3, m5, repair_rounds.  Returns the output qutrits.
std::array<LogicalQutrit, 3> toffoli(QcRun& run, LogicalQutrit a, LogicalQutrit b, LogicalQutrit c,
                                     long max_rounds = 1000000);

// ---- experiments hosted by both backends ----
// X-basis preparation of one or two qutrits followed by a readout of all of
// them; the distribution is over joint outcomes (first qutrit most significant).
std::vector<double> x_prep_readout(Backend backend, const std::vector<int>& js, LogicalBasis basis);

// One K^{t_m perp} projection on |t~_0>: fusion channel probabilities and the
// Z distribution of the qutrit given each channel (empty when impossible).
// Abstract backend only.
struct KProjectionReport {
  std::vector<double> channels;
  std::vector<std::vector<double>> z_given_channel;
};
KProjectionReport k_projection_experiment(Backend backend, int m);

// Abstract counterparts of the two interferometry experiments, from the monodromy.
// Probability of (|c+> - |c->)/sqrt2 for the fused [c] flux, with or without
// one member encircling a [t] flux of a chargeless [t] pair.
double abstract_flux_flux_probability(const FiniteGroup& G, bool braid);
// <1_R| (flux h around one charge) |1_R>.
cd abstract_flux_charge_amplitude(const FiniteGroup& G, int irrep, int h);

}  // namespace qd
