// Sparse state vectors over group-valued site configurations, local and
// controlled operations, projective measurements and outcome policies.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qd/group.hpp"

namespace qd {

using Key = std::array<uint64_t, 4>;

// Fixed (unseeded) hash: with a deterministic hash the map's iteration order
// depends only on the sequence of operations, so floating-point reductions and
// hence reports are reproducible bit for bit.
struct KeyHash {
  size_t operator()(const Key& k) const noexcept {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t w : k) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
      h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
      h ^= h >> 31;
    }
    return static_cast<size_t>(h);
  }
};

class SparseState {
 public:
  using Map = std::unordered_map<Key, cd, KeyHash>;

  SparseState(int num_sites, int dim, double prune = 1e-12);

  int num_sites() const { return num_sites_; }
  int dim() const { return dim_; }
  double prune_threshold() const { return prune_; }
  static int max_sites(int dim);

  int get(const Key& k, int site) const {
    return static_cast<int>((k[site / per_word_] >> shift(site)) & mask_);
  }
  void set(Key& k, int site, int value) const {
    uint64_t& w = k[site / per_word_];
    w = (w & ~(mask_ << shift(site))) | (static_cast<uint64_t>(value) << shift(site));
  }
  Key key_of(const std::vector<int>& config) const;
  std::vector<int> config_of(const Key& k) const;

  Map& amplitudes() { return amps_; }
  const Map& amplitudes() const { return amps_; }
  size_t support() const { return amps_.size(); }
  cd amplitude(const std::vector<int>& config) const;
  void add(const Key& k, cd a) { amps_[k] += a; }

  double norm2() const;
  void normalize();
  void prune();
  void scale(cd s);
  bool same_shape(const SparseState& o) const { return num_sites_ == o.num_sites_ && dim_ == o.dim_; }

 private:
  int shift(int site) const { return (site % per_word_) * bits_; }
  int num_sites_, dim_, bits_, per_word_;
  uint64_t mask_;
  double prune_;
  Map amps_;
};

// A single-site operator, with a fast path for generalized permutations.
struct LocalOp {
  Mat matrix;
  bool monomial = false;
  std::vector<int> image;  // column -> row of the single nonzero entry
  std::vector<cd> phase;   // value of that entry

  LocalOp() = default;
  explicit LocalOp(const Mat& m, bool require_unitary = true);
  static LocalOp identity(int d) { return LocalOp(Mat::Identity(d, d)); }
  static LocalOp permutation(const Perm& p);
  static LocalOp diagonal(const std::vector<cd>& d, bool require_unitary = true);
  bool is_identity() const;
};
using Family = std::vector<LocalOp>;  // indexed by control value

// Named single-site measurement bases; columns are the basis vectors.
struct LocalBasis {
  std::string name;
  Mat vectors;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(vectors.cols()); }
  static LocalBasis logical(const FiniteGroup& G);
  static LocalBasis dft(int d);
  static LocalBasis irrep(const FiniteGroup& G);  // |R_{mu nu}>, irreps in order, (mu, nu) row-major
  static int irrep_outcome(const FiniteGroup& G, int irrep, int mu, int nu);
  // |k_[l]> = |[l]|^-1/2 sum_m exp(2 pi i k m/|[l]|) |l_m>, then logical states outside the class.
  static LocalBasis class_phase(const FiniteGroup& G, int cls);
  // (|a> +- |b>)/sqrt2 and (|a> +- i|b>)/sqrt2, completed with the remaining logical states.
  static LocalBasis interference_x(const FiniteGroup& G, int a, int b);
  static LocalBasis interference_y(const FiniteGroup& G, int a, int b);
};

Vec logical_vector(int d, int g);
Vec dft_vector(int d, int j);

// ---- state-in/state-out operations ----
SparseState init_product(int num_sites, int dim, const std::vector<Vec>& per_site, double prune = 1e-12);
SparseState init_basis(int num_sites, int dim, const std::vector<int>& config, double prune = 1e-12);

void apply_single(SparseState& s, int site, const LocalOp& op);
void apply_controlled(SparseState& s, int control, int target, const Family& family);
// Classical reversible map on whole configurations.
void apply_permutation(SparseState& s, const std::function<void(Key&)>& f);
void apply_diagonal(SparseState& s, const std::function<cd(const Key&)>& f);
void swap_sites(SparseState& s, int a, int b);

// Born probabilities of every basis outcome on one site.
std::vector<double> outcome_probabilities(const SparseState& s, int site, const LocalBasis& B);
enum class MeasureMode { Keep, Reset };  // Reset leaves the measured site in |e>
SparseState project(const SparseState& s, int site, const LocalBasis& B, int outcome, MeasureMode mode);

cd inner(const SparseState& a, const SparseState& b);
double fidelity(const SparseState& a, const SparseState& b);  // |<a|b>|^2 / (|a|^2 |b|^2)
double expectation_diagonal(const SparseState& s, const std::function<double(const Key&)>& weight);
Mat reduced_density(const SparseState& s, int site);
double site_purity(const SparseState& s, int site);
// Removes a site that is in a pure product state and reinitializes it to value.
void reset_site(SparseState& s, int site, int value = 0, double tol = 1e-9);

// ---- outcome policies and branching runs ----
struct OutcomePolicy {
  enum class Kind { Sample, Postselect, Enumerate };
  Kind kind = Kind::Sample;
  uint64_t seed = 0;
  std::vector<int> script;  // postselected outcomes in measurement order
  bool repeat_last = true;  // reuse the last scripted outcome once the script is exhausted

  static OutcomePolicy sample(uint64_t seed) { return {Kind::Sample, seed, {}, true}; }
  static OutcomePolicy postselect(int k) { return {Kind::Postselect, 0, {k}, true}; }
  static OutcomePolicy replay(std::vector<int> outcomes) { return {Kind::Postselect, 0, std::move(outcomes), false}; }
  static OutcomePolicy enumerate() { return {Kind::Enumerate, 0, {}, true}; }
  static OutcomePolicy parse(const std::string& name, uint64_t seed, int outcome = 0);
  std::string name() const;
};

class PostselectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranscriptEntry {
  std::string op;
  std::vector<int> sites;
  int outcome = -1;                  // -1 for unitary steps
  double probability = 1.0;          // probability of the realized outcome
  std::vector<double> distribution;  // full outcome distribution (measurements)
};

struct OpCounts {
  long single = 0, controlled = 0, measurements = 0;
  OpCounts& operator+=(const OpCounts& o) {
    single += o.single;
    controlled += o.controlled;
    measurements += o.measurements;
    return *this;
  }
};

struct Branch {
  SparseState state;
  double probability = 1.0;
  std::vector<TranscriptEntry> transcript;
  OpCounts counts;
  std::vector<int> outcomes;
  std::map<std::string, long> vars;  // protocol bookkeeping (flags, counters)

  void single(int site, const LocalOp& op, const std::string& name);
  void controlled(int control, int target, const Family& family, const std::string& name);
  void swap(int a, int b, const std::string& name);
  void note(const std::string& name, std::vector<int> sites = {});
  int last_outcome() const { return outcomes.empty() ? -1 : outcomes.back(); }
};

// A protocol execution: one branch under Sample/Postselect, all branches under Enumerate.
class Run {
 public:
  Run(SparseState initial, OutcomePolicy policy);

  std::vector<Branch>& branches() { return branches_; }
  const std::vector<Branch>& branches() const { return branches_; }
  Branch& only();  // the single branch; throws if enumerating several
  const OutcomePolicy& policy() const { return policy_; }

  void single(int site, const LocalOp& op, const std::string& name);
  void controlled(int control, int target, const Family& family, const std::string& name);
  void swap(int a, int b, const std::string& name);
  // Measures every branch (or those selected by `which`) and splits per policy.
  void measure(int site, const LocalBasis& B, const std::string& name, MeasureMode mode,
               const std::function<bool(const Branch&)>& which = nullptr);
  template <class F>
  void each(F&& f) {
    for (auto& b : branches_) f(b);
  }
  double total_probability() const;
  size_t peak_support() const { return peak_support_; }
  void track_support();
  double uniform();  // next draw of the run's generator in [0,1)

 private:
  std::vector<Branch> branches_;
  OutcomePolicy policy_;
  std::mt19937_64 rng_;
  size_t peak_support_ = 0;
};

using ProtocolResult = Run;

}  // namespace qd
