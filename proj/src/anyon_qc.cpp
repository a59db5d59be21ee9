#include "qd/anyon_qc.hpp"

#include <cmath>

namespace qd {

namespace {

int mod3(long x) { return static_cast<int>(((x % 3) + 3) % 3); }

const cd kXi = root_of_unity(1, 3);

void require_s3(const FiniteGroup& G) {
  if (G.name() != "s3") throw std::invalid_argument("encoded qutrits need the [t] class of S3");
}

// Draws an index from a distribution, never landing on a numerically impossible outcome.
int draw(const std::vector<double>& p, double u) {
  int k = 0;
  double acc = 0.0;
  const int n = static_cast<int>(p.size());
  for (; k < n - 1; ++k) {
    acc += p[k];
    if (u < acc) break;
  }
  while (p[k] < 1e-12 && k > 0) --k;
  while (p[k] < 1e-12 && k + 1 < n) ++k;
  return k;
}

}  // namespace

// ------------------------------------------------------------- EncodedState

EncodedState::EncodedState() : v_(Vec::Ones(1)) {}

int EncodedState::pos(int id) const {
  if (!alive(id)) throw std::out_of_range("qutrit " + std::to_string(id) + " is not live");
  return pos_of_[id];
}

long EncodedState::stride(int id) const {
  long s = 1;
  for (int p = 0; p < pos(id); ++p) s *= 3;
  return s;
}

std::vector<int> EncodedState::append(const Vec& joint, int count) {
  long dim = 1;
  for (int i = 0; i < count; ++i) dim *= 3;
  if (joint.size() != dim) throw std::invalid_argument("joint state has the wrong dimension");
  const long old = v_.size();
  Vec w(old * dim);
  for (long j = 0; j < dim; ++j) w.segment(j * old, old) = joint(j) * v_;
  v_ = std::move(w);
  std::vector<int> ids;
  for (int i = 0; i < count; ++i) {
    const int id = static_cast<int>(pos_of_.size());
    pos_of_.push_back(static_cast<int>(id_at_.size()));
    id_at_.push_back(id);
    ids.push_back(id);
  }
  return ids;
}

cd EncodedState::amplitude(const std::vector<int>& ids, const std::vector<int>& values) const {
  if (ids.size() != id_at_.size() || values.size() != ids.size())
    throw std::invalid_argument("amplitude needs a value for every live qutrit");
  long idx = 0;
  for (size_t i = 0; i < ids.size(); ++i) idx += stride(ids[i]) * mod3(values[i]);
  return v_(idx);
}

void EncodedState::permute2(int a, int b, const std::array<int, 9>& table) {
  const long sa = stride(a), sb = stride(b);
  if (sa == sb) throw std::invalid_argument("permute2 needs two distinct qutrits");
  Vec w(v_.size());
  for (long i = 0; i < v_.size(); ++i) {
    const int x = static_cast<int>((i / sa) % 3), y = static_cast<int>((i / sb) % 3);
    const int t = table[3 * x + y];
    w(i + (t / 3 - x) * sa + (t % 3 - y) * sb) = v_(i);
  }
  v_ = std::move(w);
}

void EncodedState::weight1(int a, const std::array<cd, 3>& w) {
  const long s = stride(a);
  for (long i = 0; i < v_.size(); ++i) v_(i) *= w[(i / s) % 3];
}

void EncodedState::phase1(int a, const std::array<cd, 3>& phases) { weight1(a, phases); }

std::vector<double> EncodedState::probabilities(int id, LogicalBasis basis) const {
  const long s = stride(id);
  std::vector<double> p(3, 0.0);
  const double r = 1.0 / std::sqrt(3.0);
  for (long hi = 0; hi < v_.size(); hi += 3 * s)
    for (long lo = 0; lo < s; ++lo) {
      const long i = hi + lo;
      const cd a[3] = {v_(i), v_(i + s), v_(i + 2 * s)};
      for (int m = 0; m < 3; ++m) {
        cd amp = a[m];
        if (basis == LogicalBasis::X) amp = r * (a[0] + std::pow(kXi, m) * a[1] + std::pow(kXi, 2 * m) * a[2]);
        p[m] += std::norm(amp);
      }
    }
  const double n = v_.squaredNorm();
  for (double& x : p) x /= n;
  return p;
}

double EncodedState::collapse(int id, LogicalBasis basis, int k) {
  const int p = pos(id);
  const long s = stride(id);
  const double r = 1.0 / std::sqrt(3.0);
  // <t~_k| = 3^-1/2 sum_m xi^{km} <t_m|
  const cd w1 = std::pow(kXi, mod3(k)), w2 = std::pow(kXi, mod3(2L * k));
  Vec out(v_.size() / 3);
  for (long hi = 0; hi < v_.size() / (3 * s); ++hi)
    for (long lo = 0; lo < s; ++lo) {
      const long i = hi * 3 * s + lo;
      out(hi * s + lo) = basis == LogicalBasis::Z ? v_(i + mod3(k) * s)
                                                  : r * (v_(i) + w1 * v_(i + s) + w2 * v_(i + 2 * s));
    }
  const double prob = out.squaredNorm() / v_.squaredNorm();
  if (prob < 1e-300) throw PostselectionFailure("collapse onto an outcome of probability 0");
  v_ = out / out.norm();
  pos_of_[id] = -1;
  id_at_.erase(id_at_.begin() + p);
  for (size_t q = p; q < id_at_.size(); ++q) pos_of_[id_at_[q]] = static_cast<int>(q);
  return prob;
}

void EncodedState::normalize() { v_ /= v_.norm(); }

// ------------------------------------------------------------ resource states

Vec x_basis_state(int j) {
  Vec v(3);
  for (int k = 0; k < 3; ++k) v(k) = std::pow(std::conj(kXi), mod3(static_cast<long>(j) * k)) / std::sqrt(3.0);
  return v;
}

Vec z_basis_state(int j) {
  Vec v = Vec::Zero(3);
  v(mod3(j)) = 1.0;
  return v;
}

Vec magic_state(MagicKind kind, Backend backend) {
  if (backend == Backend::Lattice)
    throw BackendUnsupported("magic states are injected on the abstract backend only; "
                             "lattice-level magic-state preparation is not modelled");
  if (kind == MagicKind::M1) {
    Vec v = Vec::Zero(27);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) v(j + 3 * k + 9 * mod3(j * k)) = 1.0 / 3.0;
    return v;
  }
  Vec v(9);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) v(j + 3 * k) = (j == 0 && k == 0 ? kXi : cd{1.0}) / 3.0;
  return v;
}

// --------------------------------------------------------------- braid tables

BraidTables::BraidTables(const FiniteGroup& G) {
  require_s3(G);
  const int tcls = G.class_of(s3::t0);
  const auto& C = G.classes()[tcls];
  for (int j = 0; j < 3; ++j)
    if (C.members[j] != s3::t(j)) throw std::logic_error("unexpected member order of the [t] class");
  for (int b = 0; b < 3; ++b)
    for (int k = 0; k < 3; ++k) {
      FluxPairState in = FluxPairState::Zero(3);
      in(k) = 1.0;
      FluxPairState out = braid_flux_pair(G, tcls, s3::t(b), in);
      Eigen::Index idx;
      out.cwiseAbs().maxCoeff(&idx);
      conj_[b][k] = static_cast<int>(idx);
    }
}

int BraidTables::ancilla_doubling(int k) const {
  int anc = conjugate(k, 0);        // ancilla pair encircled by the target flux
  int target = conjugate(anc, k);   // target pair encircled by the ancilla flux
  std::swap(anc, target);           // exchange of the two pairs
  if (anc != 0) throw std::logic_error("ancilla pair did not return to t_0");
  return target;
}

std::array<int, 9> BraidTables::sum_inverse() const {
  std::array<int, 9> t{};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) t[3 * j + k] = 3 * j + control_braid(j, ancilla_doubling(k));
  return t;
}

std::array<int, 9> BraidTables::sum(int power) const {
  std::array<int, 9> id{};
  for (int i = 0; i < 9; ++i) id[i] = i;
  const auto inv = sum_inverse();
  // Sigma = (Sigma^-1)^2 and Sigma^-1 itself.
  const int n_inverse = mod3(power) == 1 ? 2 : mod3(power) == 2 ? 1 : 0;
  std::array<int, 9> t = id;
  for (int r = 0; r < n_inverse; ++r)
    for (int i = 0; i < 9; ++i) t[i] = inv[t[i]];
  return t;
}

void apply_sum(EncodedState& s, const BraidTables& T, int control, int target, int power) {
  if (mod3(power) == 0) return;
  s.permute2(control, target, T.sum(power));
}

void apply_x(EncodedState& s, const BraidTables& T, int q, int power) {
  const int p = mod3(power);
  if (p == 0) return;
  const int anc = s.append_one(z_basis_state(p));
  apply_sum(s, T, anc, q, 1);
  if (std::abs(s.collapse(anc, LogicalBasis::Z, p) - 1.0) > 1e-9)
    throw std::logic_error("X ancilla was disturbed");
}

void apply_z(EncodedState& s, const BraidTables& T, int q, int power) {
  const int p = mod3(power);
  if (p == 0) return;
  const int anc = s.append_one(x_basis_state(p));
  apply_sum(s, T, q, anc, 1);
  if (std::abs(s.collapse(anc, LogicalBasis::X, p) - 1.0) > 1e-9)
    throw std::logic_error("Z ancilla was disturbed");
}

// ------------------------------------------------------ charge-assisted projections

namespace {

// Per logical value x: amplitude of the fused pair in each channel.  The pair
// matrix is R2(t_x) R2(t_m)^-1; channels with a multi-dimensional residual
// charge must leave the qutrit pure, which holds whenever their amplitude
// vectors are parallel.
struct ChannelTable {
  std::vector<std::string> labels;
  std::vector<std::array<double, 3>> prob;  // [channel][x]
  std::vector<std::array<cd, 3>> amp;       // [channel][x]
};

ChannelTable channel_table(const FiniteGroup& G, int m) {
  require_s3(G);
  const int r2 = 2;
  const Irrep& R = G.irreps()[r2];
  ChannelTable t;
  std::vector<std::vector<Vec>> vecs;
  for (int x = 0; x < 3; ++x) {
    const Mat M = R.matrices[s3::t(x)] * R.matrices[G.inv(s3::t(m))];
    auto channels = fusion_channel_measure(G, r2, M);
    if (t.labels.empty()) {
      for (const auto& c : channels) t.labels.push_back(c.label);
      t.prob.assign(channels.size(), {0.0, 0.0, 0.0});
      t.amp.assign(channels.size(), {0.0, 0.0, 0.0});
      vecs.assign(channels.size(), std::vector<Vec>(3));
    }
    for (size_t c = 0; c < channels.size(); ++c) {
      t.prob[c][x] = channels[c].probability;
      vecs[c][x] = Eigen::Map<const Vec>(channels[c].amplitudes.data(), channels[c].amplitudes.size());
    }
  }
  for (size_t c = 0; c < vecs.size(); ++c) {
    Vec ref;
    for (int x = 0; x < 3; ++x)
      if (vecs[c][x].norm() > 1e-12) {
        ref = vecs[c][x].normalized();
        break;
      }
    for (int x = 0; x < 3; ++x) {
      if (ref.size() == 0) continue;
      const cd a = ref.dot(vecs[c][x]);
      if (std::abs(std::abs(a) - vecs[c][x].norm()) > 1e-9)
        throw std::logic_error("fusion channel " + t.labels[c] + " leaves a residual charge entangled with the qutrit");
      t.amp[c][x] = a;
    }
  }
  return t;
}

}  // namespace

ChargeFusion k_perp_channels(const FiniteGroup& G, const EncodedState& s, int q, int m) {
  const ChannelTable t = channel_table(G, m);
  const auto pz = s.probabilities(q, LogicalBasis::Z);
  ChargeFusion out;
  out.labels = t.labels;
  for (const auto& row : t.prob) {
    double p = 0.0;
    for (int x = 0; x < 3; ++x) p += pz[x] * row[x];
    out.probabilities.push_back(p);
  }
  return out;
}

double k_perp_select(const FiniteGroup& G, EncodedState& s, int q, int m, int channel) {
  const ChannelTable t = channel_table(G, m);
  const double p = k_perp_channels(G, s, q, m).probabilities.at(channel);
  if (p < 1e-12) throw PostselectionFailure("fusion channel " + t.labels[channel] + " has probability 0");
  s.weight1(q, t.amp[channel]);
  s.normalize();
  return p;
}

// ---------------------------------------------------------------------- QcRun

QcRun::QcRun(OutcomePolicy policy)
    : policy_(std::move(policy)), G_(build_group("s3")), T_(G_), rng_(policy_.seed), branches_(1) {}

QcBranch& QcRun::only() {
  if (branches_.size() != 1) throw std::logic_error("run has " + std::to_string(branches_.size()) + " branches");
  return branches_.front();
}

double QcRun::total_probability() const {
  double t = 0.0;
  for (const auto& b : branches_) t += b.probability;
  return t;
}

double QcRun::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

std::vector<LogicalQutrit> QcRun::add(const Vec& joint, int count) {
  std::vector<int> ids;
  for (auto& b : branches_) {
    auto got = b.state.append(joint, count);
    if (!ids.empty() && got != ids) throw std::logic_error("branches disagree on qutrit ids");
    ids = got;
  }
  std::vector<LogicalQutrit> out;
  for (int id : ids) out.push_back({id, Backend::Abstract});
  return out;
}

LogicalQutrit QcRun::prepare_x(int j) { return add(x_basis_state(j), 1)[0]; }

LogicalQutrit QcRun::prepare_z(int j, PreparationStats* stats, long max_attempts) {
  PreparationStats st;
  const bool sampling = policy_.kind == OutcomePolicy::Kind::Sample;
  for (long attempt = 1; attempt <= max_attempts; ++attempt) {
    st.attempts = attempt;
    st.success_probability = 1.0;
    EncodedState s;
    const int q = s.append_one(x_basis_state(0));
    bool ok = true;
    for (int m = 0; m < 3 && ok; ++m) {
      if (m == mod3(j)) continue;
      const ChargeFusion f = k_perp_channels(G_, s, q, m);
      int c = 0;
      if (sampling) {
        c = draw(f.probabilities, uniform());
      } else {
        // The most likely non-vacuum channel.
        for (size_t k = 1; k < f.probabilities.size(); ++k)
          if (f.probabilities[k] > 1e-12 && (c == 0 || f.probabilities[k] > f.probabilities[c])) c = static_cast<int>(k);
      }
      st.success_probability *= 1.0 - f.probabilities[0];
      if (c == 0) {
        ok = false;  // fused to the vacuum: the qutrit is discarded
        break;
      }
      k_perp_select(G_, s, q, m, c);
    }
    if (!ok) continue;
    if (stats) *stats = st;
    Vec local(3);
    for (int k = 0; k < 3; ++k) local(k) = s.amplitudes()(k);
    return add(local, 1)[0];
  }
  throw RetryLimitExceeded("prepare_z: no success within " + std::to_string(max_attempts) + " attempts");
}

std::vector<LogicalQutrit> QcRun::prepare_magic(MagicKind kind) {
  return add(magic_state(kind), kind == MagicKind::M1 ? 3 : 2);
}

void QcRun::x(LogicalQutrit q, int power) {
  for (auto& b : branches_) apply_x(b.state, T_, q.id, power);
}

void QcRun::z(LogicalQutrit q, int power) {
  for (auto& b : branches_) apply_z(b.state, T_, q.id, power);
}

void QcRun::sum(LogicalQutrit control, LogicalQutrit target, int power) {
  for (auto& b : branches_) apply_sum(b.state, T_, control.id, target.id, power);
}

int QcRun::measure_branch(QcBranch& b, int id, LogicalBasis basis, int forced) {
  const auto p = b.state.probabilities(id, basis);
  const int k = forced >= 0 ? forced : draw(p, uniform());
  if (p[k] < 1e-12) throw PostselectionFailure("logical outcome " + std::to_string(k) + " has probability 0");
  b.state.collapse(id, basis, k);
  b.probability *= p[k];
  b.outcomes.push_back(k);
  return k;
}

void QcRun::measure(LogicalQutrit q, LogicalBasis basis) {
  std::vector<QcBranch> next;
  for (auto& b : branches_) {
    const auto p = b.state.probabilities(q.id, basis);
    std::vector<int> chosen;
    switch (policy_.kind) {
      case OutcomePolicy::Kind::Enumerate:
        for (int k = 0; k < 3; ++k)
          if (p[k] > 1e-12) chosen.push_back(k);
        break;
      case OutcomePolicy::Kind::Postselect: {
        const size_t idx = b.outcomes.size();
        if (policy_.script.empty()) throw PostselectionFailure("postselection script is empty");
        if (idx >= policy_.script.size() && !policy_.repeat_last)
          throw PostselectionFailure("postselection script exhausted");
        chosen.push_back(policy_.script[std::min(idx, policy_.script.size() - 1)]);
        break;
      }
      case OutcomePolicy::Kind::Sample:
        chosen.push_back(draw(p, uniform()));
        break;
    }
    for (size_t c = 0; c < chosen.size(); ++c) {
      QcBranch nb = (c + 1 == chosen.size()) ? std::move(b) : b;
      measure_branch(nb, q.id, basis, chosen[c]);
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
}

// -------------------------------------------------------------------- Toffoli

std::array<LogicalQutrit, 3> toffoli(QcRun& run, LogicalQutrit a, LogicalQutrit b, LogicalQutrit c, long max_rounds) {
  const BraidTables& T = run.braids();
  const auto r = run.prepare_magic(MagicKind::M1);  // r[0] = j, r[1] = k, r[2] = jk
  run.sum(r[0], a, -1);
  run.sum(r[1], b, -1);
  run.sum(c, r[2], 1);
  run.measure(a, LogicalBasis::Z);
  run.measure(b, LogicalBasis::Z);
  run.measure(c, LogicalBasis::X);
  const bool sampling = run.policy().kind == OutcomePolicy::Kind::Sample;

  run.each([&](QcBranch& br) {
    const size_t n = br.outcomes.size();
    const int m1 = br.outcomes[n - 3], m3 = br.outcomes[n - 2], m5 = br.outcomes[n - 1];
    br.stats["m1"] = m1;
    br.stats["m3"] = m3;
    br.stats["m5"] = m5;
    apply_x(br.state, T, r[0].id, m1);
    apply_x(br.state, T, r[1].id, m3);
    apply_x(br.state, T, r[2].id, -m1 * m3);
    // Rightmost factor first: Sigma(r1;r5)^m3, Sigma(r3;r5)^m1, then Z(r5)^-m5.
    apply_sum(br.state, T, r[0].id, r[2].id, m3);
    apply_sum(br.state, T, r[1].id, r[2].id, m1);
    apply_z(br.state, T, r[2].id, -m5);

    // The state now carries xi^{-m5 ab}; every M2 round adds xi on the bin (m7, m9).
    std::array<int, 9> need{}, have{};
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) need[3 * x + y] = mod3(static_cast<long>(m5) * x * y);
    std::vector<int> schedule;  // shortest successful sequence for non-sampling policies
    for (int bin = 0; bin < 9; ++bin)
      for (int t = 0; t < need[bin]; ++t) schedule.push_back(bin);
    long rounds = 0;
    double repair_probability = 1.0;
    while (have != need) {
      if (rounds >= max_rounds)
        throw RetryLimitExceeded("toffoli phase repair did not finish within " + std::to_string(max_rounds) +
                                 " rounds (m5 = " + std::to_string(m5) + ")");
      const auto ids = br.state.append(magic_state(MagicKind::M2), 2);
      apply_sum(br.state, T, r[0].id, ids[0], 1);
      apply_sum(br.state, T, r[1].id, ids[1], 1);
      int m7, m9;
      if (sampling) {
        m7 = run.measure_branch(br, ids[0], LogicalBasis::Z);
        m9 = run.measure_branch(br, ids[1], LogicalBasis::Z);
      } else {
        const int bin = schedule[rounds];
        const auto p7 = br.state.probabilities(ids[0], LogicalBasis::Z);
        m7 = bin / 3;
        br.state.collapse(ids[0], LogicalBasis::Z, m7);
        const auto p9 = br.state.probabilities(ids[1], LogicalBasis::Z);
        m9 = bin % 3;
        br.state.collapse(ids[1], LogicalBasis::Z, m9);
        repair_probability *= p7[m7] * p9[m9];
      }
      have[3 * m7 + m9] = mod3(have[3 * m7 + m9] + 1);
      ++rounds;
    }
    br.stats["repair_rounds"] = rounds;
    if (!sampling) br.stats["repair_probability"] = repair_probability;
  });
  return {r[0], r[1], r[2]};
}

// ------------------------------------------------- experiments on both backends

namespace {

int t_position(const FiniteGroup& G, int g) { return G.classes()[G.class_of(s3::t0)].position(g); }

std::vector<double> lattice_x_prep_readout(const std::vector<int>& js, LogicalBasis basis) {
  if (js.empty() || js.size() > 2) throw std::invalid_argument("the lattice backend hosts one or two qutrits");
  const Model M("s3", static_cast<int>(js.size()), 2);
  const int tcls = M.G.class_of(s3::t0);
  Run run(M.vacuum(), OutcomePolicy::enumerate());
  std::vector<std::pair<AnyonHandle, AnyonHandle>> pairs;
  for (size_t q = 0; q < js.size(); ++q)
    pairs.push_back(create_magnetic_pair(M, run, tcls, {static_cast<int>(q), 0}, Direction::Right, -js[q]));
  const size_t n = js.size();
  std::vector<double> dist(n == 1 ? 3 : 9, 0.0);
  if (basis == LogicalBasis::Z) {
    for (const auto& b : run.branches())
      for (const auto& [k, amp] : b.state.amplitudes()) {
        int idx = 0;
        for (const auto& pr : pairs)
          idx = 3 * idx + t_position(M.G, config_flux(M, b.state, k, pr.first.face, pr.first.base));
        dist[idx] += b.probability * std::norm(amp) / b.state.norm2();
      }
    return dist;
  }
  // Fusion reads |t~_j> as class-phase outcome -j.
  for (const auto& pr : pairs) fuse_magnetic_pair(M, run, pr.first, pr.second);
  for (const auto& b : run.branches()) {
    int idx = 0;
    for (size_t q = 0; q < n; ++q) idx = 3 * idx + mod3(-b.outcomes[b.outcomes.size() - n + q]);
    dist[idx] += b.probability;
  }
  return dist;
}

}  // namespace

std::vector<double> x_prep_readout(Backend backend, const std::vector<int>& js, LogicalBasis basis) {
  if (backend == Backend::Lattice) return lattice_x_prep_readout(js, basis);
  QcRun run(OutcomePolicy::enumerate());
  std::vector<LogicalQutrit> qs;
  for (int j : js) qs.push_back(run.prepare_x(j));
  for (auto q : qs) run.measure(q, basis);
  std::vector<double> dist(js.size() == 1 ? 3 : 9, 0.0);
  for (const auto& b : run.branches()) {
    int idx = 0;
    for (size_t q = 0; q < js.size(); ++q) idx = 3 * idx + b.outcomes[q];
    dist[idx] += b.probability;
  }
  return dist;
}

KProjectionReport k_projection_experiment(Backend backend, int m) {
  if (backend == Backend::Lattice)
    throw BackendUnsupported(
        "K-projection needs the charge frame aligned with the flux base point; on the lattice a fusion region "
        "containing the base conserves the total charge, and one excluding it sees the flux through a "
        "ground-state holonomy");
  const FiniteGroup G = build_group("s3");
  EncodedState s;
  const int q = s.append_one(x_basis_state(0));
  KProjectionReport rep;
  rep.channels = k_perp_channels(G, s, q, m).probabilities;
  for (size_t c = 0; c < rep.channels.size(); ++c) {
    if (rep.channels[c] < 1e-12) {
      rep.z_given_channel.emplace_back();
      continue;
    }
    EncodedState t = s;
    k_perp_select(G, t, q, m, static_cast<int>(c));
    rep.z_given_channel.push_back(t.probabilities(q, LogicalBasis::Z));
  }
  return rep;
}

double abstract_flux_flux_probability(const FiniteGroup& G, bool braid) {
  require_s3(G);
  const int ccls = G.class_of(s3::cp), tcls = G.class_of(s3::t0);
  const AnyonLabel C = anyon_label(G, ccls, 0), Tl = anyon_label(G, tcls, 0);
  const auto& CM = G.classes()[ccls].members;
  const int nc = C.quantum_dimension, nt = Tl.quantum_dimension;
  // psi[a0] is the joint (moving [c] member) x ([t] member) state for partner flux CM[a0]^-1.
  std::vector<Vec> psi(nc);
  for (int a0 = 0; a0 < nc; ++a0) {
    Vec joint = Vec::Zero(nc * nt);
    for (int t = 0; t < nt; ++t) joint(a0 * nt + t) = 1.0 / std::sqrt(static_cast<double>(nc * nt));
    psi[a0] = braid ? monodromy_squared(G, C, Tl, joint) : joint;
  }
  // Fusion leaves the moving flux a in the ancilla and a * a0^-1 on the partner;
  // the ancilla's reduced state is summed over (partner value, [t] flux).
  Mat rho = Mat::Zero(nc, nc);
  for (int a0 = 0; a0 < nc; ++a0)
    for (int a0p = 0; a0p < nc; ++a0p)
      for (int a = 0; a < nc; ++a)
        for (int ap = 0; ap < nc; ++ap) {
          if (G.mul(CM[a], G.inv(CM[a0])) != G.mul(CM[ap], G.inv(CM[a0p]))) continue;
          for (int t = 0; t < nt; ++t) rho(a, ap) += psi[a0](a * nt + t) * std::conj(psi[a0p](ap * nt + t));
        }
  Vec v = Vec::Zero(nc);
  v(G.classes()[ccls].position(s3::cp)) = 1.0 / std::sqrt(2.0);
  v(G.classes()[ccls].position(s3::cm)) = -1.0 / std::sqrt(2.0);
  return (v.adjoint() * rho * v)(0, 0).real();
}

cd abstract_flux_charge_amplitude(const FiniteGroup& G, int irrep, int h) {
  const int hcls = G.class_of(h), ecls = G.class_of(G.identity());
  const AnyonLabel F = anyon_label(G, hcls, 0), Q = anyon_label(G, ecls, irrep);
  const int nf = F.quantum_dimension, d = Q.quantum_dimension;
  const int hpos = G.classes()[hcls].position(h);
  cd amp = 0.0;
  // |1_R> = d^-1/2 sum_mu |mu>|mu*>: the partner is a spectator, so the overlap
  // is the normalized trace of the braid on the first charge.
  for (int mu = 0; mu < d; ++mu) {
    Vec joint = Vec::Zero(nf * d);
    joint(hpos * d + mu) = 1.0;
    Vec out = monodromy_squared(G, F, Q, joint);
    amp += out(hpos * d + mu) / static_cast<double>(d);
  }
  return amp;
}

}  // namespace qd
