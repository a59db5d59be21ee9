#include "qd/sparse_state.hpp"

#include <algorithm>
#include <cmath>

namespace qd {

// ---------------------------------------------------------------- SparseState

SparseState::SparseState(int num_sites, int dim, double prune)
    : num_sites_(num_sites), dim_(dim), prune_(prune) {
  if (dim < 2) throw std::invalid_argument("site dimension must be at least 2");
  bits_ = 1;
  while ((1 << bits_) < dim) ++bits_;
  per_word_ = 64 / bits_;
  mask_ = (uint64_t{1} << bits_) - 1;
  if (num_sites < 1 || num_sites > max_sites(dim))
    throw std::invalid_argument("site count exceeds the packed key capacity (" + std::to_string(max_sites(dim)) + ")");
}

int SparseState::max_sites(int dim) {
  int bits = 1;
  while ((1 << bits) < dim) ++bits;
  return static_cast<int>(std::tuple_size<Key>::value) * (64 / bits);
}

Key SparseState::key_of(const std::vector<int>& config) const {
  if (static_cast<int>(config.size()) != num_sites_) throw std::invalid_argument("configuration length mismatch");
  Key k{};
  for (int s = 0; s < num_sites_; ++s) {
    if (config[s] < 0 || config[s] >= dim_) throw std::invalid_argument("configuration value out of range");
    set(k, s, config[s]);
  }
  return k;
}

std::vector<int> SparseState::config_of(const Key& k) const {
  std::vector<int> c(num_sites_);
  for (int s = 0; s < num_sites_; ++s) c[s] = get(k, s);
  return c;
}

cd SparseState::amplitude(const std::vector<int>& config) const {
  auto it = amps_.find(key_of(config));
  return it == amps_.end() ? cd{0.0} : it->second;
}

double SparseState::norm2() const {
  long double n = 0.0;  // extended accumulator: supports reach millions of entries
  for (const auto& [k, a] : amps_) n += std::norm(a);
  return static_cast<double>(n);
}

void SparseState::normalize() {
  double n = std::sqrt(norm2());
  if (n < 1e-300) throw std::runtime_error("cannot normalize a zero state");
  scale(1.0 / n);
}

void SparseState::prune() {
  const double t2 = prune_ * prune_;
  std::erase_if(amps_, [t2](const auto& kv) { return std::norm(kv.second) < t2; });
}

void SparseState::scale(cd s) {
  for (auto& [k, a] : amps_) a *= s;
}

// -------------------------------------------------------------------- LocalOp

LocalOp::LocalOp(const Mat& m, bool require_unitary) : matrix(m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("local operator must be square");
  const int d = static_cast<int>(m.rows());
  if (require_unitary && (m.adjoint() * m - Mat::Identity(d, d)).norm() > 1e-9)
    throw std::invalid_argument("local operator is not unitary");
  monomial = true;
  image.assign(d, -1);
  phase.assign(d, 0.0);
  for (int c = 0; c < d && monomial; ++c)
    for (int r = 0; r < d; ++r)
      if (std::abs(m(r, c)) > 1e-14) {
        if (image[c] >= 0) {
          monomial = false;
          break;
        }
        image[c] = r;
        phase[c] = m(r, c);
      }
  if (monomial)
    for (int c = 0; c < d; ++c)
      if (image[c] < 0) image[c] = c;  // zero column (non-unitary projectors): phase stays 0
}

LocalOp LocalOp::permutation(const Perm& p) {
  Mat m = Mat::Zero(p.size(), p.size());
  for (size_t c = 0; c < p.size(); ++c) m(p[c], c) = 1.0;
  return LocalOp(m);
}

LocalOp LocalOp::diagonal(const std::vector<cd>& d, bool require_unitary) {
  Mat m = Mat::Zero(d.size(), d.size());
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return LocalOp(m, require_unitary);
}

bool LocalOp::is_identity() const {
  return (matrix - Mat::Identity(matrix.rows(), matrix.cols())).norm() < 1e-15;
}

// ----------------------------------------------------------------- LocalBasis

Vec logical_vector(int d, int g) {
  Vec v = Vec::Zero(d);
  v(g) = 1.0;
  return v;
}

Vec dft_vector(int d, int j) {
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = root_of_unity(static_cast<long>(j) * k, d) / std::sqrt(static_cast<double>(d));
  return v;
}

LocalBasis LocalBasis::logical(const FiniteGroup& G) {
  LocalBasis b{"logical", Mat::Identity(G.order(), G.order()), {}};
  for (int g = 0; g < G.order(); ++g) b.labels.push_back(G.element_name(g));
  return b;
}

LocalBasis LocalBasis::dft(int d) {
  LocalBasis b{"dft", Mat(d, d), {}};
  for (int j = 0; j < d; ++j) {
    b.vectors.col(j) = dft_vector(d, j);
    b.labels.push_back("~" + std::to_string(j));
  }
  return b;
}

LocalBasis LocalBasis::irrep(const FiniteGroup& G) {
  LocalBasis b{"irrep", Mat::Zero(G.order(), G.order()), {}};
  int col = 0;
  for (const auto& R : G.irreps())
    for (int mu = 0; mu < R.dim; ++mu)
      for (int nu = 0; nu < R.dim; ++nu, ++col) {
        for (int g = 0; g < G.order(); ++g)
          b.vectors(g, col) = std::sqrt(static_cast<double>(R.dim) / G.order()) * std::conj(R.matrices[g](mu, nu));
        b.labels.push_back(R.dim == 1 ? R.label : R.label + "_" + std::to_string(mu) + std::to_string(nu));
      }
  if (col != G.order()) throw std::logic_error("irreps do not span the regular representation");
  return b;
}

int LocalBasis::irrep_outcome(const FiniteGroup& G, int irrep, int mu, int nu) {
  int col = 0;
  for (int r = 0; r < irrep; ++r) col += G.irreps()[r].dim * G.irreps()[r].dim;
  return col + mu * G.irreps()[irrep].dim + nu;
}

LocalBasis LocalBasis::class_phase(const FiniteGroup& G, int cls) {
  const auto& C = G.classes().at(cls);
  const int n = C.size();
  LocalBasis b{"class-phase", Mat::Zero(G.order(), G.order()), {}};
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) b.vectors(C.members[m], k) = root_of_unity(static_cast<long>(k) * m, n) / std::sqrt(double(n));
    b.labels.push_back(std::to_string(k) + "_[" + G.element_name(C.representative) + "]");
  }
  int col = n;
  for (int g = 0; g < G.order(); ++g)
    if (!C.contains(g)) {
      b.vectors(g, col++) = 1.0;
      b.labels.push_back(G.element_name(g));
    }
  return b;
}

static LocalBasis two_element_basis(const FiniteGroup& G, int a, int c, cd phase, const std::string& name) {
  if (a == c) throw std::invalid_argument("interference basis needs two distinct elements");
  LocalBasis b{name, Mat::Zero(G.order(), G.order()), {"+", "-"}};
  const double r = 1.0 / std::sqrt(2.0);
  b.vectors(a, 0) = r;
  b.vectors(c, 0) = phase * r;
  b.vectors(a, 1) = r;
  b.vectors(c, 1) = -phase * r;
  int col = 2;
  for (int g = 0; g < G.order(); ++g)
    if (g != a && g != c) {
      b.vectors(g, col++) = 1.0;
      b.labels.push_back(G.element_name(g));
    }
  return b;
}

LocalBasis LocalBasis::interference_x(const FiniteGroup& G, int a, int b) { return two_element_basis(G, a, b, 1.0, "psi-x"); }
LocalBasis LocalBasis::interference_y(const FiniteGroup& G, int a, int b) {
  return two_element_basis(G, a, b, cd{0.0, 1.0}, "psi-y");
}

// ----------------------------------------------------------------- operations

SparseState init_product(int num_sites, int dim, const std::vector<Vec>& per_site, double prune) {
  if (static_cast<int>(per_site.size()) != num_sites) throw std::invalid_argument("one vector per site required");
  SparseState s(num_sites, dim, prune);
  s.add(Key{}, 1.0);
  for (int site = 0; site < num_sites; ++site) {
    const Vec& v = per_site[site];
    if (v.size() != dim) throw std::invalid_argument("site vector has the wrong dimension");
    if (std::abs(v.squaredNorm() - 1.0) > 1e-9) throw std::invalid_argument("site vector is not normalized");
    if (v.isApprox(logical_vector(dim, 0))) continue;
    SparseState::Map out;
    out.reserve(s.support() * dim);
    for (const auto& [k, a] : s.amplitudes())
      for (int g = 0; g < dim; ++g)
        if (std::abs(v(g)) > 0.0) {
          Key nk = k;
          s.set(nk, site, g);
          out[nk] += a * v(g);
        }
    s.amplitudes() = std::move(out);
  }
  s.prune();
  return s;
}

SparseState init_basis(int num_sites, int dim, const std::vector<int>& config, double prune) {
  SparseState s(num_sites, dim, prune);
  s.add(s.key_of(config), 1.0);
  return s;
}

static void check_site(const SparseState& s, int site) {
  if (site < 0 || site >= s.num_sites()) throw std::out_of_range("site index out of range");
}

void apply_single(SparseState& s, int site, const LocalOp& op) {
  check_site(s, site);
  if (op.matrix.rows() != s.dim()) throw std::invalid_argument("operator dimension mismatch");
  if (op.is_identity()) return;
  SparseState::Map out;
  out.reserve(s.support());
  for (const auto& [k, a] : s.amplitudes()) {
    const int v = s.get(k, site);
    if (op.monomial) {
      Key nk = k;
      s.set(nk, site, op.image[v]);
      out[nk] += op.phase[v] * a;
    } else {
      for (int r = 0; r < s.dim(); ++r) {
        cd m = op.matrix(r, v);
        if (m == 0.0) continue;
        Key nk = k;
        s.set(nk, site, r);
        out[nk] += m * a;
      }
    }
  }
  s.amplitudes() = std::move(out);
  s.prune();
}

void apply_controlled(SparseState& s, int control, int target, const Family& family) {
  check_site(s, control);
  check_site(s, target);
  if (control == target) throw std::invalid_argument("control and target must differ");
  if (static_cast<int>(family.size()) != s.dim()) throw std::invalid_argument("family needs one operator per control value");
  std::vector<char> ident(family.size());
  bool all_ident = true;
  for (size_t c = 0; c < family.size(); ++c) {
    if (family[c].matrix.rows() != s.dim()) throw std::invalid_argument("operator dimension mismatch");
    ident[c] = family[c].is_identity();
    all_ident = all_ident && ident[c];
  }
  if (all_ident) return;
  SparseState::Map out;
  out.reserve(s.support());
  for (const auto& [k, a] : s.amplitudes()) {
    const int c = s.get(k, control);
    if (ident[c]) {
      out[k] += a;
      continue;
    }
    const LocalOp& op = family[c];
    const int v = s.get(k, target);
    if (op.monomial) {
      Key nk = k;
      s.set(nk, target, op.image[v]);
      out[nk] += op.phase[v] * a;
    } else {
      for (int r = 0; r < s.dim(); ++r) {
        cd m = op.matrix(r, v);
        if (m == 0.0) continue;
        Key nk = k;
        s.set(nk, target, r);
        out[nk] += m * a;
      }
    }
  }
  s.amplitudes() = std::move(out);
  s.prune();
}

void apply_permutation(SparseState& s, const std::function<void(Key&)>& f) {
  SparseState::Map out;
  out.reserve(s.support());
  for (const auto& [k, a] : s.amplitudes()) {
    Key nk = k;
    f(nk);
    out[nk] += a;
  }
  s.amplitudes() = std::move(out);
  s.prune();
}

void apply_diagonal(SparseState& s, const std::function<cd(const Key&)>& f) {
  for (auto& [k, a] : s.amplitudes()) a *= f(k);
  s.prune();
}

void swap_sites(SparseState& s, int a, int b) {
  check_site(s, a);
  check_site(s, b);
  if (a == b) return;
  apply_permutation(s, [&](Key& k) {
    int va = s.get(k, a), vb = s.get(k, b);
    s.set(k, a, vb);
    s.set(k, b, va);
  });
}

// Amplitudes grouped by the configuration of all other sites.
static std::unordered_map<Key, std::vector<cd>, KeyHash> group_by_rest(const SparseState& s, int site) {
  std::unordered_map<Key, std::vector<cd>, KeyHash> rest;
  rest.reserve(s.support());
  for (const auto& [k, a] : s.amplitudes()) {
    Key r = k;
    s.set(r, site, 0);
    auto& v = rest[r];
    if (v.empty()) v.assign(s.dim(), 0.0);
    v[s.get(k, site)] += a;
  }
  return rest;
}

static bool is_logical(const LocalBasis& B) {
  return (B.vectors - Mat::Identity(B.vectors.rows(), B.vectors.cols())).norm() < 1e-15;
}

std::vector<double> outcome_probabilities(const SparseState& s, int site, const LocalBasis& B) {
  check_site(s, site);
  if (B.vectors.rows() != s.dim() || B.vectors.cols() != s.dim()) throw std::invalid_argument("basis dimension mismatch");
  if ((B.vectors.adjoint() * B.vectors - Mat::Identity(s.dim(), s.dim())).norm() > 1e-12)
    throw std::invalid_argument("measurement basis is not orthonormal");
  std::vector<long double> acc(s.dim(), 0.0);
  if (is_logical(B)) {
    for (const auto& [k, a] : s.amplitudes()) acc[s.get(k, site)] += std::norm(a);
  } else {
    const Mat Bh = B.vectors.adjoint();
    for (const auto& [r, v] : group_by_rest(s, site)) {
      Vec x = Bh * Eigen::Map<const Vec>(v.data(), s.dim());
      for (int k = 0; k < s.dim(); ++k) acc[k] += std::norm(x(k));
    }
  }
  std::vector<double> p(acc.begin(), acc.end());
  double n = 0.0;
  for (double x : p) n += x;
  if (n < 1e-300) throw std::runtime_error("measurement on a zero state");
  for (double& x : p) x /= n;
  return p;
}

SparseState project(const SparseState& s, int site, const LocalBasis& B, int outcome, MeasureMode mode) {
  check_site(s, site);
  if (outcome < 0 || outcome >= B.size()) throw std::out_of_range("measurement outcome");
  SparseState out(s.num_sites(), s.dim(), s.prune_threshold());
  auto& m = out.amplitudes();
  m.reserve(s.support());
  const Vec b = B.vectors.col(outcome);
  for (const auto& [k, a] : s.amplitudes()) {
    cd c = std::conj(b(s.get(k, site))) * a;
    if (c == 0.0) continue;
    Key r = k;
    if (mode == MeasureMode::Reset) {
      s.set(r, site, 0);
      m[r] += c;
    } else {
      for (int g = 0; g < s.dim(); ++g)
        if (b(g) != 0.0) {
          s.set(r, site, g);
          m[r] += b(g) * c;
        }
    }
  }
  out.prune();
  if (out.norm2() < 1e-24) throw PostselectionFailure("projection onto a zero-probability outcome");
  out.normalize();
  return out;
}

cd inner(const SparseState& a, const SparseState& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("states live on different site sets");
  const auto& small = a.support() <= b.support() ? a.amplitudes() : b.amplitudes();
  const auto& large = a.support() <= b.support() ? b.amplitudes() : a.amplitudes();
  const bool a_small = a.support() <= b.support();
  long double re = 0.0, im = 0.0;
  for (const auto& [k, x] : small) {
    auto it = large.find(k);
    if (it == large.end()) continue;
    const cd t = a_small ? std::conj(x) * it->second : std::conj(it->second) * x;
    re += t.real(), im += t.imag();
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

double fidelity(const SparseState& a, const SparseState& b) {
  return std::norm(inner(a, b)) / (a.norm2() * b.norm2());
}

double expectation_diagonal(const SparseState& s, const std::function<double(const Key&)>& weight) {
  long double e = 0.0;
  for (const auto& [k, a] : s.amplitudes()) e += weight(k) * std::norm(a);
  return static_cast<double>(e) / s.norm2();
}

Mat reduced_density(const SparseState& s, int site) {
  check_site(s, site);
  Mat rho = Mat::Zero(s.dim(), s.dim());
  for (const auto& [r, v] : group_by_rest(s, site)) {
    Eigen::Map<const Vec> x(v.data(), s.dim());
    rho += x * x.adjoint();
  }
  return rho / rho.trace().real();
}

double site_purity(const SparseState& s, int site) {
  Mat rho = reduced_density(s, site);
  return (rho * rho).trace().real();
}

void reset_site(SparseState& s, int site, int value, double tol) {
  Mat rho = reduced_density(s, site);
  if ((rho * rho).trace().real() < 1.0 - tol) throw std::runtime_error("site is entangled; cannot reset");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  Vec psi = es.eigenvectors().col(s.dim() - 1);
  Eigen::Index big = 0;
  psi.cwiseAbs().maxCoeff(&big);
  psi *= std::abs(psi(big)) / psi(big);  // fix the phase: largest component real positive
  SparseState::Map out;
  out.reserve(s.support());
  for (const auto& [k, a] : s.amplitudes()) {
    Key r = k;
    s.set(r, site, value);
    out[r] += std::conj(psi(s.get(k, site))) * a;
  }
  s.amplitudes() = std::move(out);
  s.prune();
}

// ------------------------------------------------------------ policies, runs

OutcomePolicy OutcomePolicy::parse(const std::string& name, uint64_t seed, int outcome) {
  if (name == "sample") return sample(seed);
  if (name == "postselect") return postselect(outcome);
  if (name == "enumerate") return enumerate();
  throw std::invalid_argument("unknown policy '" + name + "' (sample|postselect|enumerate)");
}

std::string OutcomePolicy::name() const {
  switch (kind) {
    case Kind::Sample: return "sample";
    case Kind::Postselect: return "postselect";
    case Kind::Enumerate: return "enumerate";
  }
  return "?";
}

void Branch::single(int site, const LocalOp& op, const std::string& name) {
  apply_single(state, site, op);
  ++counts.single;
  transcript.push_back({name, {site}, -1, 1.0, {}});
}

void Branch::controlled(int control, int target, const Family& family, const std::string& name) {
  apply_controlled(state, control, target, family);
  ++counts.controlled;
  transcript.push_back({name, {control, target}, -1, 1.0, {}});
}

void Branch::swap(int a, int b, const std::string& name) {
  swap_sites(state, a, b);
  ++counts.controlled;
  transcript.push_back({name, {a, b}, -1, 1.0, {}});
}

void Branch::note(const std::string& name, std::vector<int> sites) {
  transcript.push_back({name, std::move(sites), -1, 1.0, {}});
}

Run::Run(SparseState initial, OutcomePolicy policy) : policy_(std::move(policy)), rng_(policy_.seed) {
  branches_.push_back(Branch{std::move(initial), 1.0, {}, {}, {}, {}});
  track_support();
}

Branch& Run::only() {
  if (branches_.size() != 1) throw std::logic_error("run has several branches");
  return branches_.front();
}

void Run::track_support() {
  for (const auto& b : branches_) peak_support_ = std::max(peak_support_, b.state.support());
}

void Run::single(int site, const LocalOp& op, const std::string& name) {
  for (auto& b : branches_) b.single(site, op, name);
  track_support();
}

void Run::controlled(int control, int target, const Family& family, const std::string& name) {
  for (auto& b : branches_) b.controlled(control, target, family, name);
  track_support();
}

void Run::swap(int a, int b, const std::string& name) {
  for (auto& br : branches_) br.swap(a, b, name);
}

double Run::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

void Run::measure(int site, const LocalBasis& B, const std::string& name, MeasureMode mode,
                  const std::function<bool(const Branch&)>& which) {
  std::vector<Branch> next;
  for (auto& b : branches_) {
    if (which && !which(b)) {
      next.push_back(std::move(b));
      continue;
    }
    std::vector<double> p = outcome_probabilities(b.state, site, B);
    std::vector<int> chosen;
    switch (policy_.kind) {
      case OutcomePolicy::Kind::Enumerate:
        for (int k = 0; k < B.size(); ++k)
          if (p[k] > 1e-12) chosen.push_back(k);
        break;
      case OutcomePolicy::Kind::Postselect: {
        size_t idx = b.outcomes.size();
        if (policy_.script.empty()) throw PostselectionFailure("postselection script is empty");
        if (idx >= policy_.script.size() && !policy_.repeat_last)
          throw PostselectionFailure("postselection script exhausted at measurement " + std::to_string(idx));
        int k = policy_.script[std::min(idx, policy_.script.size() - 1)];
        if (k < 0 || k >= B.size() || p[k] < 1e-12)
          throw PostselectionFailure(name + ": postselected outcome " + std::to_string(k) + " has probability " +
                                     std::to_string(k >= 0 && k < B.size() ? p[k] : 0.0));
        chosen.push_back(k);
        break;
      }
      case OutcomePolicy::Kind::Sample: {
        double u = uniform();
        int k = 0;
        double acc = 0.0;
        for (; k < B.size() - 1; ++k) {
          acc += p[k];
          if (u < acc) break;
        }
        // Never land on a numerically impossible outcome.
        while (p[k] < 1e-12 && k > 0) --k;
        while (p[k] < 1e-12 && k + 1 < B.size()) ++k;
        chosen.push_back(k);
        break;
      }
    }
    for (size_t c = 0; c < chosen.size(); ++c) {
      int k = chosen[c];
      Branch nb = (c + 1 == chosen.size()) ? std::move(b) : b;
      nb.state = project(nb.state, site, B, k, mode);
      nb.probability *= p[k];
      ++nb.counts.measurements;
      nb.outcomes.push_back(k);
      nb.transcript.push_back({name, {site}, k, p[k], p});
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
  track_support();
}

double Run::total_probability() const {
  double t = 0.0;
  for (const auto& b : branches_) t += b.probability;
  return t;
}

}  // namespace qd
