#include "qd/group.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qd {

cd root_of_unity(long k, long n) {
  long r = ((k % n) + n) % n;
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
}

int ConjugacyClass::position(int h) const {
  auto it = std::find(members.begin(), members.end(), h);
  return it == members.end() ? -1 : static_cast<int>(it - members.begin());
}

FiniteGroup::FiniteGroup(std::string name, std::vector<std::string> element_names,
                         std::vector<int> mul_table)
    : name_(std::move(name)),
      order_(static_cast<int>(element_names.size())),
      names_(std::move(element_names)),
      mul_(std::move(mul_table)) {
  if (order_ < 1 || mul_.size() != static_cast<size_t>(order_ * order_))
    throw std::invalid_argument("multiplication table has the wrong size");
  for (int v : mul_)
    if (v < 0 || v >= order_) throw std::invalid_argument("multiplication table entry out of range");
  for (int g = 0; g < order_; ++g)
    if (mul(0, g) != g || mul(g, 0) != g)
      throw std::invalid_argument("index 0 is not a two-sided identity");
  inv_.assign(order_, -1);
  for (int g = 0; g < order_; ++g)
    for (int h = 0; h < order_; ++h)
      if (mul(g, h) == 0 && mul(h, g) == 0) inv_[g] = h;
  for (int g = 0; g < order_; ++g)
    if (inv_[g] < 0) throw std::invalid_argument("element without inverse");
  build_classes();
}

int FiniteGroup::element_order(int g) const {
  int k = 1;
  for (int x = g; x != 0; x = mul(x, g)) ++k;
  return g == 0 ? 1 : k;
}

bool FiniteGroup::is_abelian() const {
  for (int g = 0; g < order_; ++g)
    for (int h = 0; h < order_; ++h)
      if (mul(g, h) != mul(h, g)) return false;
  return true;
}

int FiniteGroup::element_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown group element '" + name + "'");
  return static_cast<int>(it - names_.begin());
}

int FiniteGroup::irrep_index(const std::string& label) const {
  for (size_t i = 0; i < irreps_.size(); ++i)
    if (irreps_[i].label == label) return static_cast<int>(i);
  throw std::invalid_argument("unknown irrep '" + label + "'");
}

void FiniteGroup::build_classes() {
  class_of_.assign(order_, -1);
  for (int h = 0; h < order_; ++h) {
    if (class_of_[h] >= 0) continue;
    ConjugacyClass cls;
    cls.representative = h;
    // Members and transversal by scanning conjugating elements in index order.
    for (int x = 0; x < order_; ++x) {
      int c = conjugate(x, h);
      if (cls.position(c) < 0) {
        cls.members.push_back(c);
        cls.transversal.push_back(x);
      }
    }
    // Keep members in index order (representative is the lowest index).
    std::vector<int> idx(cls.members.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return cls.members[a] < cls.members[b]; });
    ConjugacyClass sorted = cls;
    for (size_t i = 0; i < idx.size(); ++i) {
      sorted.members[i] = cls.members[idx[i]];
      sorted.transversal[i] = cls.transversal[idx[i]];
    }
    for (int x = 0; x < order_; ++x)
      if (mul(x, h) == mul(h, x)) sorted.centralizer.push_back(x);
    for (int m : sorted.members) class_of_[m] = static_cast<int>(classes_.size());
    classes_.push_back(std::move(sorted));
  }
}

Perm FiniteGroup::left_regular(int g) const {
  Perm p(order_);
  for (int h = 0; h < order_; ++h) p[h] = mul(g, h);
  return p;
}

Perm FiniteGroup::right_regular(int g) const {
  Perm p(order_);
  for (int h = 0; h < order_; ++h) p[h] = mul(h, g);
  return p;
}

static Mat perm_matrix(const Perm& p) {
  Mat m = Mat::Zero(p.size(), p.size());
  for (size_t h = 0; h < p.size(); ++h) m(p[h], h) = 1.0;
  return m;
}

Mat FiniteGroup::left_matrix(int g) const { return perm_matrix(left_regular(g)); }
Mat FiniteGroup::right_matrix(int g) const { return perm_matrix(right_regular(g)); }

void FiniteGroup::set_irreps(std::vector<Irrep> irreps) {
  for (auto& r : irreps) {
    if (r.matrices.size() != static_cast<size_t>(order_))
      throw std::invalid_argument("irrep needs one matrix per element");
    r.characters.resize(order_);
    for (int g = 0; g < order_; ++g) r.characters[g] = r.matrices[g].trace();
  }
  irreps_ = std::move(irreps);
  centralizer_irreps_.clear();
  for (const auto& cls : classes_) centralizer_irreps_.push_back(build_centralizer_irreps(cls));
}

// Centralizer irreps: the full irreps when N = G, otherwise the characters of
// a cyclic centralizer (the only case occurring for S3 and Z_n).
std::vector<Irrep> FiniteGroup::build_centralizer_irreps(const ConjugacyClass& cls) const {
  const int n = static_cast<int>(cls.centralizer.size());
  if (n == order_) return irreps_;
  int gen = -1;
  for (int x : cls.centralizer)
    if (element_order(x) == n) {
      gen = x;
      break;
    }
  if (gen < 0) throw std::logic_error("non-cyclic proper centralizer is not supported");
  std::vector<int> power(order_, -1);
  for (int k = 0, x = 0; k < n; ++k, x = mul(x, gen)) power[x] = k;
  std::vector<Irrep> out;
  for (int k = 0; k < n; ++k) {
    Irrep r;
    r.label = "Z" + std::to_string(n) + "^" + std::to_string(k);
    r.dim = 1;
    r.matrices.assign(order_, Mat::Zero(1, 1));
    r.characters.assign(order_, 0.0);
    for (int x : cls.centralizer) {
      cd v = root_of_unity(static_cast<long>(k) * power[x], n);
      r.matrices[x](0, 0) = v;
      r.characters[x] = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

FiniteGroup build_s3() {
  // Elements as permutations of {0,1,2}; (gh)(x) = g(h(x)).
  const std::vector<std::array<int, 3>> perms = {
      {0, 1, 2},  // e
      {1, 0, 2},  // t0 = (01)
      {0, 2, 1},  // t1 = (12)
      {2, 1, 0},  // t2 = (20)
      {1, 2, 0},  // c+ = (012)
      {2, 0, 1},  // c- = (021)
  };
  std::vector<int> table(36);
  for (int g = 0; g < 6; ++g)
    for (int h = 0; h < 6; ++h) {
      std::array<int, 3> p{};
      for (int x = 0; x < 3; ++x) p[x] = perms[g][perms[h][x]];
      table[g * 6 + h] = static_cast<int>(std::find(perms.begin(), perms.end(), p) - perms.begin());
    }
  FiniteGroup G("s3", {"e", "t0", "t1", "t2", "c+", "c-"}, std::move(table));

  const cd xi = root_of_unity(1, 3);
  const cd xis = std::conj(xi);
  auto m2 = [](cd a, cd b, cd c, cd d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
  };
  Irrep triv{"R1+", 1, {}, {}}, sign{"R1-", 1, {}, {}}, two{"R2", 2, {}, {}};
  for (int g = 0; g < 6; ++g) {
    triv.matrices.push_back(Mat::Ones(1, 1));
    bool odd = (g >= 1 && g <= 3);
    sign.matrices.push_back(Mat::Constant(1, 1, odd ? -1.0 : 1.0));
  }
  two.matrices = {
      Mat::Identity(2, 2),    m2(0, 1, 1, 0),  m2(0, xis, xi, 0),
      m2(0, xi, xis, 0),      m2(xi, 0, 0, xis), m2(xis, 0, 0, xi),
  };
  G.set_irreps({triv, sign, two});
  return G;
}

FiniteGroup build_cyclic(int n) {
  if (n < 2) throw std::invalid_argument("cyclic group order must be at least 2");
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j) names.push_back("g" + std::to_string(j));
  std::vector<int> table(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) table[a * n + b] = (a + b) % n;
  FiniteGroup G("z" + std::to_string(n), std::move(names), std::move(table));
  std::vector<Irrep> irreps;
  for (int k = 0; k < n; ++k) {
    Irrep r{"R1^" + std::to_string(k), 1, {}, {}};
    for (int j = 0; j < n; ++j) r.matrices.push_back(Mat::Constant(1, 1, root_of_unity(static_cast<long>(j) * k, n)));
    irreps.push_back(std::move(r));
  }
  G.set_irreps(std::move(irreps));
  return G;
}

FiniteGroup build_group(const std::string& name) {
  if (name == "s3" || name == "S3") return build_s3();
  if (name.size() >= 2 && (name[0] == 'z' || name[0] == 'Z')) {
    size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(name.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == name.size() - 1) return build_cyclic(n);
  }
  throw std::invalid_argument("unknown group '" + name + "' (expected s3 or zN)");
}

std::pair<int, int> SemidirectCode::encode(int g) {
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 2; ++s)
      if (decode(r, s) == g) return {r, s};
  throw std::invalid_argument("not an S3 element");
}

int SemidirectCode::decode(int r, int s) {
  static const FiniteGroup G = build_s3();
  int x = s3::e;
  for (int k = 0; k < ((r % 3) + 3) % 3; ++k) x = G.mul(x, s3::cp);
  if (s % 2) x = G.mul(x, s3::t0);
  return x;
}

std::pair<int, int> SemidirectCode::multiply(std::pair<int, int> a, std::pair<int, int> b) {
  // a^{r1} b^{s1} a^{r2} b^{s2} = a^{r1 + 2^{s1} r2} b^{s1+s2}
  int twist = (a.second % 2) ? 2 : 1;
  return {(a.first + twist * b.first) % 3, (a.second + b.second) % 2};
}

}  // namespace qd
