#include "qd/quantum_double.hpp"

#include <cmath>
#include <stdexcept>

namespace qd {

AnyonLabel anyon_label(const FiniteGroup& G, int cls, int irrep) {
  const auto& C = G.classes().at(cls);
  const auto& R = G.centralizer_irreps(cls).at(irrep);
  AnyonLabel a;
  a.cls = cls;
  a.irrep = irrep;
  a.class_size = C.size();
  a.irrep_dim = R.dim;
  a.quantum_dimension = a.class_size * a.irrep_dim;
  a.name = "[" + G.element_name(C.representative) + "]:" + R.label;
  return a;
}

std::vector<AnyonLabel> enumerate_anyons(const FiniteGroup& G) {
  std::vector<AnyonLabel> out;
  for (int c = 0; c < static_cast<int>(G.classes().size()); ++c)
    for (int r = 0; r < static_cast<int>(G.centralizer_irreps(c).size()); ++r)
      out.push_back(anyon_label(G, c, r));
  return out;
}

CarrierState carrier_basis(const AnyonLabel& a, int i, int j) {
  CarrierState v = CarrierState::Zero(a.quantum_dimension);
  v(i * a.irrep_dim + j) = 1.0;
  return v;
}

int twisted_element(const FiniteGroup& G, const ConjugacyClass& cls, int g, int i) {
  int moved = G.conjugate(g, cls.members[i]);
  int ip = cls.position(moved);
  int gt = G.mul(G.mul(G.inv(cls.transversal[ip]), g), cls.transversal[i]);
  if (G.mul(gt, cls.representative) != G.mul(cls.representative, gt))
    throw std::logic_error("twisted element left the centralizer");
  return gt;
}

static void check_dim(const AnyonLabel& a, const Vec& v) {
  if (v.size() != a.quantum_dimension) throw std::invalid_argument("state does not match the carrier space");
}

CarrierState double_action(const FiniteGroup& G, const AnyonLabel& a, int h, int g, const CarrierState& state) {
  check_dim(a, state);
  const auto& C = G.classes()[a.cls];
  const auto& R = G.centralizer_irreps(a.cls)[a.irrep];
  const int d = a.irrep_dim;
  CarrierState out = CarrierState::Zero(state.size());
  for (int i = 0; i < C.size(); ++i) {
    int moved = G.conjugate(g, C.members[i]);
    if (moved != h) continue;
    int ip = C.position(moved);
    const Mat& Rg = R.matrices[twisted_element(G, C, g, i)];
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < d; ++m) out(ip * d + m) += Rg(m, j) * state(i * d + j);
  }
  return out;
}

CarrierState gauge_action(const FiniteGroup& G, const AnyonLabel& a, int g, const CarrierState& state) {
  CarrierState out = CarrierState::Zero(state.size());
  for (int m : G.classes()[a.cls].members) out += double_action(G, a, m, g, state);
  return out;
}

Vec tensor(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vec monodromy(const FiniteGroup& G, const AnyonLabel& A, const AnyonLabel& B, const Vec& joint) {
  const int dA = A.quantum_dimension, dB = B.quantum_dimension;
  if (joint.size() != dA * dB) throw std::invalid_argument("joint state has the wrong dimension");
  const auto& CA = G.classes()[A.cls];
  Vec out = Vec::Zero(joint.size());
  for (int a = 0; a < dA; ++a) {
    int flux = CA.members[a / A.irrep_dim];
    Vec b = joint.segment(a * dB, dB);
    if (b.squaredNorm() == 0.0) continue;
    Vec moved = gauge_action(G, B, flux, b);  // gauge transformation by the flux of A
    for (int k = 0; k < dB; ++k) out(k * dA + a) += moved(k);  // swap
  }
  return out;
}

Vec monodromy_squared(const FiniteGroup& G, const AnyonLabel& A, const AnyonLabel& B, const Vec& joint) {
  return monodromy(G, B, A, monodromy(G, A, B, joint));
}

FluxPairState chargeless_flux_pair(const FiniteGroup& G, int cls) {
  int n = G.classes().at(cls).size();
  return FluxPairState::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

FluxPairState braid_flux_pair(const FiniteGroup& G, int cls, int b, const FluxPairState& pair) {
  const auto& C = G.classes().at(cls);
  if (pair.size() != C.size()) throw std::invalid_argument("flux pair has the wrong dimension");
  FluxPairState out = FluxPairState::Zero(pair.size());
  for (int i = 0; i < C.size(); ++i) out(C.position(G.conjugate(b, C.members[i]))) += pair(i);
  return out;
}

std::vector<cd> irrep_projector_coeffs(const FiniteGroup& G, const Irrep& R, int mu, int nu) {
  if (mu < 0 || nu < 0 || mu >= R.dim || nu >= R.dim) throw std::out_of_range("irrep index");
  std::vector<cd> c(G.order());
  for (int g = 0; g < G.order(); ++g)
    c[g] = static_cast<double>(R.dim) / G.order() * std::conj(R.matrices[g](mu, nu));
  return c;
}

std::vector<cd> centralizer_projector_coeffs(const FiniteGroup& G, int cls, const Irrep& R, int mu, int nu) {
  const auto& N = G.classes().at(cls).centralizer;
  std::vector<cd> c(G.order(), 0.0);
  for (int g : N) c[g] = static_cast<double>(R.dim) / N.size() * std::conj(R.matrices[g](mu, nu));
  return c;
}

std::vector<cd> charge_creation_coeffs(const FiniteGroup& G, const Irrep& R) {
  std::vector<cd> c(G.order());
  for (int g = 0; g < G.order(); ++g) c[g] = std::conj(R.characters[g]);
  return c;
}

cd pair_inner(const Mat& A, const Mat& B) { return (A.adjoint() * B).trace() / static_cast<double>(A.rows()); }
double pair_norm2(const Mat& M) { return pair_inner(M, M).real(); }

std::vector<FusionChannel> fusion_channel_measure(const FiniteGroup& G, int irrep, const Mat& M) {
  const Irrep& R = G.irreps().at(irrep);
  const int d = R.dim;
  if (M.rows() != d || M.cols() != d) throw std::invalid_argument("pair matrix has the wrong size");
  const double n2 = pair_norm2(M);
  if (n2 < 1e-14) throw std::invalid_argument("zero-norm pair state");

  // Isotypic projector of the conjugation action M -> R(g) M R(g)^+.
  auto project = [&](const Irrep& Rp, const Mat& X) {
    Mat out = Mat::Zero(d, d);
    for (int g = 0; g < G.order(); ++g)
      out += std::conj(Rp.characters[g]) * (R.matrices[g] * X * R.matrices[g].adjoint());
    return Mat(out * (static_cast<double>(Rp.dim) / G.order()));
  };

  std::vector<FusionChannel> out;
  for (int k = 0; k < static_cast<int>(G.irreps().size()); ++k) {
    const Irrep& Rp = G.irreps()[k];
    FusionChannel ch;
    ch.label = Rp.label;
    ch.irrep = k;
    // Orthonormal channel basis from projected elementary matrices in index order.
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) {
        Mat E = Mat::Zero(d, d);
        E(mu, nu) = 1.0;
        Mat v = project(Rp, E);
        for (const Mat& b : ch.basis) v -= pair_inner(b, v) * b;
        double nv = pair_norm2(v);
        if (nv > 1e-12) ch.basis.push_back(v / std::sqrt(nv));
      }
    if (ch.basis.empty()) continue;
    Mat P = Mat::Zero(d, d);
    double p = 0.0;
    for (const Mat& b : ch.basis) {
      cd a = pair_inner(b, M) / std::sqrt(n2);
      ch.amplitudes.push_back(a);
      p += std::norm(a);
      P += a * b;
    }
    ch.probability = p;
    ch.post_state = p > 1e-14 ? Mat(P / std::sqrt(p)) : Mat::Zero(d, d);
    out.push_back(std::move(ch));
  }
  return out;
}

}  // namespace qd
