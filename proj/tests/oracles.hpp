// Independent reference implementations used by the tests: a dense state
// engine, the printed S3 permutation matrices, per-configuration boundary
// products and an isotypic-projector fusion oracle.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qd/lattice.hpp"
#include "qd/sparse_state.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Printed 6x6 permutation matrices of S3 in the order e, t0, t1, t2, c+, c-:
// entry [g][r] is the column holding the 1 in row r, so L_g|c> = |r>.
inline constexpr std::array<std::array<int, 6>, 6> kLeftRows = {{
    {0, 1, 2, 3, 4, 5},
    {1, 0, 4, 5, 2, 3},
    {2, 5, 0, 4, 3, 1},
    {3, 4, 5, 0, 1, 2},
    {5, 2, 3, 1, 0, 4},
    {4, 3, 1, 2, 5, 0},
}};
inline constexpr std::array<std::array<int, 6>, 6> kRightRows = {{
    {0, 1, 2, 3, 4, 5},
    {1, 0, 5, 4, 3, 2},
    {2, 4, 0, 5, 1, 3},
    {3, 5, 4, 0, 2, 1},
    {5, 3, 1, 2, 0, 4},
    {4, 2, 3, 1, 5, 0},
}};

inline Mat printed_matrix(const std::array<int, 6>& rows) {
  Mat m = Mat::Zero(6, 6);
  for (int r = 0; r < 6; ++r) m(r, rows[r]) = 1.0;
  return m;
}

// Product g*h read off the printed left-multiplication matrices.
inline int printed_product(int g, int h) {
  for (int r = 0; r < 6; ++r)
    if (kLeftRows[g][r] == h) return r;
  return -1;
}

// Dense state over d^n amplitudes; site s has stride d^s.
struct Dense {
  int n, d;
  Vec v;
  Dense(int sites, int dim) : n(sites), d(dim), v(Vec::Zero(pow_int(dim, sites))) { v(0) = 1.0; }

  static long pow_int(int b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
  }
  long stride(int s) const { return pow_int(d, s); }
  int digit(long i, int s) const { return static_cast<int>((i / stride(s)) % d); }
  long with(long i, int s, int x) const { return i + (x - digit(i, s)) * stride(s); }

  void single(int s, const Mat& U) {
    Vec out = Vec::Zero(v.size());
    for (long i = 0; i < v.size(); ++i)
      for (int r = 0; r < d; ++r) out(with(i, s, r)) += U(r, digit(i, s)) * v(i);
    v = out;
  }
  void controlled(int c, int t, const std::vector<Mat>& fam) {
    Vec out = Vec::Zero(v.size());
    for (long i = 0; i < v.size(); ++i)
      for (int r = 0; r < d; ++r) out(with(i, t, r)) += fam[digit(i, c)](r, digit(i, t)) * v(i);
    v = out;
  }
  void swap(int a, int b) {
    Vec out = Vec::Zero(v.size());
    for (long i = 0; i < v.size(); ++i) out(with(with(i, a, digit(i, b)), b, digit(i, a))) = v(i);
    v = out;
  }
  double probability(int s, const Vec& b) const {
    Dense t = *this;
    t.single(s, b * b.adjoint());
    return t.v.squaredNorm() / v.squaredNorm();
  }
  void project(int s, const Vec& b, bool reset) {
    single(s, b * b.adjoint());
    if (reset) {
      Mat R = Mat::Zero(d, d);
      R.row(0) = b.adjoint();
      single(s, R);
    }
    v.normalize();
  }
  Mat reduced(int s) const {
    Mat rho = Mat::Zero(d, d);
    for (long i = 0; i < v.size(); ++i)
      for (int x = 0; x < d; ++x) rho(digit(i, s), x) += v(i) * std::conj(v(with(i, s, x)));
    return rho / v.squaredNorm();
  }
};

inline Vec to_dense(const qd::SparseState& s) {
  Dense D(s.num_sites(), s.dim());
  Vec w = Vec::Zero(D.v.size());
  for (const auto& [k, a] : s.amplitudes()) {
    long idx = 0;
    for (int site = 0; site < s.num_sites(); ++site) idx += s.get(k, site) * D.stride(site);
    w(idx) = a;
  }
  return w;
}

// Boundary product of a face from an explicit walk: corners bottom-left,
// bottom-right, top-right, top-left; bottom and right edges are traversed along
// their orientation, top and left against it.  Edge value x contributes x^-1
// when traversed along its orientation and x otherwise; later factors multiply
// on the left.
template <class Mul, class Inv>
int walk_flux(const qd::Lattice& L, const std::vector<int>& edge_values, qd::FaceId f, qd::VertexId base, Mul mul,
              Inv inv) {
  const int i = f.i, j = f.j;
  struct Step {
    int edge;
    bool along;
  };
  const std::array<qd::VertexId, 4> corner = {{{i, j}, {i, j + 1}, {i + 1, j + 1}, {i + 1, j}}};
  const std::array<Step, 4> steps = {{{L.h_edge(i, j), true},
                                      {L.v_edge(i, j + 1), true},
                                      {L.h_edge(i + 1, j), false},
                                      {L.v_edge(i, j), false}}};
  int start = 0;
  while (!(corner[start] == base)) ++start;
  int acc = 0;
  for (int k = 0; k < 4; ++k) {
    const Step& s = steps[(start + k) % 4];
    const int x = edge_values[s.edge];
    acc = mul(s.along ? inv(x) : x, acc);
  }
  return acc;
}

// Probability that the pair matrix M (state sum M_{mu nu} |mu>|nu*>) lies in the
// sigma-isotypic component of R (x) R*, with U(g)M = R(g) M R(g)^+.
inline double isotypic_probability(const std::vector<Mat>& R, const std::vector<cd>& chi_sigma, int dim_sigma,
                                   const Mat& M) {
  const int n = static_cast<int>(R.size());
  Mat P = Mat::Zero(M.rows(), M.cols());
  for (int g = 0; g < n; ++g) P += std::conj(chi_sigma[g]) * (R[g] * M * R[g].adjoint());
  P *= double(dim_sigma) / n;
  const cd num = (M.adjoint() * P).trace();
  const cd den = (M.adjoint() * M).trace();
  return (num / den).real();
}

}  // namespace oracle
