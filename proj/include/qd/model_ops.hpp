// Hamiltonian-level operators of the quantum-double lattice model: gauge
// transformations T_g(v), vertex projectors A(v), face fluxes B_l(v,f) and the
// energy functional.
#pragma once

#include <string>
#include <vector>

#include "qd/group.hpp"
#include "qd/lattice.hpp"
#include "qd/sparse_state.hpp"

namespace qd {

// A group together with a lattice; every site is a |G|-level qudit.
struct Model {
  FiniteGroup G;
  Lattice L;

  Model(FiniteGroup group, Lattice lattice) : G(std::move(group)), L(lattice) {}
  Model(const std::string& group, int rows, int cols) : G(build_group(group)), L(rows, cols) {}

  SparseState vacuum() const;  // every site in |e>
};

// Single-site multiplication operators.
LocalOp left_op(const FiniteGroup& G, int g);   // L_g|h> = |gh>
LocalOp right_op(const FiniteGroup& G, int g);  // R_g|h> = |hg>
// Family indexed by the control value c: op(c), identity where op returns -1.
Family left_family(const FiniteGroup& G, const std::function<int(int)>& element_of_control);
Family right_family(const FiniteGroup& G, const std::function<int(int)>& element_of_control);
// Phase family: diag(phase(c, x)) on the target for control value c.
Family phase_family(const FiniteGroup& G, const std::function<cd(int, int)>& phase);

// T_g(v): L_g on outgoing star edges, R_{g^-1} on incoming ones.
void apply_gauge(const Model& M, SparseState& s, VertexId v, int g);
// A(v) = |G|^-1 sum_g T_g(v), applied by direct summation (unnormalized result).
SparseState apply_A(const Model& M, const SparseState& s, VertexId v);
// <psi|A(v)|psi>/<psi|psi>, computed by amplitude lookup without copying the state.
double vertex_projector_expect(const Model& M, const SparseState& s, VertexId v);

// Ordered boundary product of one configuration: each edge value x contributes
// x^{-o}, multiplied on the left in counterclockwise order from the base.
int config_flux(const Model& M, const SparseState& s, const Key& k, FaceId f, VertexId base);
// Probability of every flux value l, i.e. <B_l(base,f)>.
std::vector<double> flux_measure(const Model& M, const SparseState& s, FaceId f, VertexId base);
// Probability of every conjugacy class (independent of the base vertex).
std::vector<double> flux_class_distribution(const Model& M, const SparseState& s, FaceId f);
// B_l(base,f) applied as a diagonal projector (unnormalized result).
SparseState apply_flux_projector(const Model& M, const SparseState& s, FaceId f, VertexId base, int l);
double face_projector_expect(const Model& M, const SparseState& s, FaceId f);

// -sum_v <A(v)> - sum_f <B(f)>.
double energy(const Model& M, const SparseState& s);
double ground_energy(const Model& M);

}  // namespace qd
