// The quantum double D(G): anyon labels, carrier-space action, monodromy,
// irrep projectors, charge-creation operators and pair fusion channels.
#pragma once

#include <string>
#include <vector>

#include "qd/group.hpp"

namespace qd {

struct AnyonLabel {
  int cls = 0;     // conjugacy class index (magnetic part)
  int irrep = 0;   // centralizer irrep index (electric part)
  int class_size = 1;
  int irrep_dim = 1;
  int quantum_dimension = 1;  // class_size * irrep_dim
  std::string name;
};

// Carrier-space vector over |h_i, v_j>, index i * irrep_dim + j.
using CarrierState = Vec;

std::vector<AnyonLabel> enumerate_anyons(const FiniteGroup& G);
AnyonLabel anyon_label(const FiniteGroup& G, int cls, int irrep);

// Basis vector |h_i, v_j> of the carrier space.
CarrierState carrier_basis(const AnyonLabel& a, int i, int j);

// Pi(P_h g) acting on a carrier state.
CarrierState double_action(const FiniteGroup& G, const AnyonLabel& a, int h, int g,
                           const CarrierState& state);
// Pi(sum_h P_h g): the gauge transformation g alone.
CarrierState gauge_action(const FiniteGroup& G, const AnyonLabel& a, int g, const CarrierState& state);

// The centralizer element g~ = x_{g h_i g^-1}^-1 g x_{h_i}.
int twisted_element(const FiniteGroup& G, const ConjugacyClass& cls, int g, int i);

// Monodromy R acting on a joint state of A (x) B (index a * dimB + b); the
// result lives in B (x) A.  The squared version returns to A (x) B.
Vec monodromy(const FiniteGroup& G, const AnyonLabel& A, const AnyonLabel& B, const Vec& joint);
Vec monodromy_squared(const FiniteGroup& G, const AnyonLabel& A, const AnyonLabel& B, const Vec& joint);
Vec tensor(const Vec& a, const Vec& b);

// Flux pair amplitudes over {|l, l^-1> : l in class}, class member order.
using FluxPairState = Vec;
FluxPairState chargeless_flux_pair(const FiniteGroup& G, int cls);
// |a, a^-1> -> |b a b^-1, b a^-1 b^-1>.
FluxPairState braid_flux_pair(const FiniteGroup& G, int cls, int b, const FluxPairState& pair);

// Coefficients of P^R_{mu nu} = (|R|/|G|) sum_g R(g)*_{mu nu} g.
std::vector<cd> irrep_projector_coeffs(const FiniteGroup& G, const Irrep& R, int mu, int nu);
// Same for an irrep of the centralizer of class cls (sum over the centralizer).
std::vector<cd> centralizer_projector_coeffs(const FiniteGroup& G, int cls, const Irrep& R, int mu, int nu);
// Diagonal W_R = sum_g chi_R(g)* |g><g|.
std::vector<cd> charge_creation_coeffs(const FiniteGroup& G, const Irrep& R);

// Electric pair |M^R> = |R|^-1/2 sum M_{mu nu} |mu>_R |nu>_R*.
struct FusionChannel {
  std::string label;          // irrep label of the total charge
  int irrep = 0;
  std::vector<Mat> basis;     // orthonormal channel states, <A|B> = tr(A^+ B)/|R|
  std::vector<cd> amplitudes; // <basis_k | M>
  double probability = 0.0;
  Mat post_state;             // normalized projection of M onto the channel
};

double pair_norm2(const Mat& M);  // tr(M^+ M)/|R|
cd pair_inner(const Mat& A, const Mat& B);
std::vector<FusionChannel> fusion_channel_measure(const FiniteGroup& G, int irrep, const Mat& M);

// The verbal claim that |R2(c+-)> fuse to vacuum with probability 1/2 disagrees
// with the computed overlap |tr R2(c+)|^2/4 = 1/4; reported, not enforced.
inline constexpr double kQuotedR2cVacuumProbability = 0.5;

}  // namespace qd
