// Measurement-assisted lattice protocols: ground-state synthesis, creation,
// transport and fusion of magnetic, electric and dyonic excitations, and the
// two interferometry experiments.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qd/model_ops.hpp"
#include "qd/quantum_double.hpp"

namespace qd {

struct AnyonHandle {
  enum class Kind { Magnetic, Electric, Dyonic };
  Kind kind = Kind::Magnetic;
  FaceId face;      // magnetic / dyonic
  VertexId base;    // base point of the boundary product (magnetic / dyonic)
  VertexId vertex;  // electric / dyonic
  int cls = 0;      // conjugacy class of the flux
  int irrep = 0;    // irrep of G (electric) or of the centralizer (dyonic)
  std::string label;
};

// Ancilla hygiene violation: an ancilla expected in |e> was not.
class AncillaContamination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- shared building blocks (act on every branch of a run) ----
// Prepares an ancilla that is currently |e> in the state given by column 0 of U.
void prepare_ancilla(Run& run, int site, const Mat& U, const std::string& name);
// W(v) = sum_h |h><h|_anc (x) T_h(v), controlled from the vertex ancilla of v.
void controlled_gauge(const Model& M, Run& run, VertexId v, const std::string& name = "W");
// Throws AncillaContamination unless the site holds |e> in every branch.
void require_identity(const Run& run, int site, const std::string& what);

// Lambda(v,f): multiplies the face ancilla by the boundary product of f from base v.
void flux_to_ancilla(const Model& M, Run& run, FaceId f, VertexId base);
void flux_to_ancilla_inverse(const Model& M, Run& run, FaceId f, VertexId base);

// ---- ground state ----
Run ground_state_synthesis(const Model& M, const OutcomePolicy& policy);
// The synthesized ground state (every outcome chain yields the same state).
SparseState ground_state(const Model& M);

// ---- magnetic fluxes ----
// Creates the chargeless pair sum_l |l^-1, l>/sqrt|[l]| across f and its
// neighbour in direction d.  `phase_shift` alters the correction exponent
// (k -> k + phase_shift), which prepares the other class-phase states.
// Returns {control face handle (flux l^-1), partner handle (flux l)}.
std::pair<AnyonHandle, AnyonHandle> create_magnetic_pair(const Model& M, Run& run, int cls, FaceId f,
                                                         Direction d = Direction::Right, int phase_shift = 0);
// Moves a flux one face; the handle is updated (face and base point).
void move_flux(const Model& M, Run& run, AnyonHandle& h, Direction d);
// Moves along a sequence of directions.
void move_flux_path(const Model& M, Run& run, AnyonHandle& h, const std::vector<Direction>& path);

struct FusionReport {
  std::vector<std::string> labels;  // outcome labels
  std::vector<double> distribution; // probability-weighted over branches
  double vacuum_probability = 0.0;
};
// Transfers the flux of A into the adjacent face of B and measures the face
// ancilla of A in the class-phase basis of A's class.
FusionReport fuse_magnetic_pair(const Model& M, Run& run, const AnyonHandle& A, const AnyonHandle& B);

// ---- electric charges ----
// K(v,e): multiplies the vertex ancilla by the edge value (R_g if e leaves v, R_{g^-1} if it enters).
void charge_to_ancilla(const Model& M, Run& run, VertexId v, int edge, bool inverse = false);
// K(v,e) followed by an irrep-basis measurement of the ancilla of the edge's start vertex.
std::pair<AnyonHandle, AnyonHandle> create_electric_pair_probabilistic(const Model& M, Run& run, int edge);
// W_R on an edge: diagonal unitary for one-dimensional R, adaptive protocol for R2 of S3.
std::pair<AnyonHandle, AnyonHandle> create_electric_vacuum_pair(const Model& M, Run& run, int edge, int irrep);
// W_R applied to the ordered product along a vertex path (one-dimensional R).
std::pair<AnyonHandle, AnyonHandle> create_electric_chain_pair(const Model& M, Run& run,
                                                               const std::vector<VertexId>& path, int irrep);
// Moves a charge one vertex.  `string_edge` is the edge at the charge carrying
// its string (default: the edge opposite to the direction of motion).
void move_charge(const Model& M, Run& run, AnyonHandle& h, Direction d, int string_edge = -1);
// Moves A next to B, then reads the total charge of both vertices with one
// ancilla controlling T_g on the two stars (outcome group R1+ = vacuum).
FusionReport fuse_electric_pair(const Model& M, Run& run, AnyonHandle A, const AnyonHandle& B,
                                int string_edge = -1);
// Moves A all the way onto B's vertex and reports the distribution of the last
// transport step's irrep-basis readout, grouped by irrep.
FusionReport transport_onto_partner(const Model& M, Run& run, AnyonHandle A, const AnyonHandle& B,
                                    int string_edge = -1);

// ---- dyons ----
// Block-encoded diagonal D (max |d| normalized to 1) on a target site using a
// qubit ({e, t} levels) of an ancilla; repeat until success from the saved input.
struct RepeatStats {
  long attempts = 0;
  double success_probability = 0.0;
};
RepeatStats apply_diagonal_repeat_until_success(const FiniteGroup& G, Run& run, int ancilla, int target,
                                                const std::vector<cd>& diag, long max_attempts = 1000);
// which: "R1_1", "R2_1" (class [c]) or "R4_1" (class [t]).  The pair sits on
// f and the face below it.
std::pair<AnyonHandle, AnyonHandle> create_dyon_pair(const Model& M, Run& run, const std::string& which, FaceId f,
                                                     RepeatStats* stats = nullptr);
// Diagonal coefficients of the dyon operator W on the shared edge.
std::vector<cd> dyon_coefficients(const FiniteGroup& G, const std::string& which);

// ---- interferometry ----
struct FluxFluxReport {
  double p_before = 0.0;          // from the experiment without the braid
  double p_after = 0.0;           // after the [c] flux encircles a [t] flux
  double p_before_ground = 0.0;   // chargeless [c] pair on a 2x2 ground state
  std::string layout;
  size_t peak_support = 0;
  long moves = 0;
};
// The braid needs a loop of empty faces around one [t] member; the layout uses
// a 3x4-face lattice started from the all-|e> configuration.
FluxFluxReport interferometry_flux_flux(const OutcomePolicy& policy);
// p = probability of (|c+> - |c->)/sqrt2 for the ancilla after fusion.
double flux_flux_probability(const Model& M, Run& run, const AnyonHandle& A, const AnyonHandle& B);

struct FluxChargeReport {
  double re_amp = 0.0, im_amp = 0.0;
  std::vector<double> x_distribution, y_distribution;
};
// Vacuum pair of R on the first horizontal edge of a 1x1 ground state, then a
// Hadamard test of the braid T_h(v) with the vertex ancilla as interferometer.
FluxChargeReport interferometry_flux_charge(const Model& M, int irrep, int h, const OutcomePolicy& policy);

}  // namespace qd
