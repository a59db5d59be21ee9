// Finite group arithmetic and representation data (S3 and cyclic groups).
#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qd {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Perm = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;

// exp(2 pi i k / n)
cd root_of_unity(long k, long n);

struct ConjugacyClass {
  int representative = 0;        // h_1, the lowest-index member
  std::vector<int> members;      // members[0] == representative, index order
  std::vector<int> centralizer;  // centralizer of the representative, index order
  std::vector<int> transversal;  // transversal[i] * h_1 * transversal[i]^-1 == members[i]

  int position(int h) const;  // index into members, -1 if absent
  bool contains(int h) const { return position(h) >= 0; }
  int size() const { return static_cast<int>(members.size()); }
};

// A unitary irrep.  For irreps of a subgroup (centralizers) the matrices are
// stored per element of the whole group but only meaningful on the subgroup.
struct Irrep {
  std::string label;
  int dim = 1;
  std::vector<Mat> matrices;
  std::vector<cd> characters;
};

class FiniteGroup {
 public:
  FiniteGroup(std::string name, std::vector<std::string> element_names,
              std::vector<int> mul_table);

  const std::string& name() const { return name_; }
  int order() const { return order_; }
  int identity() const { return 0; }
  int mul(int g, int h) const { return mul_[g * order_ + h]; }
  int inv(int g) const { return inv_[g]; }
  int conjugate(int g, int h) const { return mul(mul(g, h), inv(g)); }
  int element_order(int g) const;
  bool is_abelian() const;

  const std::string& element_name(int g) const { return names_[g]; }
  int element_index(const std::string& name) const;  // throws if unknown

  const std::vector<ConjugacyClass>& classes() const { return classes_; }
  int class_of(int h) const { return class_of_[h]; }

  const std::vector<Irrep>& irreps() const { return irreps_; }
  int irrep_index(const std::string& label) const;  // throws if unknown
  // Irreps of the centralizer N_[alpha] of class cls.
  const std::vector<Irrep>& centralizer_irreps(int cls) const { return centralizer_irreps_[cls]; }

  // L_g|h> = |gh>, R_g|h> = |hg> as index permutations: perm[h] = image of h.
  Perm left_regular(int g) const;
  Perm right_regular(int g) const;
  Mat left_matrix(int g) const;
  Mat right_matrix(int g) const;

  // Installs irreps and derives the centralizer irreps of every class.
  void set_irreps(std::vector<Irrep> irreps);

 private:
  void build_classes();
  std::vector<Irrep> build_centralizer_irreps(const ConjugacyClass& cls) const;

  std::string name_;
  int order_;
  std::vector<std::string> names_;
  std::vector<int> mul_;
  std::vector<int> inv_;
  std::vector<ConjugacyClass> classes_;
  std::vector<int> class_of_;
  std::vector<Irrep> irreps_;
  std::vector<std::vector<Irrep>> centralizer_irreps_;
};

// S3 in the order {e, t0, t1, t2, c+, c-}.
namespace s3 {
inline constexpr int e = 0, t0 = 1, t1 = 2, t2 = 3, cp = 4, cm = 5;
inline int t(int j) { return 1 + ((j % 3) + 3) % 3; }
}  // namespace s3

FiniteGroup build_s3();
FiniteGroup build_cyclic(int n);
// Selects by name: "s3", "z2", "z3", ... ("zN").
FiniteGroup build_group(const std::string& name);

// g = c+^r t0^s for S3.
struct SemidirectCode {
  static std::pair<int, int> encode(int g);
  static int decode(int r, int s);
  // Product in the (r, s) presentation: t0 c+ t0 = c+^2.
  static std::pair<int, int> multiply(std::pair<int, int> a, std::pair<int, int> b);
};

}  // namespace qd
