#pragma once

// Sparse assembly of the maximally symmetric Gram operator M(p) and of its
// level-k extensions P_k = Pi_k (M(p) x 1^{k-d}) Pi_k, written in the
// orthonormal basis { sqrt(C(k,mu)) e^mu } of the symmetric subspace S^k.
//
// Entry formula (single factor, |mu| = |nu| = k):
//   A[mu,nu] = sum_{gamma <= mu,nu, |gamma| = k-d}
//              C_{(mu-gamma)+(nu-gamma)} C(d,mu-gamma) C(d,nu-gamma) C(k-d,gamma)
//              / sqrt(C(k,mu) C(k,nu))
// with C_g = c_g / C(2d, g).  For several factors the basis is the
// Kronecker product of the per-factor bases (first factor most significant)
// and the kernel is the product of per-factor kernels.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hrsos/polyform.hpp"

namespace hrsos {

// Identifies S^{k_1}(R^{n_1}) x ... x S^{k_m}(R^{n_m}); FactorShape::degree holds k_i.
struct BasisTag {
  std::vector<FactorShape> factors;

  std::uint64_t dim() const;
  friend bool operator==(const BasisTag&, const BasisTag&) = default;
};

BasisTag single_basis(int n, int k);
BasisTag product_basis(std::span<const int> ns, int k);

// Symmetric matrix stored once (upper triangle, row <= col).
class SparseSymMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor>;

  SparseSymMatrix() = default;
  SparseSymMatrix(BasisTag tag, Storage upper);
  // Lower-triangle triplets are mirrored; duplicates are summed in order.
  static SparseSymMatrix from_triplets(BasisTag tag, const std::vector<Eigen::Triplet<double>>& triplets);
  static SparseSymMatrix from_dense(BasisTag tag, const Eigen::MatrixXd& dense);
  static SparseSymMatrix identity(BasisTag tag);

  Eigen::Index dim() const { return upper_.rows(); }
  Eigen::Index nnz() const { return upper_.nonZeros(); }  // stored entries
  const BasisTag& basis() const { return tag_; }
  const Storage& upper() const { return upper_; }

  double coeff(Eigen::Index i, Eigen::Index j) const;
  Storage full() const;
  Eigen::MatrixXd to_dense() const;
  double frobenius_norm() const;
  double trace() const;

 private:
  BasisTag tag_;
  Storage upper_;
};

struct AssemblyOptions {
  int threads = 1;
};

SparseSymMatrix build_M(const HomogeneousForm& p, const AssemblyOptions& opts = {});
SparseSymMatrix build_Pk(const HomogeneousForm& p, int k, const AssemblyOptions& opts = {});
SparseSymMatrix build_Nk(int n, int d, int k, const AssemblyOptions& opts = {});
SparseSymMatrix build_multi_Pk(const MultiForm& p, int k, const AssemblyOptions& opts = {});
// Separate level per factor; the basis is S^{ks[0]} x ... x S^{ks[m-1]}.
SparseSymMatrix build_multi_Pk(const MultiForm& p, const std::vector<int>& ks, const AssemblyOptions& opts = {});
// M(p) on S^{d_1} x ... x S^{d_m}.
SparseSymMatrix build_multi_M(const MultiForm& p, const AssemblyOptions& opts = {});
// ns[i] variables and half-degree ds[i] per factor.
SparseSymMatrix build_multi_Nk(std::span<const int> ns, std::span<const int> ds, int k,
                               const AssemblyOptions& opts = {});

// Slow exact route through the monomial-basis coefficients:
// A[mu,nu] = numer[mu,nu] / sqrt(weight[mu] * weight[nu]) with weight = C(k, mu).
struct RationalGram {
  BasisTag tag;
  std::map<std::pair<std::uint64_t, std::uint64_t>, BigRational> numer;  // row <= col
  std::vector<BigInt> weight;

  BigRational trace() const;
  Eigen::MatrixXd to_dense() const;
};

// Guarded to k - d <= 10.
RationalGram build_Pk_exact(const HomogeneousForm& p, int k);

// psi(x)[mu] = sqrt(C(k,mu)) x^mu, so that <psi(x), A psi(x)> is the Gram value.
Eigen::VectorXd embed(int k, std::span<const double> x);
Eigen::VectorXd embed(const BasisTag& tag, std::span<const std::vector<double>> points);
Eigen::VectorXcd embed_complex(int k, std::span<const std::complex<double>> z);

// psi(z)^dagger A psi(z) for a single-factor matrix on S^d(C^n).
double hermitian_value(const SparseSymMatrix& a, std::span<const std::complex<double>> z);
double hermitian_value(const SparseSymMatrix& a, std::span<const double> x);
// Real Gram value on a product of spaces.
double gram_value(const SparseSymMatrix& a, std::span<const std::vector<double>> points);

// Expands a single-factor matrix on S^d into the full n^d tensor basis and
// tests invariance under transposition of the first tensor factor.
bool check_partial_transpose(const SparseSymMatrix& a, double tol = 1e-12);

struct KappaResult {
  double computed = 0;     // lambda_max / lambda_min of N^(d)
  double conjectured = 0;  // Gamma-function binomial C(n/2 + d - 1, floor(d/2))
};

KappaResult kappa_N(int n, int d);
double kappa_conjectured(int n, int d);

// Coordinate text format: header comment line, then "row col value" (1-based, upper triangle).
void write_coo(std::ostream& os, const SparseSymMatrix& a);
SparseSymMatrix read_coo(std::istream& is);

}  // namespace hrsos
