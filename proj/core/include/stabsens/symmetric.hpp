#pragma once

#include <vector>

#include <Eigen/Core>

#include "stabsens/errors.hpp"

namespace stabsens {

/// Number of free entries of an n x n symmetric matrix.
constexpr int triangular_size(int n) { return n * (n + 1) / 2; }

/// Packed index of entry (i, j), i <= j, in row-major upper-triangle order:
/// (0,0), (0,1), ..., (0,n-1), (1,1), (1,2), ..., (n-1,n-1).
constexpr int packed_index(int i, int j, int n) {
  return i * n - i * (i - 1) / 2 + (j - i);
}

/// Dense real symmetric matrix. Only the upper triangle is stored, so
/// symmetry holds by construction: (i,j) and (j,i) read the same cell.
class SymMatrix {
 public:
  SymMatrix() : dim_(0) {}

  explicit SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw DimensionError("SymMatrix: dim must be >= 1");
    packed_ = Eigen::VectorXd::Zero(triangular_size(dim));
  }

  /// Builds from a dense matrix, symmetrizing as (M + M^T)/2.
  static SymMatrix from_dense(const Eigen::Ref<const Eigen::MatrixXd>& m);

  static SymMatrix identity(int dim);

  int dim() const { return dim_; }

  double operator()(int i, int j) const {
    return i <= j ? packed_[packed_index(i, j, dim_)]
                  : packed_[packed_index(j, i, dim_)];
  }

  /// Sets both (i,j) and (j,i).
  void set(int i, int j, double value) {
    if (i <= j) {
      packed_[packed_index(i, j, dim_)] = value;
    } else {
      packed_[packed_index(j, i, dim_)] = value;
    }
  }

  Eigen::MatrixXd dense() const;

  const Eigen::VectorXd& packed() const { return packed_; }

  bool operator==(const SymMatrix& other) const {
    return dim_ == other.dim_ && packed_ == other.packed_;
  }

 private:
  int dim_;
  Eigen::VectorXd packed_;
};

/// Isometric vectorization of a symmetric matrix: row-major upper triangle
/// with off-diagonal entries scaled by sqrt(2), so that
/// Tr(X Y) = svec(X) . svec(Y).
struct SVec {
  int dim = 0;             // underlying matrix dimension n
  Eigen::VectorXd values;  // length n(n+1)/2
};

SVec svec(const SymMatrix& x);

/// svec applied directly to a dense symmetric matrix (no symmetry check;
/// the upper triangle is read).
Eigen::VectorXd svec_dense(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Inverse of svec. Throws DimensionError if the length is not triangular.
SymMatrix smat(const SVec& v);
SymMatrix smat(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Dense-output variant of smat.
Eigen::MatrixXd smat_dense(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Matrix of the linear operator X -> (N X M^T + M X N^T)/2 expressed in
/// svec coordinates. M and N must be square of equal size; they need not
/// be symmetric. The result is dense of size n(n+1)/2.
Eigen::MatrixXd sym_kron(const Eigen::Ref<const Eigen::MatrixXd>& m,
                         const Eigen::Ref<const Eigen::MatrixXd>& n);

/// Orthonormal basis of n x n symmetric matrices ordered like svec:
/// E_kk on the diagonal positions and (E_kl + E_lk)/sqrt(2) for k < l.
/// svec coordinates of any X are its expansion coefficients in this basis.
std::vector<SymMatrix> sym_basis(int n);

/// Dimension n recovered from a triangular length, or -1 if the length is
/// not of the form n(n+1)/2.
int triangular_dim(Eigen::Index length);

}  // namespace stabsens
