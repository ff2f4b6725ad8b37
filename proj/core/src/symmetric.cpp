#include "stabsens/symmetric.hpp"

#include <cmath>

namespace stabsens {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

SymMatrix SymMatrix::from_dense(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("SymMatrix::from_dense: matrix must be square");
  }
  SymMatrix out(static_cast<int>(m.rows()));
  for (int i = 0; i < out.dim_; ++i) {
    for (int j = i; j < out.dim_; ++j) {
      out.packed_[packed_index(i, j, out.dim_)] = 0.5 * (m(i, j) + m(j, i));
    }
  }
  return out;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i) out.set(i, i, 1.0);
  return out;
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd out(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      const double v = packed_[packed_index(i, j, dim_)];
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

SVec svec(const SymMatrix& x) {
  SVec out;
  out.dim = x.dim();
  out.values.resize(triangular_size(x.dim()));
  int p = 0;
  for (int i = 0; i < x.dim(); ++i) {
    out.values[p++] = x(i, i);
    for (int j = i + 1; j < x.dim(); ++j) {
      out.values[p++] = kSqrt2 * x(i, j);
    }
  }
  return out;
}

Eigen::VectorXd svec_dense(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.rows() != x.cols()) {
    throw DimensionError("svec_dense: matrix must be square");
  }
  const int n = static_cast<int>(x.rows());
  Eigen::VectorXd out(triangular_size(n));
  int p = 0;
  for (int i = 0; i < n; ++i) {
    out[p++] = x(i, i);
    for (int j = i + 1; j < n; ++j) {
      out[p++] = kSqrt2 * x(i, j);
    }
  }
  return out;
}

int triangular_dim(Eigen::Index length) {
  // n(n+1)/2 = length  =>  n = (-1 + sqrt(1 + 8 length)) / 2
  const double root = (std::sqrt(8.0 * static_cast<double>(length) + 1.0) - 1.0) / 2.0;
  const int n = static_cast<int>(std::lround(root));
  if (n < 1 || triangular_size(n) != length) return -1;
  return n;
}

SymMatrix smat(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const int n = triangular_dim(values.size());
  if (n < 0) {
    throw DimensionError("smat: length " + std::to_string(values.size()) +
                         " is not of the form n(n+1)/2");
  }
  SymMatrix out(n);
  int p = 0;
  for (int i = 0; i < n; ++i) {
    out.set(i, i, values[p++]);
    for (int j = i + 1; j < n; ++j) {
      out.set(i, j, values[p++] / kSqrt2);
    }
  }
  return out;
}

SymMatrix smat(const SVec& v) {
  if (v.values.size() != triangular_size(v.dim)) {
    throw DimensionError("smat: SVec length inconsistent with its dim");
  }
  return smat(v.values);
}

Eigen::MatrixXd smat_dense(const Eigen::Ref<const Eigen::VectorXd>& values) {
  return smat(values).dense();
}

Eigen::MatrixXd sym_kron(const Eigen::Ref<const Eigen::MatrixXd>& m,
                         const Eigen::Ref<const Eigen::MatrixXd>& n) {
  if (m.rows() != m.cols() || n.rows() != n.cols() || m.rows() != n.rows()) {
    throw DimensionError("sym_kron: M and N must be square of equal size");
  }
  const int dim = static_cast<int>(m.rows());
  const int tri = triangular_size(dim);
  Eigen::MatrixXd op(tri, tri);
  // Column k is the image of the k-th orthonormal basis element.
  Eigen::MatrixXd basis_elem = Eigen::MatrixXd::Zero(dim, dim);
  int col = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const double v = (i == j) ? 1.0 : 1.0 / kSqrt2;
      basis_elem(i, j) = v;
      basis_elem(j, i) = v;
      const Eigen::MatrixXd image =
          0.5 * (n * basis_elem * m.transpose() + m * basis_elem * n.transpose());
      op.col(col++) = svec_dense(image);
      basis_elem(i, j) = 0.0;
      basis_elem(j, i) = 0.0;
    }
  }
  return op;
}

std::vector<SymMatrix> sym_basis(int n) {
  if (n < 1) throw DimensionError("sym_basis: n must be >= 1");
  std::vector<SymMatrix> basis;
  basis.reserve(triangular_size(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      SymMatrix t(n);
      t.set(i, j, i == j ? 1.0 : 1.0 / kSqrt2);
      basis.push_back(std::move(t));
    }
  }
  return basis;
}

}  // namespace stabsens
