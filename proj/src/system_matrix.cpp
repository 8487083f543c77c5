#include "balkit/system_matrix.hpp"

#include <cmath>
#include <limits>

namespace balkit {

SystemMatrix::SystemMatrix(MatrixXd dense) : storage_(Storage::Dense), n_(dense.rows()), dense_(std::move(dense)) {
  if (dense_.rows() != dense_.cols()) throw DimensionError("system matrix must be square");
}

SystemMatrix::SystemMatrix(SparseMatrixXd sparse)
    : storage_(Storage::Sparse), n_(sparse.rows()), sparse_(std::move(sparse)) {
  if (sparse_.rows() != sparse_.cols()) throw DimensionError("system matrix must be square");
  sparse_.makeCompressed();
}

SystemMatrix SystemMatrix::identity(Index n) {
  SystemMatrix m;
  m.storage_ = Storage::Identity;
  m.n_ = n;
  return m;
}

MatrixXd SystemMatrix::to_dense() const {
  switch (storage_) {
    case Storage::Identity: return MatrixXd::Identity(n_, n_);
    case Storage::Dense: return dense_;
    case Storage::Sparse: return MatrixXd(sparse_);
  }
  return {};
}

SparseMatrixXd SystemMatrix::to_sparse() const {
  switch (storage_) {
    case Storage::Identity: {
      SparseMatrixXd id(n_, n_);
      id.setIdentity();
      return id;
    }
    case Storage::Dense: return dense_.sparseView();
    case Storage::Sparse: return sparse_;
  }
  return {};
}

SparseMatrixXcd SystemMatrix::to_sparse_complex() const { return to_sparse().cast<Complex>(); }

MatrixXd SystemMatrix::apply(const MatrixXd& x) const {
  switch (storage_) {
    case Storage::Identity: return x;
    case Storage::Dense: return dense_ * x;
    case Storage::Sparse: return sparse_ * x;
  }
  return {};
}

MatrixXcd SystemMatrix::apply(const MatrixXcd& x) const {
  switch (storage_) {
    case Storage::Identity: return x;
    case Storage::Dense: return dense_.cast<Complex>() * x;
    case Storage::Sparse: return sparse_.cast<Complex>() * x;
  }
  return {};
}

MatrixXd SystemMatrix::apply_transpose(const MatrixXd& x) const {
  switch (storage_) {
    case Storage::Identity: return x;
    case Storage::Dense: return dense_.transpose() * x;
    case Storage::Sparse: return sparse_.transpose() * x;
  }
  return {};
}

SystemMatrix SystemMatrix::transpose() const {
  switch (storage_) {
    case Storage::Identity: return *this;
    case Storage::Dense: return SystemMatrix(MatrixXd(dense_.transpose()));
    case Storage::Sparse: return SystemMatrix(SparseMatrixXd(sparse_.transpose()));
  }
  return {};
}

double SystemMatrix::frobenius_norm() const {
  switch (storage_) {
    case Storage::Identity: return std::sqrt(static_cast<double>(n_));
    case Storage::Dense: return dense_.norm();
    case Storage::Sparse: return sparse_.norm();
  }
  return 0.0;
}

namespace {

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparse_as(const SystemMatrix& m) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return m.to_sparse();
  } else {
    return m.to_sparse_complex();
  }
}

}  // namespace

template <typename Scalar>
PencilFactorization<Scalar>::PencilFactorization(const SystemMatrix& a_mat, const SystemMatrix& e_mat, Scalar a,
                                                 Scalar e)
    : n_(a_mat.rows()) {
  if (e_mat.rows() != n_) throw DimensionError("pencil matrices differ in size");
  const bool use_sparse =
      a_mat.is_sparse() || (a_mat.is_identity() && e_mat.storage() != SystemMatrix::Storage::Dense);
  if (use_sparse) {
    Eigen::SparseMatrix<Scalar> combo = sparse_as<Scalar>(a_mat) * a;
    if (e != Scalar(0)) combo += sparse_as<Scalar>(e_mat) * e;
    combo.makeCompressed();
    sparse_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>>>();
    sparse_->analyzePattern(combo);
    sparse_->factorize(combo);
    if (sparse_->info() != Eigen::Success) throw SingularError("sparse LU failed: matrix is singular");
    return;
  }

  Mat combo = a_mat.to_dense().template cast<Scalar>() * a;
  if (e != Scalar(0)) {
    if (e_mat.is_identity()) {
      combo.diagonal().array() += e;
    } else {
      combo += e_mat.to_dense().template cast<Scalar>() * e;
    }
  }
  dense_ = std::make_shared<Eigen::PartialPivLU<Mat>>(combo);
  rcond_ = n_ == 0 ? 1.0 : dense_->rcond();
  if (!(rcond_ > std::numeric_limits<double>::epsilon())) {
    throw SingularError("matrix is numerically singular (rcond = " + std::to_string(rcond_) + ")");
  }
}

template <typename Scalar>
typename PencilFactorization<Scalar>::Mat PencilFactorization<Scalar>::solve(const Mat& rhs) const {
  if (rhs.rows() != n_) throw DimensionError("right-hand side has wrong row count");
  if (dense_) return dense_->solve(rhs);
  Mat x = sparse_->solve(rhs);
  if (sparse_->info() != Eigen::Success || !x.allFinite()) throw SingularError("sparse solve failed");
  return x;
}

PencilFactorization<double> factorize(const SystemMatrix& m) {
  return PencilFactorization<double>(m, SystemMatrix::identity(m.rows()), 1.0, 0.0);
}

template class PencilFactorization<double>;
template class PencilFactorization<Complex>;

}  // namespace balkit
