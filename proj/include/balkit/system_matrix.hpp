#pragma once

#include <memory>

#include <Eigen/SparseLU>

#include "balkit/types.hpp"

namespace balkit {

/// Square n x n state or descriptor matrix stored as identity, dense, or
/// sparse. Large benchmark systems stay sparse end to end; small systems
/// and reciprocal transforms are dense.
class SystemMatrix {
 public:
  enum class Storage { Identity, Dense, Sparse };

  SystemMatrix() = default;
  explicit SystemMatrix(MatrixXd dense);
  explicit SystemMatrix(SparseMatrixXd sparse);
  static SystemMatrix identity(Index n);

  Index rows() const { return n_; }
  Index cols() const { return n_; }
  Storage storage() const { return storage_; }
  bool is_identity() const { return storage_ == Storage::Identity; }
  bool is_sparse() const { return storage_ == Storage::Sparse; }

  MatrixXd to_dense() const;
  SparseMatrixXd to_sparse() const;
  SparseMatrixXcd to_sparse_complex() const;

  /// this * X
  MatrixXd apply(const MatrixXd& x) const;
  MatrixXcd apply(const MatrixXcd& x) const;
  /// this^T * X
  MatrixXd apply_transpose(const MatrixXd& x) const;

  SystemMatrix transpose() const;
  double frobenius_norm() const;

 private:
  Storage storage_ = Storage::Identity;
  Index n_ = 0;
  MatrixXd dense_;
  SparseMatrixXd sparse_;
};

/// Factorization of the pencil combination a*A + e*E, dense (partial pivot
/// LU) or sparse (SparseLU with COLAMD ordering) following the storage of A.
/// Throws SingularError when the combination is numerically singular; for
/// dense storage that means a reciprocal condition estimate below machine
/// epsilon.
template <typename Scalar>
class PencilFactorization {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PencilFactorization(const SystemMatrix& a_mat, const SystemMatrix& e_mat, Scalar a, Scalar e);

  Mat solve(const Mat& rhs) const;
  Index size() const { return n_; }
  /// Reciprocal condition estimate (dense only; 1 for sparse storage).
  double rcond() const { return rcond_; }

 private:
  Index n_ = 0;
  double rcond_ = 1.0;
  std::shared_ptr<Eigen::PartialPivLU<Mat>> dense_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>>> sparse_;
};

/// LU of a single matrix (A or E).
PencilFactorization<double> factorize(const SystemMatrix& m);

extern template class PencilFactorization<double>;
extern template class PencilFactorization<Complex>;

}  // namespace balkit
