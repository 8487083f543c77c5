#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace balkit {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using SparseMatrixXd = Eigen::SparseMatrix<double>;
using SparseMatrixXcd = Eigen::SparseMatrix<Complex>;

// Error hierarchy. The CLI maps each family onto an exit code:
// DimensionError/UsageError -> 2, NumericalError -> 3, IoError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when a matrix that must be inverted (sE - A, A, E, an
/// intermediate reduced state matrix) is numerically singular.
class SingularError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Hankel (or data) singular values sigma_r and sigma_{r+1} coincide.
class TieError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  using IoError::IoError;
};

class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace balkit
