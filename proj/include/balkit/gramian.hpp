#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "balkit/system.hpp"
#include "balkit/types.hpp"

namespace balkit {

enum class GramianSide { Controllability, Observability };

/// Square-root factors P ~ U U^T and Q ~ L L^T.
struct GramianFactors {
  MatrixXd U;
  MatrixXd L;
  bool exact = false;
  /// Relative Frobenius residuals ||A X E^T + E X A^T + F F^T|| / ||F F^T||
  /// (and the observability analogue), evaluated from the factors.
  double residual_P = 0.0;
  double residual_Q = 0.0;
  int iterations_P = 0;
  int iterations_Q = 0;
};

/// Square-root data from the SVD of L^T E U.
struct ProjectionData {
  MatrixXd Z1;
  VectorXd S1;
  MatrixXd Y1;
  MatrixXd W;
  MatrixXd V;
  /// all singular values of L^T E U, descending
  VectorXd sigma;
  /// number of singular values above kRankFloor * sigma_1
  Index rank = 0;
};

/// Singular values at or below this fraction of the largest are zero.
inline constexpr double kRankFloor = 1e-12;

/// Dense generalized Lyapunov solve by the scaled sign-function iteration.
/// Controllability: A X E^T + E X A^T + F F^T = 0 with F n x k.
/// Observability:   A^T X E + E^T X A + F^T F = 0 with F k x n.
MatrixXd lyap_dense(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& f, GramianSide side);

/// Both Gramians from one sign iteration (P, Q).
std::pair<MatrixXd, MatrixXd> gramians_dense(const StateSpace& sys);

/// Factor of a symmetric positive semidefinite X. Eigenvalues in
/// [-1e-12 lambda_max, 0] are clipped, those columns are dropped; more
/// negative eigenvalues raise NumericalError.
MatrixXd psd_factor(const MatrixXd& x);

/// Relative residual of the factored Lyapunov equation with X = Z Z^T.
/// Uses a thin QR so nothing n x n is formed.
double lyap_residual(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& z, const MatrixXd& f,
                     GramianSide side);

GramianFactors lyap_factor_dense(const StateSpace& sys);

struct AdiOptions {
  int max_iterations = 200;
  /// Arnoldi steps on E^{-1} A and on A^{-1} E
  int arnoldi_plus = 20;
  int arnoldi_minus = 10;
  /// number of shifts kept by the heuristic
  int shift_count = 10;
  /// new columns below this fraction of the largest column norm are dropped
  double column_drop = 1e-12;
};

/// Shift parameters with negative real part, complex ones in consecutive
/// conjugate pairs.
std::vector<Complex> penzl_shifts(const StateSpace& sys, const AdiOptions& options = {});

struct AdiResult {
  MatrixXd Z;
  double residual = 0.0;
  int iterations = 0;
};

/// Low-rank ADI in residual-factor form for the controllability equation
/// A X E^T + E X A^T + F F^T = 0. Stops when ||W^T W||_F <= tol ||F^T F||_F.
AdiResult lradi(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& f, const std::vector<Complex>& shifts,
                double tol, const AdiOptions& options = {});

GramianFactors lyap_factor_lowrank(const StateSpace& sys, double tol, const AdiOptions& options = {});

/// SVD of L^T E U and, when r is given, the bases W = L Z1 S1^{-1/2},
/// V = U Y1 S1^{-1/2}. Without r only sigma and rank are filled.
ProjectionData hankel_projection(const GramianFactors& factors, const SystemMatrix& e,
                                 std::optional<Index> r = std::nullopt);

/// Hankel singular values from dense factors.
VectorXd hankel_singular_values(const StateSpace& sys);

}  // namespace balkit
