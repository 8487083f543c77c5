#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "balkit/system_matrix.hpp"
#include "balkit/types.hpp"

namespace balkit {

/// Descriptor realization E x' = A x + B u, y = C x + D u.
///
/// Values are immutable after construction. Dimensions are validated in the
/// constructor; nonsingularity of E and A is checked lazily by the
/// operations that need it.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(SystemMatrix e, SystemMatrix a, MatrixXd b, MatrixXd c, MatrixXd d);
  /// Standard realization with E = I.
  StateSpace(MatrixXd a, MatrixXd b, MatrixXd c, MatrixXd d);

  const SystemMatrix& E() const { return e_; }
  const SystemMatrix& A() const { return a_; }
  const MatrixXd& B() const { return b_; }
  const MatrixXd& C() const { return c_; }
  const MatrixXd& D() const { return d_; }

  Index n() const { return a_.rows(); }
  Index m() const { return b_.cols(); }
  Index p() const { return c_.rows(); }

  /// Set when the caller vouches for stability of a system too large for a
  /// dense eigensolver.
  bool stability_asserted() const { return stability_asserted_; }
  StateSpace with_stability_asserted() const;
  StateSpace with_feedthrough(MatrixXd d) const;

 private:
  SystemMatrix e_;
  SystemMatrix a_;
  MatrixXd b_;
  MatrixXd c_;
  MatrixXd d_;
  bool stability_asserted_ = false;
};

enum class Method { BT, SPA, SPA_DIRECT, QUADBT, QUADSPA };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Reduced-order model with E = I and provenance.
struct ReducedModel {
  StateSpace sys;
  Method method = Method::BT;
  int order = 0;
  std::optional<VectorXd> hankel_used;
  std::vector<std::string> notes;
};

/// H(s) = C (sE - A)^{-1} B + D.
MatrixXcd eval_tf(const StateSpace& sys, Complex s);

/// Dense complex realization transfer function, used for complex-valued
/// quadrature ROMs (E = I).
MatrixXcd eval_tf(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c, const MatrixXcd& d, Complex s);

/// (E, E A^{-1} E, E A^{-1} B, -C A^{-1} E, D - C A^{-1} B), computed with
/// one LU of A and block solves; A^{-1} is never formed.
StateSpace reciprocal(const StateSpace& sys);

/// Returns (system with D = 0, D).
std::pair<StateSpace, MatrixXd> strictly_proper_split(const StateSpace& sys);

/// H(0) = D - C A^{-1} B.
MatrixXd dc_moment(const StateSpace& sys);

struct StabilityReport {
  bool stable = false;
  /// max real part of the eigenvalues of E^{-1} A (NaN when only asserted)
  double abscissa = 0.0;
};

/// Dense eigenvalue check up to kMaxDenseStabilityOrder states; above that
/// the answer is the user-asserted flag.
inline constexpr Index kMaxDenseStabilityOrder = 5000;
StabilityReport is_stable(const StateSpace& sys);

struct RandomSystemOptions {
  bool spd_descriptor = false;
  double margin = 0.1;
};

/// Deterministic random asymptotically stable system:
/// A = Q (Lambda - margin I) Q^T with Lambda block diagonal (1x1 and 2x2
/// blocks whose symmetric part is negative definite) and Q orthogonal.
StateSpace random_stable(Index n, Index m, Index p, std::uint64_t seed, const RandomSystemOptions& options = {});

/// Semi-discretized heat equation on (0, 1) with n interior nodes:
/// sparse tridiagonal A = (n+1)^2 tridiag(1, -2, 1), Dirichlet control at the
/// left boundary and the mean temperature as output.
StateSpace heat_1d(Index n);

/// Block-diagonal realization of H(s) - H_r(s).
StateSpace error_system(const StateSpace& fom, const ReducedModel& rom);

}  // namespace balkit
