#include "balkit/gramian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace balkit {

namespace {

constexpr double kSignTol = 1e-12;
constexpr int kSignMaxIter = 100;

double log_abs_det(const Eigen::PartialPivLU<MatrixXd>& lu) {
  const MatrixXd& f = lu.matrixLU();
  double s = 0.0;
  for (Index i = 0; i < f.rows(); ++i) s += std::log(std::abs(f(i, i)));
  return s;
}

// Column compression of a tall factor Z (Z Z^T is preserved up to the
// rank-revealing QR threshold).
MatrixXd compress(const MatrixXd& z) {
  if (z.cols() <= 1) return z;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(z.transpose());
  qr.setThreshold(1e-15);
  const Index rank = std::max<Index>(qr.rank(), 1);
  MatrixXd r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  r = r * qr.colsPermutation().transpose();
  return r.transpose();
}

struct SignResult {
  MatrixXd p;
  MatrixXd q;
  int iterations = 0;
};

// Generalized sign iteration on the pencil (A, E) carrying factors of the
// controllability right-hand side (zc, with zc zc^T = B B^T) and optionally
// the observability one (zo, with zo zo^T = C^T C). Working with factors
// keeps the Gramians positive semidefinite to roundoff even when their
// spectrum spans many decades. Returns the Gramians after undoing the E
// scaling.
SignResult sign_iteration(const MatrixXd& a0, const MatrixXd& e, bool e_identity, MatrixXd zc, MatrixXd zo,
                          bool want_q) {
  const Index n = a0.rows();
  Eigen::PartialPivLU<MatrixXd> e_lu;
  double log_det_e = 0.0;
  if (!e_identity) {
    e_lu.compute(e);
    if (!(e_lu.rcond() > std::numeric_limits<double>::epsilon())) throw SingularError("descriptor matrix E is singular");
    log_det_e = log_abs_det(e_lu);
  }

  MatrixXd a = a0;
  int iter = 0;
  bool converged = false;
  int extra = 0;
  while (iter < kSignMaxIter) {
    ++iter;
    Eigen::PartialPivLU<MatrixXd> lu(a);
    if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
      throw NumericalError("sign iteration hit a singular iterate; the pencil has eigenvalues on the imaginary axis");
    }
    const double c = std::exp((log_abs_det(lu) - log_det_e) / static_cast<double>(n));

    // X = A_k^{-1} E
    const MatrixXd x = e_identity ? MatrixXd(lu.inverse()) : MatrixXd(lu.solve(e));
    const MatrixXd ex = e_identity ? x : MatrixXd(e * x);

    // Z <- [Z, c E A_k^{-1} Z] / sqrt(2c)
    const double scale = 1.0 / std::sqrt(2.0 * c);
    {
      MatrixXd t = lu.solve(zc);
      if (!e_identity) t = e * t;
      MatrixXd next(n, 2 * zc.cols());
      next << scale * zc, (scale * c) * t;
      zc = compress(next);
    }
    if (want_q) {
      MatrixXd next(n, 2 * zo.cols());
      next << scale * zo, (scale * c) * (x.transpose() * zo);
      zo = compress(next);
    }

    MatrixXd a_next = 0.5 * (a / c + c * ex);
    const double change = (a_next - a).norm();
    a = std::move(a_next);
    if (converged) {
      if (++extra >= 1) break;
    } else if (change <= kSignTol * a.norm()) {
      converged = true;
    }
  }
  if (!converged) throw ConvergenceError("sign iteration did not converge in " + std::to_string(kSignMaxIter) + " steps");

  // A_k -> -E for a stable pencil; anything else means eigenvalues in the
  // right half-plane.
  const double e_norm = e_identity ? std::sqrt(static_cast<double>(n)) : e.norm();
  const double gap = e_identity ? (a + MatrixXd::Identity(n, n)).norm() : (a + e).norm();
  if (gap > 1e-6 * e_norm) throw NumericalError("pencil (A, E) is not asymptotically stable");

  SignResult out;
  out.iterations = iter;
  // P = E^{-1} (Z Z^T / 2) E^{-T}, Q = E^{-T} (Y Y^T / 2) E^{-1}
  const double half = std::sqrt(0.5);
  MatrixXd fp = half * zc;
  if (!e_identity) fp = e_lu.solve(fp);
  out.p = fp * fp.transpose();
  if (want_q) {
    MatrixXd fq = half * zo;
    if (!e_identity) fq = Eigen::PartialPivLU<MatrixXd>(e.transpose()).solve(fq);
    out.q = fq * fq.transpose();
  }
  return out;
}

}  // namespace

MatrixXd lyap_dense(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& f, GramianSide side) {
  const Index n = a.rows();
  if (e.rows() != n) throw DimensionError("lyap_dense: A and E differ in size");
  if (side == GramianSide::Controllability) {
    if (f.rows() != n) throw DimensionError("lyap_dense: F must have n rows");
    return sign_iteration(a.to_dense(), e.to_dense(), e.is_identity(), f, MatrixXd(), false).p;
  }
  if (f.cols() != n) throw DimensionError("lyap_dense: F must have n columns");
  // The observability equation is the controllability one for (A^T, E^T, F^T).
  return sign_iteration(a.to_dense().transpose(), e.to_dense().transpose(), e.is_identity(), f.transpose(), MatrixXd(),
                        false)
      .p;
}

std::pair<MatrixXd, MatrixXd> gramians_dense(const StateSpace& sys) {
  SignResult r = sign_iteration(sys.A().to_dense(), sys.E().to_dense(), sys.E().is_identity(),
                                sys.B(), sys.C().transpose(), true);
  return {std::move(r.p), std::move(r.q)};
}

MatrixXd psd_factor(const MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (x + x.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (lmax <= 0.0) throw NumericalError("Gramian is not positive semidefinite");
  const double floor = 1e-12 * lmax;
  if (lambda.minCoeff() < -floor) {
    throw NumericalError("Gramian has a negative eigenvalue " + std::to_string(lambda.minCoeff()) +
                         "; the Lyapunov solve is inaccurate");
  }
  // Eigenvalues ascend; keep the strictly positive tail in descending order.
  std::vector<Index> keep;
  for (Index i = lambda.size() - 1; i >= 0; --i)
    if (lambda(i) > 0.0) keep.push_back(i);
  MatrixXd z(x.rows(), static_cast<Index>(keep.size()));
  for (Index j = 0; j < z.cols(); ++j) {
    const Index i = keep[static_cast<std::size_t>(j)];
    z.col(j) = eig.eigenvectors().col(i) * std::sqrt(lambda(i));
  }
  return z;
}

double lyap_residual(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& z, const MatrixXd& f,
                     GramianSide side) {
  const bool ctrl = side == GramianSide::Controllability;
  const MatrixXd rhs = ctrl ? f : MatrixXd(f.transpose());
  const Index k = z.cols();
  const Index m = rhs.cols();
  const double rhs_norm = (rhs.transpose() * rhs).norm();
  if (rhs_norm == 0.0) return 0.0;

  // R = K J K^T with K = [A Z, E Z, F] (transposed operators for the
  // observability side) and J swapping the first two blocks.
  MatrixXd kmat(z.rows(), 2 * k + m);
  kmat.leftCols(k) = ctrl ? a.apply(z) : a.apply_transpose(z);
  kmat.middleCols(k, k) = ctrl ? e.apply(z) : e.apply_transpose(z);
  kmat.rightCols(m) = rhs;

  MatrixXd rfac;
  if (kmat.rows() > kmat.cols()) {
    Eigen::HouseholderQR<MatrixXd> qr(kmat);
    rfac = qr.matrixQR().topRows(kmat.cols()).triangularView<Eigen::Upper>();
  } else {
    rfac = kmat;
  }
  MatrixXd j = MatrixXd::Zero(2 * k + m, 2 * k + m);
  j.block(0, k, k, k).setIdentity();
  j.block(k, 0, k, k).setIdentity();
  j.bottomRightCorner(m, m).setIdentity();
  return (rfac * j * rfac.transpose()).norm() / rhs_norm;
}

GramianFactors lyap_factor_dense(const StateSpace& sys) {
  auto [p, q] = gramians_dense(sys);
  GramianFactors out;
  out.U = psd_factor(p);
  out.L = psd_factor(q);
  out.exact = true;
  out.residual_P = lyap_residual(sys.A(), sys.E(), out.U, sys.B(), GramianSide::Controllability);
  out.residual_Q = lyap_residual(sys.A(), sys.E(), out.L, sys.C(), GramianSide::Observability);
  return out;
}

ProjectionData hankel_projection(const GramianFactors& factors, const SystemMatrix& e, std::optional<Index> r) {
  if (factors.U.rows() != e.rows() || factors.L.rows() != e.rows()) {
    throw DimensionError("hankel_projection: factors do not match E");
  }
  const MatrixXd core = factors.L.transpose() * e.apply(factors.U);
  Eigen::BDCSVD<MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ProjectionData out;
  out.sigma = svd.singularValues();
  const double s1 = out.sigma.size() > 0 ? out.sigma(0) : 0.0;
  out.rank = 0;
  for (Index i = 0; i < out.sigma.size(); ++i)
    if (out.sigma(i) > kRankFloor * s1) ++out.rank;
  if (!r) return out;

  const Index order = *r;
  if (order < 1) throw UsageError("reduced order must be positive");
  if (order > out.rank) {
    throw RankError("requested order " + std::to_string(order) + " exceeds the numerical rank " +
                    std::to_string(out.rank) + " of the Hankel spectrum");
  }
  out.Z1 = svd.matrixU().leftCols(order);
  out.Y1 = svd.matrixV().leftCols(order);
  out.S1 = out.sigma.head(order);
  const VectorXd inv_sqrt = out.S1.array().rsqrt();
  out.W = factors.L * out.Z1 * inv_sqrt.asDiagonal();
  out.V = factors.U * out.Y1 * inv_sqrt.asDiagonal();
  return out;
}

VectorXd hankel_singular_values(const StateSpace& sys) {
  return hankel_projection(lyap_factor_dense(sys), sys.E()).sigma;
}

}  // namespace balkit
