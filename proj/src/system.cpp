#include "balkit/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace balkit {

StateSpace::StateSpace(SystemMatrix e, SystemMatrix a, MatrixXd b, MatrixXd c, MatrixXd d)
    : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const Index n = a_.rows();
  if (n < 1) throw DimensionError("state dimension must be positive");
  if (e_.rows() != n) throw DimensionError("E and A differ in size");
  if (b_.rows() != n) throw DimensionError("B must have n = " + std::to_string(n) + " rows");
  if (c_.cols() != n) throw DimensionError("C must have n = " + std::to_string(n) + " columns");
  if (b_.cols() < 1 || c_.rows() < 1) throw DimensionError("input and output dimensions must be positive");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) throw DimensionError("D must be p x m");
}

StateSpace::StateSpace(MatrixXd a, MatrixXd b, MatrixXd c, MatrixXd d)
    : StateSpace(SystemMatrix::identity(a.rows()), SystemMatrix(a), std::move(b), std::move(c), std::move(d)) {}

StateSpace StateSpace::with_stability_asserted() const {
  StateSpace copy = *this;
  copy.stability_asserted_ = true;
  return copy;
}

StateSpace StateSpace::with_feedthrough(MatrixXd d) const {
  return StateSpace(e_, a_, b_, c_, std::move(d));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::BT: return "BT";
    case Method::SPA: return "SPA";
    case Method::SPA_DIRECT: return "SPA_DIRECT";
    case Method::QUADBT: return "QUADBT";
    case Method::QUADSPA: return "QUADSPA";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (Method m : {Method::BT, Method::SPA, Method::SPA_DIRECT, Method::QUADBT, Method::QUADSPA}) {
    if (upper == to_string(m)) return m;
  }
  throw UsageError("unknown method '" + std::string(name) + "'");
}

MatrixXcd eval_tf(const StateSpace& sys, Complex s) {
  PencilFactorization<Complex> lu(sys.A(), sys.E(), Complex(-1.0), s);
  const MatrixXcd x = lu.solve(sys.B().cast<Complex>());
  return sys.C().cast<Complex>() * x + sys.D().cast<Complex>();
}

MatrixXcd eval_tf(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c, const MatrixXcd& d, Complex s) {
  MatrixXcd pencil = -a;
  pencil.diagonal().array() += s;
  Eigen::PartialPivLU<MatrixXcd> lu(pencil);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) throw SingularError("sI - A is singular");
  return c * lu.solve(b) + d;
}

StateSpace reciprocal(const StateSpace& sys) {
  const PencilFactorization<double> lu = factorize(sys.A());
  const Index n = sys.n();
  const Index m = sys.m();

  // One multi-RHS solve: A [X_E, X_B] = [E, B].
  MatrixXd rhs(n, n + m);
  rhs.leftCols(n) = sys.E().to_dense();
  rhs.rightCols(m) = sys.B();
  const MatrixXd x = lu.solve(rhs);
  const auto a_inv_e = x.leftCols(n);
  const auto a_inv_b = x.rightCols(m);

  MatrixXd a_rec = sys.E().apply(MatrixXd(a_inv_e));
  MatrixXd b_rec = sys.E().apply(MatrixXd(a_inv_b));
  MatrixXd c_rec = -sys.C() * a_inv_e;
  MatrixXd d_rec = sys.D() - sys.C() * a_inv_b;
  return StateSpace(sys.E(), SystemMatrix(std::move(a_rec)), std::move(b_rec), std::move(c_rec), std::move(d_rec));
}

std::pair<StateSpace, MatrixXd> strictly_proper_split(const StateSpace& sys) {
  return {sys.with_feedthrough(MatrixXd::Zero(sys.p(), sys.m())), sys.D()};
}

MatrixXd dc_moment(const StateSpace& sys) {
  const PencilFactorization<double> lu = factorize(sys.A());
  return sys.D() - sys.C() * lu.solve(sys.B());
}

StabilityReport is_stable(const StateSpace& sys) {
  if (sys.n() > kMaxDenseStabilityOrder) {
    return {sys.stability_asserted(), std::numeric_limits<double>::quiet_NaN()};
  }
  MatrixXd pencil;
  if (sys.E().is_identity()) {
    pencil = sys.A().to_dense();
  } else {
    PencilFactorization<double> e_lu = [&] {
      try {
        return factorize(sys.E());
      } catch (const SingularError&) {
        throw SingularError("descriptor matrix E is singular");
      }
    }();
    pencil = e_lu.solve(sys.A().to_dense());
  }
  const Eigen::VectorXcd eig = Eigen::EigenSolver<MatrixXd>(pencil, false).eigenvalues();
  const double abscissa = eig.real().maxCoeff();
  return {abscissa < 0.0, abscissa};
}

namespace {

MatrixXd random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

StateSpace random_stable(Index n, Index m, Index p, std::uint64_t seed, const RandomSystemOptions& options) {
  if (n < 1 || m < 1 || p < 1) throw DimensionError("random_stable needs n, m, p >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);

  MatrixXd lambda = MatrixXd::Zero(n, n);
  Index i = 0;
  while (i < n) {
    const bool pair = i + 1 < n && unit(rng) < 0.5;
    const double decay = -unit(rng);
    if (pair) {
      const double freq = 0.1 + 1.9 * unit(rng);
      lambda(i, i) = decay;
      lambda(i + 1, i + 1) = decay;
      lambda(i, i + 1) = freq;
      lambda(i + 1, i) = -freq;
      i += 2;
    } else {
      lambda(i, i) = decay;
      i += 1;
    }
  }
  lambda.diagonal().array() -= options.margin;

  const MatrixXd q = random_orthogonal(n, rng);
  MatrixXd a = q * lambda * q.transpose();

  MatrixXd b(n, m);
  for (Index c = 0; c < m; ++c)
    for (Index r = 0; r < n; ++r) b(r, c) = sym(rng);
  MatrixXd c(p, n);
  for (Index col = 0; col < n; ++col)
    for (Index r = 0; r < p; ++r) c(r, col) = sym(rng);

  SystemMatrix e = SystemMatrix::identity(n);
  if (options.spd_descriptor) {
    // A + A^T < 0 keeps E^{-1} A stable for any SPD E.
    MatrixXd g(n, n);
    for (Index col = 0; col < n; ++col)
      for (Index r = 0; r < n; ++r) g(r, col) = sym(rng);
    MatrixXd spd = g * g.transpose() / static_cast<double>(n);
    spd = (0.5 * (spd + spd.transpose())).eval();
    spd.diagonal().array() += 0.5;
    e = SystemMatrix(std::move(spd));
  }
  return StateSpace(std::move(e), SystemMatrix(std::move(a)), std::move(b), std::move(c), MatrixXd::Zero(p, m));
}

StateSpace heat_1d(Index n) {
  if (n < 1) throw DimensionError("heat_1d needs n >= 1");
  const double scale = static_cast<double>(n + 1) * static_cast<double>(n + 1);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, -2.0 * scale);
    if (i > 0) triplets.emplace_back(i, i - 1, scale);
    if (i + 1 < n) triplets.emplace_back(i, i + 1, scale);
  }
  SparseMatrixXd a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());

  MatrixXd b = MatrixXd::Zero(n, 1);
  b(0, 0) = scale;
  MatrixXd c = MatrixXd::Constant(1, n, 1.0 / static_cast<double>(n));
  return StateSpace(SystemMatrix::identity(n), SystemMatrix(std::move(a)), std::move(b), std::move(c),
                    MatrixXd::Zero(1, 1))
      .with_stability_asserted();
}

StateSpace error_system(const StateSpace& fom, const ReducedModel& rom) {
  const StateSpace& red = rom.sys;
  if (fom.m() != red.m() || fom.p() != red.p()) {
    throw DimensionError("error_system: FOM is " + std::to_string(fom.p()) + "x" + std::to_string(fom.m()) +
                         " but ROM is " + std::to_string(red.p()) + "x" + std::to_string(red.m()));
  }
  const Index n = fom.n();
  const Index r = red.n();
  const Index total = n + r;

  auto block_diag = [&](const SystemMatrix& big, const SystemMatrix& small) -> SystemMatrix {
    if (big.is_identity() && small.is_identity()) return SystemMatrix::identity(total);
    if (big.is_sparse() || (big.is_identity() && n > 64)) {
      std::vector<Eigen::Triplet<double>> t;
      const SparseMatrixXd bs = big.to_sparse();
      for (Index k = 0; k < bs.outerSize(); ++k)
        for (SparseMatrixXd::InnerIterator it(bs, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
      const MatrixXd sd = small.to_dense();
      for (Index j = 0; j < r; ++j)
        for (Index i = 0; i < r; ++i)
          if (sd(i, j) != 0.0) t.emplace_back(n + i, n + j, sd(i, j));
      SparseMatrixXd out(total, total);
      out.setFromTriplets(t.begin(), t.end());
      return SystemMatrix(std::move(out));
    }
    MatrixXd out = MatrixXd::Zero(total, total);
    out.topLeftCorner(n, n) = big.to_dense();
    out.bottomRightCorner(r, r) = small.to_dense();
    return SystemMatrix(std::move(out));
  };

  MatrixXd b(total, fom.m());
  b << fom.B(), red.B();
  MatrixXd c(fom.p(), total);
  c << fom.C(), -red.C();
  return StateSpace(block_diag(fom.E(), red.E()), block_diag(fom.A(), red.A()), std::move(b), std::move(c),
                    fom.D() - red.D());
}

}  // namespace balkit
