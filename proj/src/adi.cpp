#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "balkit/gramian.hpp"

namespace balkit {

namespace {

// Arnoldi with modified Gram-Schmidt; returns the square Hessenberg block
// (smaller than k on breakdown).
template <typename Op>
MatrixXd arnoldi(const Op& op, Index n, int k) {
  k = static_cast<int>(std::min<Index>(k, n));
  MatrixXd v = MatrixXd::Zero(n, k + 1);
  MatrixXd h = MatrixXd::Zero(k + 1, k);
  v.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  int steps = 0;
  for (int j = 0; j < k; ++j) {
    VectorXd w = op(VectorXd(v.col(j)));
    for (int i = 0; i <= j; ++i) {
      h(i, j) = v.col(i).dot(w);
      w -= h(i, j) * v.col(i);
    }
    h(j + 1, j) = w.norm();
    steps = j + 1;
    if (h(j + 1, j) <= 1e-12 * h.topRows(j + 2).norm()) break;
    v.col(j + 1) = w / h(j + 1, j);
  }
  return h.topLeftCorner(steps, steps);
}

std::vector<Complex> ritz_values(const MatrixXd& h) {
  std::vector<Complex> out;
  if (h.size() == 0) return out;
  const VectorXcd ev = Eigen::EigenSolver<MatrixXd>(h, false).eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

// max over candidates t of prod |t - p| / |t + p|
double penzl_value(Complex t, const std::vector<Complex>& set) {
  double v = 1.0;
  for (const Complex& p : set) v *= std::abs(t - p) / std::abs(t + p);
  return v;
}

void append_with_conjugate(std::vector<Complex>& set, Complex p) {
  if (std::abs(p.imag()) <= 1e-12 * std::abs(p)) {
    set.emplace_back(p.real(), 0.0);
  } else {
    const Complex up(p.real(), std::abs(p.imag()));
    set.push_back(up);
    set.push_back(std::conj(up));
  }
}

bool contains(const std::vector<Complex>& set, Complex p) {
  for (const Complex& q : set)
    if (std::abs(q - p) <= 1e-14 * std::abs(p)) return true;
  return false;
}

}  // namespace

std::vector<Complex> penzl_shifts(const StateSpace& sys, const AdiOptions& options) {
  const Index n = sys.n();
  const PencilFactorization<double> a_lu = factorize(sys.A());
  std::optional<PencilFactorization<double>> e_lu;
  if (!sys.E().is_identity()) e_lu.emplace(factorize(sys.E()));

  auto plus = [&](const VectorXd& x) -> VectorXd {
    MatrixXd y = sys.A().apply(MatrixXd(x));
    if (e_lu) y = e_lu->solve(y);
    return y.col(0);
  };
  auto minus = [&](const VectorXd& x) -> VectorXd { return a_lu.solve(sys.E().apply(MatrixXd(x))).col(0); };

  std::vector<Complex> candidates;
  for (const Complex& t : ritz_values(arnoldi(plus, n, options.arnoldi_plus)))
    if (t.real() < 0.0) candidates.push_back(t);
  for (const Complex& t : ritz_values(arnoldi(minus, n, options.arnoldi_minus)))
    if (t.real() < 0.0 && std::abs(t) > 0.0) candidates.push_back(1.0 / t);
  if (candidates.empty()) throw ConvergenceError("no Ritz values in the open left half-plane; cannot pick ADI shifts");

  // First shift (with its conjugate) minimizes the worst ratio over the
  // candidate set.
  std::vector<Complex> shifts;
  double best = std::numeric_limits<double>::infinity();
  Complex first = candidates.front();
  for (const Complex& p : candidates) {
    std::vector<Complex> trial;
    append_with_conjugate(trial, p);
    double worst = 0.0;
    for (const Complex& t : candidates) worst = std::max(worst, penzl_value(t, trial));
    if (worst < best) {
      best = worst;
      first = p;
    }
  }
  append_with_conjugate(shifts, first);

  const std::size_t target = static_cast<std::size_t>(std::max(1, options.shift_count));
  while (shifts.size() < target) {
    double worst = -1.0;
    Complex next = candidates.front();
    for (const Complex& t : candidates) {
      const double v = penzl_value(t, shifts);
      if (v > worst) {
        worst = v;
        next = t;
      }
    }
    if (worst <= 0.0 || contains(shifts, next)) break;
    append_with_conjugate(shifts, next);
  }
  return shifts;
}

AdiResult lradi(const SystemMatrix& a, const SystemMatrix& e, const MatrixXd& f, const std::vector<Complex>& shifts,
                double tol, const AdiOptions& options) {
  const Index n = a.rows();
  if (f.rows() != n) throw DimensionError("lradi: right-hand side factor must have n rows");
  if (shifts.empty()) throw UsageError("lradi: no shifts");
  for (const Complex& p : shifts)
    if (!(p.real() < 0.0)) throw UsageError("lradi: shifts must have negative real part");

  const Index m = f.cols();
  const double rhs_norm = (f.transpose() * f).norm();
  MatrixXd w = f;
  MatrixXd z(n, 0);
  AdiResult out;
  if (rhs_norm == 0.0) {
    out.Z = z;
    return out;
  }

  // One factorization per distinct shift; shifts cycle.
  std::map<std::size_t, PencilFactorization<double>> real_lu;
  std::map<std::size_t, PencilFactorization<Complex>> complex_lu;

  auto append = [&](const MatrixXd& cols) {
    double ref = 0.0;
    for (Index j = 0; j < z.cols(); ++j) ref = std::max(ref, z.col(j).norm());
    for (Index j = 0; j < cols.cols(); ++j) ref = std::max(ref, cols.col(j).norm());
    std::vector<Index> keep;
    for (Index j = 0; j < cols.cols(); ++j)
      if (cols.col(j).norm() > options.column_drop * ref) keep.push_back(j);
    if (keep.empty()) return;
    const Index old = z.cols();
    z.conservativeResize(Eigen::NoChange, old + static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) z.col(old + static_cast<Index>(j)) = cols.col(keep[j]);
  };

  std::size_t k = 0;
  int iter = 0;
  double res = 1.0;
  while (iter < options.max_iterations) {
    const std::size_t idx = k % shifts.size();
    const Complex p = shifts[idx];
    const bool is_real = p.imag() == 0.0;
    if (is_real) {
      auto it = real_lu.find(idx);
      if (it == real_lu.end()) it = real_lu.emplace(idx, PencilFactorization<double>(a, e, 1.0, p.real())).first;
      const MatrixXd v = it->second.solve(w);
      w -= 2.0 * p.real() * e.apply(v);
      append(std::sqrt(-2.0 * p.real()) * v);
      k += 1;
      iter += 1;
    } else {
      auto it = complex_lu.find(idx);
      if (it == complex_lu.end()) it = complex_lu.emplace(idx, PencilFactorization<Complex>(a, e, Complex(1.0), p)).first;
      const MatrixXcd v = it->second.solve(w.cast<Complex>());
      // The conjugate partner is folded in without a second solve.
      const double gamma = 2.0 * std::sqrt(-p.real());
      const double delta = p.real() / p.imag();
      const MatrixXd re_part = v.real() + delta * v.imag();
      w += gamma * gamma * e.apply(re_part);
      MatrixXd cols(n, 2 * m);
      cols.leftCols(m) = gamma * re_part;
      cols.rightCols(m) = gamma * std::sqrt(delta * delta + 1.0) * v.imag();
      append(cols);
      k += 2;
      iter += 2;
    }
    res = (w.transpose() * w).norm() / rhs_norm;
    if (res <= tol) break;
  }
  out.iterations = iter;
  out.residual = res;
  if (res > tol) {
    throw ConvergenceError("low-rank ADI reached " + std::to_string(options.max_iterations) +
                           " iterations with residual " + std::to_string(res));
  }

  // Column compression: rank-revealing QR then SVD of the small triangle.
  if (z.cols() > 1) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(z);
    const Index k_cols = std::min(z.rows(), z.cols());
    MatrixXd r = qr.matrixQR().topRows(k_cols).triangularView<Eigen::Upper>();
    r = r * qr.colsPermutation().transpose();
    Eigen::JacobiSVD<MatrixXd> svd(r, Eigen::ComputeThinU);
    const VectorXd& s = svd.singularValues();
    Index keep = 0;
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > options.column_drop * s(0)) ++keep;
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(z.rows(), k_cols);
    z = q * svd.matrixU().leftCols(keep) * s.head(keep).asDiagonal();
  }
  out.Z = std::move(z);
  return out;
}

GramianFactors lyap_factor_lowrank(const StateSpace& sys, double tol, const AdiOptions& options) {
  if (!(tol > 0.0 && tol < 1.0)) throw UsageError("ADI tolerance must lie in (0, 1)");
  const std::vector<Complex> shifts = penzl_shifts(sys, options);
  // The transposed pencil has the same spectrum, so the shifts are shared.
  const AdiResult ctrl = lradi(sys.A(), sys.E(), sys.B(), shifts, tol, options);
  const AdiResult obs =
      lradi(sys.A().transpose(), sys.E().transpose(), MatrixXd(sys.C().transpose()), shifts, tol, options);

  GramianFactors out;
  out.U = ctrl.Z;
  out.L = obs.Z;
  out.exact = false;
  out.iterations_P = ctrl.iterations;
  out.iterations_Q = obs.iterations;
  out.residual_P = lyap_residual(sys.A(), sys.E(), out.U, sys.B(), GramianSide::Controllability);
  out.residual_Q = lyap_residual(sys.A(), sys.E(), out.L, sys.C(), GramianSide::Observability);
  return out;
}

}  // namespace balkit
