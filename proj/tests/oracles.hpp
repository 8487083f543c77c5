#pragma once

// Independent reference computations for the tests: Kronecker-product
// Lyapunov solves, explicit quadrature factors, finite differences and
// transfer comparisons on a grid.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "balkit/quadrature.hpp"
#include "balkit/system.hpp"

namespace oracle {

using balkit::Complex;
using balkit::Index;
using balkit::MatrixXcd;
using balkit::MatrixXd;
using balkit::StateSpace;

/// S1: H(s) = 1/(s+1)
inline StateSpace s1(double d = 0.0) {
  return StateSpace(MatrixXd::Constant(1, 1, -1.0), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                    MatrixXd::Constant(1, 1, d));
}

/// S2: H(s) = 1/(s+1) + 1/(s+2)
inline StateSpace s2() {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  return StateSpace(a, MatrixXd::Ones(2, 1), MatrixXd::Ones(1, 2), MatrixXd::Zero(1, 1));
}

/// Solves A X E^T + E X A^T + F F^T = 0 through vec(A X E^T) = (E kron A) vec(X).
inline MatrixXd kron_lyap(const MatrixXd& a, const MatrixXd& e, const MatrixXd& f) {
  const Index n = a.rows();
  const MatrixXd op = Eigen::kroneckerProduct(e, a) + Eigen::kroneckerProduct(a, e);
  const MatrixXd rhs = -(f * f.transpose());
  const Eigen::VectorXd x = op.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n));
  return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

/// Explicit resolvent (s E - A)^{-1} as a dense complex matrix.
inline MatrixXcd resolvent(const StateSpace& sys, Complex s) {
  const MatrixXcd pencil = s * sys.E().to_dense().cast<Complex>() - sys.A().to_dense().cast<Complex>();
  return pencil.inverse();
}

struct Factors {
  MatrixXcd U;   // n x (K m)
  MatrixXcd Ls;  // (J p) x n, the conjugate-transposed observability factor
  MatrixXcd A;   // state matrix the data matrices are built with
  MatrixXcd B;
  MatrixXcd C;
};

/// Quadrature factors of the system (BT) or of its reciprocal (SPA) for the
/// given signed nodes and weights, E = I.
inline Factors quad_factors(const StateSpace& sys, const std::vector<double>& wc, const std::vector<double>& rc,
                            const std::vector<double>& wo, const std::vector<double>& ro, bool spa) {
  const Index n = sys.n(), m = sys.m(), p = sys.p();
  const StateSpace work = spa ? balkit::reciprocal(sys) : sys;
  Factors f;
  f.A = work.A().to_dense().cast<Complex>();
  f.B = work.B().cast<Complex>();
  f.C = work.C().cast<Complex>();
  f.U.resize(n, static_cast<Index>(wc.size()) * m);
  f.Ls.resize(static_cast<Index>(wo.size()) * p, n);
  const Complex I(0.0, 1.0);
  for (std::size_t k = 0; k < wc.size(); ++k) {
    const Complex s = spa ? 1.0 / (I * wc[k]) : I * wc[k];
    const double scale = spa ? rc[k] / wc[k] : rc[k];
    f.U.middleCols(static_cast<Index>(k) * m, m) = scale * resolvent(work, s) * f.B;
  }
  for (std::size_t j = 0; j < wo.size(); ++j) {
    const Complex s = spa ? 1.0 / (I * wo[j]) : I * wo[j];
    const double scale = spa ? ro[j] / wo[j] : ro[j];
    f.Ls.middleRows(static_cast<Index>(j) * p, p) = scale * f.C * resolvent(work, s);
  }
  return f;
}

/// Central finite difference of H along the imaginary axis: dH/ds at i w.
inline MatrixXcd fd_derivative(const StateSpace& sys, double w, double h = 1e-6) {
  const Complex I(0.0, 1.0);
  const MatrixXcd up = balkit::eval_tf(sys, I * (w + h));
  const MatrixXcd dn = balkit::eval_tf(sys, I * (w - h));
  return (up - dn) / (2.0 * I * h);
}

/// Log grid plus s = 0 used for transfer comparisons.
inline std::vector<Complex> grid_points(Index n = 40, double lo = 1e-3, double hi = 1e3, bool with_zero = true) {
  std::vector<Complex> out;
  if (with_zero) out.emplace_back(0.0, 0.0);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out.emplace_back(0.0, std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
  }
  return out;
}

template <typename F, typename G>
double max_deviation(const F& h1, const G& h2, const std::vector<Complex>& pts) {
  double worst = 0.0;
  for (const Complex& s : pts) worst = std::max(worst, (h1(s) - h2(s)).norm());
  return worst;
}

template <typename F>
double max_norm(const F& h, const std::vector<Complex>& pts) {
  double worst = 0.0;
  for (const Complex& s : pts) worst = std::max(worst, h(s).norm());
  return worst;
}

/// Random matrix with singular values in [1, cond].
inline MatrixXd random_transform(Index n, double cond, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  auto orth = [&] {
    MatrixXd x(n, n);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    Eigen::HouseholderQR<MatrixXd> qr(x);
    return MatrixXd(qr.householderQ());
  };
  Eigen::VectorXd s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::pow(cond, n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
  return orth() * s.asDiagonal() * orth().transpose();
}

}  // namespace oracle
