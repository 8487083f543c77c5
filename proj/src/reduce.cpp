#include "balkit/reduce.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace balkit {

namespace {

Index resolve_order(const VectorXd& sigma, Index rank, const OrderSpec& spec) {
  if (spec.order && spec.tol) throw UsageError("give either an order or a tolerance, not both");
  Index r = 0;
  if (spec.order) {
    r = *spec.order;
  } else if (spec.tol) {
    r = order_from_tolerance(sigma.head(rank), *spec.tol);
  } else {
    throw UsageError("no reduced order or tolerance given");
  }
  if (r < 1) throw UsageError("reduced order must be positive");
  if (r > rank) {
    throw RankError("requested order " + std::to_string(r) + " exceeds the numerical rank " + std::to_string(rank) +
                    " of the Hankel spectrum");
  }
  return r;
}

bool tied(const VectorXd& sigma, Index r) {
  if (r >= sigma.size()) return false;
  return (sigma(r - 1) - sigma(r)) < kTieGap * sigma(r - 1);
}

std::string tie_message(const VectorXd& sigma, Index r) {
  std::ostringstream os;
  os.precision(17);
  os << "sigma_" << r << " = " << sigma(r - 1) << " and sigma_" << r + 1 << " = " << sigma(r) << " are tied";
  return os.str();
}

void check_factors(const StateSpace& sys, const GramianFactors& f) {
  if (f.U.rows() != sys.n() || f.L.rows() != sys.n()) throw DimensionError("Gramian factors do not match the system");
}

}  // namespace

GramianFactors compute_factors(const StateSpace& sys, const ReductionOptions& options) {
  if (options.factors == FactorMode::Dense) return lyap_factor_dense(sys);
  return lyap_factor_lowrank(sys, options.adi_tol, options.adi);
}

Index order_from_tolerance(const VectorXd& sigma, double tol) {
  if (sigma.size() == 0) throw UsageError("empty Hankel spectrum");
  if (!(tol >= 0.0)) throw UsageError("tolerance must be nonnegative");
  const double total = 2.0 * sigma.sum();
  // Tails are summed directly; a running difference cancels badly.
  for (Index r = 1; r <= sigma.size(); ++r) {
    const double tail = 2.0 * sigma.tail(sigma.size() - r).sum();
    if (tail <= tol * total) return r;
  }
  return sigma.size();
}

ReducedModel bt(const StateSpace& sys, OrderSpec order, const ReductionOptions& options) {
  return bt(sys, compute_factors(sys, options), order);
}

ReducedModel bt(const StateSpace& sys, const GramianFactors& factors, OrderSpec order) {
  check_factors(sys, factors);
  const ProjectionData probe = hankel_projection(factors, sys.E());
  const Index r = resolve_order(probe.sigma, probe.rank, order);
  const ProjectionData pd = hankel_projection(factors, sys.E(), r);

  ReducedModel rom;
  rom.method = Method::BT;
  rom.order = static_cast<int>(r);
  rom.hankel_used = pd.sigma;
  if (tied(pd.sigma, r)) rom.notes.push_back("warning: " + tie_message(pd.sigma, r) + "; truncation is not unique");

  MatrixXd ar = pd.W.transpose() * sys.A().apply(pd.V);
  MatrixXd br = pd.W.transpose() * sys.B();
  MatrixXd cr = sys.C() * pd.V;
  rom.sys = StateSpace(std::move(ar), std::move(br), std::move(cr), sys.D());
  return rom;
}

ReducedModel spa(const StateSpace& sys, OrderSpec order, const ReductionOptions& options) {
  return spa(sys, compute_factors(sys, options), order);
}

ReducedModel spa(const StateSpace& sys, const GramianFactors& factors, OrderSpec order) {
  check_factors(sys, factors);
  const ProjectionData probe = hankel_projection(factors, sys.E());
  const Index r = resolve_order(probe.sigma, probe.rank, order);
  if (tied(probe.sigma, r)) throw TieError(tie_message(probe.sigma, r) + "; SPA needs a strict gap");
  const ProjectionData pd = hankel_projection(factors, sys.E(), r);

  // A_V = A^{-1} (E V) and B_A = A^{-1} B from one factorization of A.
  const PencilFactorization<double> a_lu = factorize(sys.A());
  const Index m = sys.m();
  MatrixXd rhs(sys.n(), r + m);
  rhs.leftCols(r) = sys.E().apply(pd.V);
  rhs.rightCols(m) = sys.B();
  const MatrixXd sol = a_lu.solve(rhs);
  const auto av = sol.leftCols(r);
  const auto ba = sol.rightCols(m);

  // Intermediate model of the reciprocal system.
  const MatrixXd wte = sys.E().apply_transpose(pd.W).transpose();
  const MatrixXd at = wte * av;
  const MatrixXd bt_ = wte * ba;
  const MatrixXd ct = -sys.C() * av;
  const MatrixXd dt = sys.D() - sys.C() * ba;

  ReducedModel rom;
  rom.method = Method::SPA;
  rom.order = static_cast<int>(r);
  rom.hankel_used = pd.sigma;

  Eigen::PartialPivLU<MatrixXd> lu(at);
  const double rc = lu.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon())) {
    throw SingularError("intermediate reduced state matrix is singular");
  }
  if (1.0 / rc > kIntermediateCondWarn) {
    rom.notes.push_back("warning: intermediate reduced state matrix has condition estimate " + std::to_string(1.0 / rc));
  }
  // Successive evaluation: A_r first, then B_r and C_r from it.
  MatrixXd ar = lu.inverse();
  MatrixXd br = ar * bt_;
  MatrixXd cr = -ct * ar;
  MatrixXd dr = dt + cr * bt_;
  rom.sys = StateSpace(std::move(ar), std::move(br), std::move(cr), std::move(dr));
  return rom;
}

ReducedModel spa_direct(const StateSpace& sys, OrderSpec order) {
  return spa_direct(sys, lyap_factor_dense(sys), order);
}

ReducedModel spa_direct(const StateSpace& sys, const GramianFactors& factors, OrderSpec order) {
  check_factors(sys, factors);
  const ProjectionData probe = hankel_projection(factors, sys.E());
  const Index r = resolve_order(probe.sigma, probe.rank, order);
  if (tied(probe.sigma, r)) throw TieError(tie_message(probe.sigma, r) + "; SPA needs a strict gap");

  // Balanced coordinates of the minimal part (all states with sigma above
  // the rank floor); states with zero sigma do not enter the transfer.
  const Index k = probe.rank;
  const ProjectionData full = hankel_projection(factors, sys.E(), k);
  const MatrixXd abar = full.W.transpose() * sys.A().apply(full.V);
  const MatrixXd bbar = full.W.transpose() * sys.B();
  const MatrixXd cbar = sys.C() * full.V;

  ReducedModel rom;
  rom.method = Method::SPA_DIRECT;
  rom.order = static_cast<int>(r);
  rom.hankel_used = probe.sigma;

  const Index q = k - r;
  if (q == 0) {
    rom.sys = StateSpace(abar, bbar, cbar, sys.D());
    return rom;
  }
  const MatrixXd a11 = abar.topLeftCorner(r, r);
  const MatrixXd a12 = abar.topRightCorner(r, q);
  const MatrixXd a21 = abar.bottomLeftCorner(q, r);
  const MatrixXd a22 = abar.bottomRightCorner(q, q);
  Eigen::PartialPivLU<MatrixXd> lu(a22);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) throw SingularError("balanced block A22 is singular");

  const MatrixXd x21 = lu.solve(a21);
  const MatrixXd xb2 = lu.solve(MatrixXd(bbar.bottomRows(q)));
  MatrixXd ar = a11 - a12 * x21;
  MatrixXd br = bbar.topRows(r) - a12 * xb2;
  MatrixXd cr = cbar.leftCols(r) - cbar.rightCols(q) * x21;
  MatrixXd dr = sys.D() - cbar.rightCols(q) * xb2;
  rom.sys = StateSpace(std::move(ar), std::move(br), std::move(cr), std::move(dr));
  return rom;
}

}  // namespace balkit
