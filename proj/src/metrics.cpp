#include "balkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "balkit/parallel.hpp"

namespace balkit {

TransferFunction transfer(const StateSpace& sys) {
  return [sys](Complex s) { return eval_tf(sys, s); };
}

TransferFunction transfer(const ReducedModel& rom) { return transfer(rom.sys); }

TransferFunction transfer(const ComplexRom& rom) {
  return [a = rom.A, b = rom.B, c = rom.C, d = rom.D](Complex s) { return eval_tf(a, b, c, d, s); };
}

TransferFunction difference(TransferFunction h1, TransferFunction h2) {
  return [h1 = std::move(h1), h2 = std::move(h2)](Complex s) -> MatrixXcd {
    MatrixXcd a = h1(s);
    const MatrixXcd b = h2(s);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("models differ in input/output size");
    return a - b;
  };
}

namespace {

double sigma_max(const MatrixXcd& h) {
  if (h.size() == 1) return std::abs(h(0, 0));
  return Eigen::JacobiSVD<MatrixXcd>(h).singularValues()(0);
}

}  // namespace

VectorXd freq_response(const TransferFunction& h, const std::vector<double>& grid) {
  VectorXd out(static_cast<Index>(grid.size()));
  parallel_for(grid.size(), [&](std::size_t i) { out(static_cast<Index>(i)) = sigma_max(h(Complex(0.0, grid[i]))); });
  return out;
}

MatrixXd freq_response_all(const TransferFunction& h, const std::vector<double>& grid) {
  std::vector<VectorXd> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    rows[i] = Eigen::JacobiSVD<MatrixXcd>(h(Complex(0.0, grid[i]))).singularValues();
  });
  const Index k = rows.empty() ? 0 : rows.front().size();
  MatrixXd out(static_cast<Index>(grid.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = rows[i].transpose();
  return out;
}

HinfEstimate hinf_grid(const TransferFunction& h, double lo, double hi, Index n, bool refine) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw UsageError("invalid H-infinity grid");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index i = 0; i < n; ++i) grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  const VectorXd vals = freq_response(h, grid);
  Index best = 0;
  vals.maxCoeff(&best);
  HinfEstimate out{vals(best), grid[best]};
  if (!refine) return out;

  // Golden-section search for a maximum of sigma_max over log10 w on the
  // bracket formed by the neighbours of the grid maximizer.
  const double step = (b - a) / static_cast<double>(n - 1);
  double left = std::log10(grid[best]) - step;
  double right = std::log10(grid[best]) + step;
  auto f = [&](double lw) { return sigma_max(h(Complex(0.0, std::pow(10.0, lw)))); };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = right - g * (right - left);
  double x2 = left + g * (right - left);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60 && right - left > 1e-12; ++it) {
    if (f1 > f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - g * (right - left);
      f1 = f(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + g * (right - left);
      f2 = f(x2);
    }
  }
  const double xm = f1 > f2 ? x1 : x2;
  const double fm = std::max(f1, f2);
  if (fm > out.value) out = {fm, std::pow(10.0, xm)};
  return out;
}

double bt_bound(const VectorXd& sigma, Index r) {
  if (r < 0 || r >= sigma.size()) {
    throw UsageError("bt_bound: r = " + std::to_string(r) + " must lie in [0, " + std::to_string(sigma.size()) + ")");
  }
  return 2.0 * sigma.tail(sigma.size() - r).sum();
}

VectorXcd poles(const MatrixXcd& a) {
  VectorXcd ev = Eigen::ComplexEigenSolver<MatrixXcd>(a, false).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

VectorXcd poles(const ReducedModel& rom) {
  const StateSpace& s = rom.sys;
  MatrixXd a = s.A().to_dense();
  if (!s.E().is_identity()) a = factorize(s.E()).solve(a);
  VectorXcd ev = Eigen::EigenSolver<MatrixXd>(a, false).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

void write_response_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<std::string>& names,
                        const std::vector<VectorXd>& columns) {
  if (names.size() != columns.size()) throw DimensionError("column names and data differ in count");
  for (const auto& c : columns)
    if (c.size() != static_cast<Index>(grid.size())) throw DimensionError("column length differs from grid size");
  out << "omega";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << grid[i];
    for (const auto& c : columns) out << ',' << c(static_cast<Index>(i));
    out << '\n';
  }
}

}  // namespace balkit
