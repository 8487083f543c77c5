#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "balkit/quadrature.hpp"
#include "balkit/system.hpp"

namespace balkit {

/// Any s -> H(s) map; lets metrics treat real and complex models alike.
using TransferFunction = std::function<MatrixXcd(Complex)>;

TransferFunction transfer(const StateSpace& sys);
TransferFunction transfer(const ReducedModel& rom);
TransferFunction transfer(const ComplexRom& rom);
/// s -> H1(s) - H2(s)
TransferFunction difference(TransferFunction h1, TransferFunction h2);

/// Largest singular value of H(i w) per grid node.
VectorXd freq_response(const TransferFunction& h, const std::vector<double>& grid);
/// All min(p, m) singular values per node, one row per node.
MatrixXd freq_response_all(const TransferFunction& h, const std::vector<double>& grid);

struct HinfEstimate {
  /// a lower bound of the H-infinity norm
  double value = 0.0;
  double omega = 0.0;
};

/// Maximum over n log-spaced nodes in [lo, hi]; with refine, a
/// golden-section search in log w around the grid maximizer.
HinfEstimate hinf_grid(const TransferFunction& h, double lo, double hi, Index n = 400, bool refine = true);

/// 2 sum_{i>r} sigma_i
double bt_bound(const VectorXd& sigma, Index r);

/// Eigenvalues sorted by real part, then imaginary part.
VectorXcd poles(const MatrixXcd& a);
VectorXcd poles(const ReducedModel& rom);

/// CSV with header "omega,<name0>,<name1>,..." and one row per node.
void write_response_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<std::string>& names,
                        const std::vector<VectorXd>& columns);

}  // namespace balkit
