#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "balkit/types.hpp"

namespace balkit::bench {

struct HeatRow {
  Index n = 0;
  Index r = 0;
  /// seconds; empty when the dense path was skipped
  std::optional<double> dense_seconds;
  double lowrank_seconds = 0.0;
  Index rank_u = 0;
  Index rank_l = 0;
  double residual_p = 0.0;
  double residual_q = 0.0;
  /// grid H-infinity of the difference of the two SPA ROMs over that of
  /// the FOM; empty without a dense ROM
  std::optional<double> relative_deviation;
};

struct HeatOptions {
  std::vector<Index> sizes{100, 400, 1600, 6400};
  Index max_dense = 1600;
  Index order = 6;
  double adi_tol = 1e-12;
};

std::vector<HeatRow> heat_scaling(const HeatOptions& options = {});
void print_heat(std::ostream& out, const std::vector<HeatRow>& rows);

struct QuadRow {
  Index np = 0;
  /// relative grid H-infinity deviation, quadrature ROM vs intrusive ROM
  double bt_deviation = 0.0;
  double spa_deviation = 0.0;
};

struct QuadOptions {
  Index n = 30;
  Index order = 8;
  std::uint64_t seed = 11;
  std::vector<Index> counts{20, 40, 80, 160};
  double lo = 1e-3;
  double hi = 1e3;
};

std::vector<QuadRow> quad_convergence(const QuadOptions& options = {});
void print_quad(std::ostream& out, const std::vector<QuadRow>& rows);

struct PaperRow {
  Index r = 0;
  double bt_error = 0.0;
  double spa_error = 0.0;
};

/// Relative grid H-infinity errors of dense BT and SPA for the supplied
/// system at the given orders.
std::vector<PaperRow> paper_tables(const std::filesystem::path& manifest, const std::vector<Index>& orders);
void print_paper(std::ostream& out, const std::vector<PaperRow>& rows);

/// Grid used by the benchmarks for relative H-infinity values.
inline constexpr double kGridLo = 1e-4;
inline constexpr double kGridHi = 1e4;
inline constexpr Index kGridN = 600;

}  // namespace balkit::bench
