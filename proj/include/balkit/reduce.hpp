#pragma once

#include <optional>

#include "balkit/gramian.hpp"
#include "balkit/system.hpp"

namespace balkit {

/// Reduced order given directly or through an HSV tail tolerance.
struct OrderSpec {
  std::optional<Index> order;
  std::optional<double> tol;

  static OrderSpec fixed(Index r) { return {r, std::nullopt}; }
  static OrderSpec tolerance(double t) { return {std::nullopt, t}; }
};

enum class FactorMode { Dense, LowRank };

struct ReductionOptions {
  FactorMode factors = FactorMode::Dense;
  double adi_tol = 1e-10;
  AdiOptions adi;
};

/// Relative gap (sigma_r - sigma_{r+1}) / sigma_r below which sigma_r and
/// sigma_{r+1} count as tied.
inline constexpr double kTieGap = 1e-10;

/// Condition number of the intermediate reduced state matrix above which
/// the reciprocal back-transform adds a warning note.
inline constexpr double kIntermediateCondWarn = 1e12;

GramianFactors compute_factors(const StateSpace& sys, const ReductionOptions& options = {});

/// Smallest r with 2 sum_{i>r} sigma_i <= tol * 2 sum_i sigma_i.
Index order_from_tolerance(const VectorXd& sigma, double tol);

ReducedModel bt(const StateSpace& sys, OrderSpec order, const ReductionOptions& options = {});
ReducedModel bt(const StateSpace& sys, const GramianFactors& factors, OrderSpec order);

/// SPA through the reciprocal system: a BT-type intermediate model of the
/// reciprocal FOM, then the reciprocal transform of that r x r model.
ReducedModel spa(const StateSpace& sys, OrderSpec order, const ReductionOptions& options = {});
ReducedModel spa(const StateSpace& sys, const GramianFactors& factors, OrderSpec order);

/// SPA by explicit balancing and residualization of the weak states.
/// Dense; meant as a reference for moderate n.
ReducedModel spa_direct(const StateSpace& sys, OrderSpec order);
ReducedModel spa_direct(const StateSpace& sys, const GramianFactors& factors, OrderSpec order);

}  // namespace balkit
