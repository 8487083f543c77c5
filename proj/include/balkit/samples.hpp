#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "balkit/system.hpp"

namespace balkit {

enum class SampleKind { RawH, StrictlyProper, ZeroShifted, Derivative };

std::string_view to_string(SampleKind kind);
SampleKind sample_kind_from_string(std::string_view name);

/// Transfer-function data at s = i * node.
struct SampleSet {
  std::vector<double> nodes;
  std::vector<MatrixXcd> values;
  SampleKind kind = SampleKind::RawH;
  std::optional<MatrixXd> D;
  /// H(0) used for (or available to) the zero-shifted form
  std::optional<MatrixXcd> H0;

  Index size() const { return static_cast<Index>(nodes.size()); }
  Index p() const { return values.empty() ? 0 : values.front().rows(); }
  Index m() const { return values.empty() ? 0 : values.front().cols(); }
  /// Throws DimensionError on count or shape mismatch.
  void validate() const;
};

/// Values H(i node); D of the realization is attached.
SampleSet sample_tf(const StateSpace& sys, const std::vector<double>& nodes);

/// Values H'(i node) = -C K E K B with K = (sE - A)^{-1}.
SampleSet sample_tf_derivative(const StateSpace& sys, const std::vector<double>& nodes);

struct FeedthroughEstimate {
  MatrixXd D;
  /// largest imaginary magnitude of the sample used (0 when exact)
  double uncertainty = 0.0;
  std::string source;
};

/// Exact from a realization.
FeedthroughEstimate estimate_feedthrough(const StateSpace& sys);
/// From data: the attached D if present, otherwise the real part of the
/// highest-frequency sample.
FeedthroughEstimate estimate_feedthrough(const SampleSet& samples);

/// H(i w) - H0 for every sample.
SampleSet to_zero_shifted(const SampleSet& samples, const MatrixXcd& h0);
/// H(i w) - D for every sample.
SampleSet to_strictly_proper(const SampleSet& samples, const MatrixXd& d);

}  // namespace balkit
