#include "balkit/samples.hpp"

#include <algorithm>
#include <cmath>

#include "balkit/parallel.hpp"

namespace balkit {

std::string_view to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::RawH: return "RAW_H";
    case SampleKind::StrictlyProper: return "STRICTLY_PROPER";
    case SampleKind::ZeroShifted: return "ZERO_SHIFTED";
    case SampleKind::Derivative: return "DERIVATIVE";
  }
  return "?";
}

SampleKind sample_kind_from_string(std::string_view name) {
  for (SampleKind k : {SampleKind::RawH, SampleKind::StrictlyProper, SampleKind::ZeroShifted, SampleKind::Derivative}) {
    if (name == to_string(k)) return k;
  }
  throw SchemaError("unknown sample kind '" + std::string(name) + "'");
}

void SampleSet::validate() const {
  if (nodes.size() != values.size()) {
    throw DimensionError("sample set has " + std::to_string(nodes.size()) + " nodes but " +
                         std::to_string(values.size()) + " values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].rows() != p() || values[i].cols() != m()) {
      throw DimensionError("sample " + std::to_string(i) + " has a different shape than sample 0");
    }
  }
  if (D && (D->rows() != p() || D->cols() != m())) throw DimensionError("attached D does not match the samples");
  if (H0 && (H0->rows() != p() || H0->cols() != m())) throw DimensionError("attached H0 does not match the samples");
}

namespace {

void check_nodes(const std::vector<double>& nodes) {
  for (double w : nodes)
    if (!std::isfinite(w)) throw UsageError("sample nodes must be finite");
}

}  // namespace

SampleSet sample_tf(const StateSpace& sys, const std::vector<double>& nodes) {
  check_nodes(nodes);
  SampleSet out;
  out.nodes = nodes;
  out.values.resize(nodes.size());
  out.kind = SampleKind::RawH;
  out.D = sys.D();
  parallel_for(nodes.size(), [&](std::size_t i) { out.values[i] = eval_tf(sys, Complex(0.0, nodes[i])); });
  return out;
}

SampleSet sample_tf_derivative(const StateSpace& sys, const std::vector<double>& nodes) {
  check_nodes(nodes);
  SampleSet out;
  out.nodes = nodes;
  out.values.resize(nodes.size());
  out.kind = SampleKind::Derivative;
  const MatrixXcd b = sys.B().cast<Complex>();
  const MatrixXcd c = sys.C().cast<Complex>();
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Complex s(0.0, nodes[i]);
    PencilFactorization<Complex> lu(sys.A(), sys.E(), Complex(-1.0), s);
    const MatrixXcd kb = lu.solve(b);
    const MatrixXcd kekb = lu.solve(sys.E().apply(kb));
    out.values[i] = -c * kekb;
  });
  return out;
}

FeedthroughEstimate estimate_feedthrough(const StateSpace& sys) { return {sys.D(), 0.0, "realization"}; }

FeedthroughEstimate estimate_feedthrough(const SampleSet& samples) {
  if (samples.D) return {*samples.D, 0.0, "provided"};
  if (samples.kind != SampleKind::RawH || samples.nodes.empty()) {
    throw UsageError("no feedthrough available: need raw high-frequency samples, a provided D, or a realization");
  }
  samples.validate();
  std::size_t top = 0;
  for (std::size_t i = 1; i < samples.nodes.size(); ++i)
    if (std::abs(samples.nodes[i]) > std::abs(samples.nodes[top])) top = i;
  const MatrixXcd& h = samples.values[top];
  return {h.real(), h.imag().cwiseAbs().maxCoeff(), "highest-frequency sample"};
}

SampleSet to_zero_shifted(const SampleSet& samples, const MatrixXcd& h0) {
  samples.validate();
  if (!samples.values.empty() && (h0.rows() != samples.p() || h0.cols() != samples.m())) {
    throw DimensionError("H0 is " + std::to_string(h0.rows()) + "x" + std::to_string(h0.cols()) +
                         " but samples are " + std::to_string(samples.p()) + "x" + std::to_string(samples.m()));
  }
  if (samples.kind == SampleKind::Derivative) throw UsageError("derivative samples cannot be shifted by H0");
  SampleSet out = samples;
  for (auto& v : out.values) v -= h0;
  out.kind = SampleKind::ZeroShifted;
  out.H0 = h0;
  return out;
}

SampleSet to_strictly_proper(const SampleSet& samples, const MatrixXd& d) {
  samples.validate();
  if (!samples.values.empty() && (d.rows() != samples.p() || d.cols() != samples.m())) {
    throw DimensionError("D does not match the sample shape");
  }
  if (samples.kind != SampleKind::RawH) throw UsageError("only raw samples can be made strictly proper");
  SampleSet out = samples;
  for (auto& v : out.values) v -= d.cast<Complex>();
  out.kind = SampleKind::StrictlyProper;
  out.D = d;
  return out;
}

}  // namespace balkit
