#pragma once

#include <optional>
#include <string>
#include <vector>

#include "balkit/samples.hpp"
#include "balkit/system.hpp"

namespace balkit {

/// Nodes and square-rooted weights for the two frequency integrals. With
/// positive_only the rule stands for the symmetric rule on +-nodes: the
/// weights are doubled and data matrices are assembled over the
/// conjugate-pair extension {w, -w}.
struct QuadratureRule {
  std::vector<double> nodes_c;
  VectorXd weights_c;
  std::vector<double> nodes_o;
  VectorXd weights_o;
  bool positive_only = false;

  Index size_c() const { return static_cast<Index>(nodes_c.size()); }
  Index size_o() const { return static_cast<Index>(nodes_o.size()); }
  /// Throws on count mismatch, nonpositive weights or (positive_only)
  /// nonpositive nodes; require_nonzero also rejects zero nodes.
  void validate(bool require_nonzero) const;
  /// Every rho multiplied by c and every phi by d.
  QuadratureRule scaled(double c, double d) const;
};

/// n points geometrically spaced in [lo, hi].
std::vector<double> log_nodes(double lo, double hi, Index n);

/// Square roots of trapezoid weights times 1/(2 pi), doubled when
/// positive_only. Nodes must be strictly increasing.
VectorXd trapezoid_weights(const std::vector<double>& nodes, bool positive_only);

QuadratureRule trapezoid_rule(std::vector<double> nodes_c, std::vector<double> nodes_o, bool positive_only);

/// 2 np log nodes in [lo, hi] split alternately between the two sides
/// (first, third, ... to controllability), trapezoid weights per side.
QuadratureRule interleaved_rule(double lo, double hi, Index np, bool positive_only = true);

enum class Flavor { BT, SPA };

/// Row blocks follow the observability nodes, column blocks the
/// controllability nodes. Gt holds G as a p x (count_c m) matrix.
struct QuadDataMatrices {
  MatrixXcd N;
  MatrixXcd M;
  MatrixXcd T;
  MatrixXcd Gt;
  Flavor flavor = Flavor::BT;
  Index m = 0;
  Index p = 0;
  /// built over the {w, -w} extension of a positive_only rule
  bool conjugate_extended = false;
};

/// Strictly proper samples of H at the rule's nodes. Coincident nodes
/// are an error.
QuadDataMatrices quadbt_matrices(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule);

/// Zero-shifted samples H(i w) - H(0). Coincident nodes need derivative
/// samples H'(i w) at those nodes.
QuadDataMatrices quadspa_matrices(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule,
                                  const SampleSet* derivative = nullptr);

/// Complex-valued ROM (E = I) from data matrices.
struct ComplexRom {
  MatrixXcd A;
  MatrixXcd B;
  MatrixXcd C;
  MatrixXcd D;
  Method method = Method::QUADBT;
  int order = 0;
  /// singular values of N
  VectorXd data_sigma;
  QuadDataMatrices data;
  /// D for QuadBT, H(0) for QuadSPA
  MatrixXcd constant_term;
  std::vector<std::string> notes;

  MatrixXcd eval(Complex s) const { return eval_tf(A, B, C, D, s); }
};

ComplexRom quadbt(const QuadDataMatrices& data, Index r, const MatrixXd& d);
ComplexRom quadspa(const QuadDataMatrices& data, Index r, const MatrixXcd& h0);

/// Sample-level entry points. quadbt wants raw samples with D attached
/// (or strictly proper ones); quadspa wants raw samples with H0 attached
/// (or zero-shifted ones).
ComplexRom quadbt(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule, Index r);
ComplexRom quadspa(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule, Index r,
                   const SampleSet* derivative = nullptr);

/// Real ROM from a complex one built on a conjugate-pair extension: the
/// data matrices are mapped by a fixed unitary pairing of (+iw, -iw) blocks,
/// which makes them real, and the reduction is redone in real arithmetic.
ReducedModel realify(const ComplexRom& rom);

}  // namespace balkit
