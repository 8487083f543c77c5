#include "balkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "balkit/gramian.hpp"
#include "balkit/parallel.hpp"

namespace balkit {

void QuadratureRule::validate(bool require_nonzero) const {
  if (nodes_c.empty() || nodes_o.empty()) throw UsageError("quadrature rule has an empty side");
  if (static_cast<Index>(nodes_c.size()) != weights_c.size() || static_cast<Index>(nodes_o.size()) != weights_o.size()) {
    throw DimensionError("quadrature nodes and weights differ in count");
  }
  if ((weights_c.array() <= 0.0).any() || (weights_o.array() <= 0.0).any()) {
    throw UsageError("quadrature weights must be positive");
  }
  for (const auto* side : {&nodes_c, &nodes_o}) {
    for (double w : *side) {
      if (!std::isfinite(w)) throw UsageError("quadrature nodes must be finite");
      if (positive_only && !(w > 0.0)) throw UsageError("a positive_only rule needs positive nodes");
      if (require_nonzero && w == 0.0) throw UsageError("quadrature nodes must be nonzero");
    }
  }
}

QuadratureRule QuadratureRule::scaled(double c, double d) const {
  QuadratureRule out = *this;
  out.weights_c *= c;
  out.weights_o *= d;
  return out;
}

std::vector<double> log_nodes(double lo, double hi, Index n) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw UsageError("log_nodes needs 0 < lo < hi");
  if (n < 2) throw UsageError("log_nodes needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

VectorXd trapezoid_weights(const std::vector<double>& nodes, bool positive_only) {
  const Index n = static_cast<Index>(nodes.size());
  if (n < 2) throw UsageError("trapezoid rule needs at least two nodes");
  for (Index i = 1; i < n; ++i)
    if (!(nodes[i] > nodes[i - 1])) throw UsageError("trapezoid nodes must be strictly increasing");
  VectorXd w(n);
  w(0) = 0.5 * (nodes[1] - nodes[0]);
  w(n - 1) = 0.5 * (nodes[n - 1] - nodes[n - 2]);
  for (Index i = 1; i + 1 < n; ++i) w(i) = 0.5 * (nodes[i + 1] - nodes[i - 1]);
  w /= 2.0 * std::numbers::pi;
  if (positive_only) w *= 2.0;
  return w.cwiseSqrt();
}

QuadratureRule trapezoid_rule(std::vector<double> nodes_c, std::vector<double> nodes_o, bool positive_only) {
  QuadratureRule rule;
  rule.weights_c = trapezoid_weights(nodes_c, positive_only);
  rule.weights_o = trapezoid_weights(nodes_o, positive_only);
  rule.nodes_c = std::move(nodes_c);
  rule.nodes_o = std::move(nodes_o);
  rule.positive_only = positive_only;
  return rule;
}

QuadratureRule interleaved_rule(double lo, double hi, Index np, bool positive_only) {
  if (np < 2) throw UsageError("need at least two nodes per side");
  const std::vector<double> all = log_nodes(lo, hi, 2 * np);
  std::vector<double> c, o;
  for (std::size_t i = 0; i < all.size(); ++i) (i % 2 == 0 ? c : o).push_back(all[i]);
  return trapezoid_rule(std::move(c), std::move(o), positive_only);
}

namespace {

constexpr double kCoincident = 1e-12;

bool coincide(double a, double b) { return std::abs(a - b) <= kCoincident * std::max(std::abs(a), std::abs(b)); }

// One side of the data: signed nodes, signed square-root weights, values.
struct Side {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<MatrixXcd> values;
};

void match_nodes(const SampleSet& s, const std::vector<double>& nodes, const char* which) {
  s.validate();
  if (s.nodes.size() != nodes.size()) {
    throw DimensionError(std::string(which) + " samples have " + std::to_string(s.nodes.size()) +
                         " nodes but the rule has " + std::to_string(nodes.size()));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!coincide(s.nodes[i], nodes[i])) {
      throw UsageError(std::string(which) + " sample node " + std::to_string(i) + " does not match the rule");
    }
  }
}

// With positive_only each node w is paired with -w; the halves carry
// weight rho/sqrt(2). For the SPA flavor the factor columns scale with
// rho/w, so the mirrored weight takes a minus sign to keep the two halves
// complex conjugates of each other.
Side make_side(const SampleSet& s, const std::vector<double>& nodes, const VectorXd& weights, bool extend,
               Flavor flavor) {
  Side side;
  const double half = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = weights(static_cast<Index>(i));
    if (!extend) {
      side.nodes.push_back(nodes[i]);
      side.weights.push_back(w);
      side.values.push_back(s.values[i]);
      continue;
    }
    side.nodes.push_back(nodes[i]);
    side.weights.push_back(w * half);
    side.values.push_back(s.values[i]);
    side.nodes.push_back(-nodes[i]);
    side.weights.push_back(flavor == Flavor::SPA ? -w * half : w * half);
    side.values.push_back(s.values[i].conjugate());
  }
  return side;
}

const MatrixXcd* find_derivative(const SampleSet* deriv, double node, MatrixXcd& scratch) {
  if (!deriv) return nullptr;
  for (std::size_t i = 0; i < deriv->nodes.size(); ++i) {
    if (coincide(deriv->nodes[i], node)) return &deriv->values[i];
    if (coincide(deriv->nodes[i], -node)) {
      scratch = deriv->values[i].conjugate();
      return &scratch;
    }
  }
  return nullptr;
}

QuadDataMatrices assemble(const Side& c, const Side& o, Flavor flavor, Index p, Index m, const SampleSet* deriv) {
  const Index kc = static_cast<Index>(c.nodes.size());
  const Index ko = static_cast<Index>(o.nodes.size());
  QuadDataMatrices out;
  out.flavor = flavor;
  out.m = m;
  out.p = p;
  out.N.resize(ko * p, kc * m);
  out.M.resize(ko * p, kc * m);
  out.T.resize(ko * p, m);
  out.Gt.resize(p, kc * m);

  const Complex I(0.0, 1.0);
  for (Index k = 0; k < kc; ++k) {
    const double w = c.nodes[static_cast<std::size_t>(k)];
    const double rho = c.weights[static_cast<std::size_t>(k)];
    const MatrixXcd& hc = c.values[static_cast<std::size_t>(k)];
    out.Gt.middleCols(k * m, m) = flavor == Flavor::BT ? MatrixXcd(rho * hc) : MatrixXcd((rho / w) * hc);
  }
  for (Index j = 0; j < ko; ++j) {
    const double x = o.nodes[static_cast<std::size_t>(j)];
    const double phi = o.weights[static_cast<std::size_t>(j)];
    const MatrixXcd& ho = o.values[static_cast<std::size_t>(j)];
    out.T.middleRows(j * p, p) = flavor == Flavor::BT ? MatrixXcd(phi * ho) : MatrixXcd((phi / x) * ho);
  }

  parallel_for(static_cast<std::size_t>(ko), [&](std::size_t jj) {
    const Index j = static_cast<Index>(jj);
    const double x = o.nodes[jj];
    const double phi = o.weights[jj];
    const MatrixXcd& ho = o.values[jj];
    const Complex sx = I * x;
    MatrixXcd scratch;
    for (Index k = 0; k < kc; ++k) {
      const double w = c.nodes[static_cast<std::size_t>(k)];
      const double rho = c.weights[static_cast<std::size_t>(k)];
      const MatrixXcd& hc = c.values[static_cast<std::size_t>(k)];
      const Complex sw = I * w;
      const double scale = -rho * phi;
      auto nblk = out.N.block(j * p, k * m, p, m);
      auto mblk = out.M.block(j * p, k * m, p, m);
      if (coincide(w, x)) {
        if (flavor == Flavor::BT) {
          throw UsageError("controllability and observability nodes coincide at " + std::to_string(x) +
                           "; QuadBT has no derivative path");
        }
        const MatrixXcd* d = find_derivative(deriv, x, scratch);
        if (!d) {
          throw UsageError("nodes coincide at " + std::to_string(x) + " but no derivative sample is available there");
        }
        nblk = scale * (*d);
        mblk = scale * ((*d) / sx - ho / (sx * sx));
        continue;
      }
      const Complex denom = sw - sx;
      nblk = scale * (hc - ho) / denom;
      if (flavor == Flavor::BT) {
        mblk = scale * (sw * hc - sx * ho) / denom;
      } else {
        mblk = scale * (hc / sw - ho / sx) / denom;
      }
    }
  });
  return out;
}

QuadDataMatrices build_matrices(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule,
                                Flavor flavor, const SampleSet* deriv) {
  rule.validate(flavor == Flavor::SPA);
  match_nodes(samples_c, rule.nodes_c, "controllability");
  match_nodes(samples_o, rule.nodes_o, "observability");
  if (samples_c.p() != samples_o.p() || samples_c.m() != samples_o.m()) {
    throw DimensionError("the two sample sets differ in shape");
  }
  if (deriv) {
    deriv->validate();
    if (deriv->kind != SampleKind::Derivative) throw UsageError("derivative samples have the wrong kind");
    if (!deriv->values.empty() && (deriv->p() != samples_c.p() || deriv->m() != samples_c.m())) {
      throw DimensionError("derivative samples differ in shape");
    }
  }
  const bool extend = rule.positive_only;
  const Side c = make_side(samples_c, rule.nodes_c, rule.weights_c, extend, flavor);
  const Side o = make_side(samples_o, rule.nodes_o, rule.weights_o, extend, flavor);
  QuadDataMatrices out = assemble(c, o, flavor, samples_c.p(), samples_c.m(), deriv);
  out.conjugate_extended = extend;
  return out;
}

template <typename Scalar>
struct RomParts {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat A, B, C;
  VectorXd sigma;
};

template <typename Scalar>
RomParts<Scalar> project(const typename RomParts<Scalar>::Mat& n, const typename RomParts<Scalar>::Mat& m,
                         const typename RomParts<Scalar>::Mat& t, const typename RomParts<Scalar>::Mat& gt, Index r) {
  using Mat = typename RomParts<Scalar>::Mat;
  if (r < 1) throw UsageError("reduced order must be positive");
  Eigen::BDCSVD<Mat> svd(n, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RomParts<Scalar> out;
  out.sigma = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < out.sigma.size(); ++i)
    if (out.sigma(i) > kRankFloor * out.sigma(0)) ++rank;
  if (r > rank) {
    throw RankError("requested order " + std::to_string(r) + " exceeds the numerical rank " + std::to_string(rank) +
                    " of the data matrix");
  }
  const VectorXd inv_sqrt = out.sigma.head(r).array().rsqrt();
  const Mat zs = svd.matrixU().leftCols(r) * inv_sqrt.asDiagonal().toDenseMatrix().template cast<Scalar>();
  const Mat ys = svd.matrixV().leftCols(r) * inv_sqrt.asDiagonal().toDenseMatrix().template cast<Scalar>();
  out.A = zs.adjoint() * m * ys;
  out.B = zs.adjoint() * t;
  out.C = gt * ys;
  return out;
}

// Final model from the intermediate reciprocal one:
// A = At^{-1}, B = A Bt, C = -Ct A, D = Dt + C Bt.
template <typename Scalar>
void reciprocal_back(RomParts<Scalar>& parts, typename RomParts<Scalar>::Mat& d, std::vector<std::string>& notes) {
  using Mat = typename RomParts<Scalar>::Mat;
  Eigen::PartialPivLU<Mat> lu(parts.A);
  const double rc = lu.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon())) throw SingularError("intermediate reduced state matrix is singular");
  if (1.0 / rc > 1e12) {
    notes.push_back("warning: intermediate reduced state matrix has condition estimate " + std::to_string(1.0 / rc));
  }
  Mat a = lu.inverse();
  Mat b = a * parts.B;
  Mat c = -parts.C * a;
  d = d + c * parts.B;
  parts.A = std::move(a);
  parts.B = std::move(b);
  parts.C = std::move(c);
}

void check_data(const QuadDataMatrices& data, Flavor expected, Index p, Index m) {
  if (data.flavor != expected) throw UsageError("data matrices have the wrong flavor");
  if (p != data.p || m != data.m) throw DimensionError("constant term does not match the data shape");
}

// Unitary pairing of (+w, -w) blocks: rows x+, x- -> (x+ + x-)/sqrt2,
// i(x+ - x-)/sqrt2; columns u+, u- -> (u+ + u-)/sqrt2, -i(u+ - u-)/sqrt2.
MatrixXcd pair_rows(const MatrixXcd& x, Index block) {
  MatrixXcd out(x.rows(), x.cols());
  const double h = 1.0 / std::sqrt(2.0);
  const Complex I(0.0, 1.0);
  for (Index q = 0; q + 2 * block <= x.rows(); q += 2 * block) {
    const auto plus = x.middleRows(q, block);
    const auto minus = x.middleRows(q + block, block);
    out.middleRows(q, block) = h * (plus + minus);
    out.middleRows(q + block, block) = (h * I) * (plus - minus);
  }
  return out;
}

MatrixXcd pair_cols(const MatrixXcd& x, Index block) {
  MatrixXcd out(x.rows(), x.cols());
  const double h = 1.0 / std::sqrt(2.0);
  const Complex I(0.0, 1.0);
  for (Index q = 0; q + 2 * block <= x.cols(); q += 2 * block) {
    const auto plus = x.middleCols(q, block);
    const auto minus = x.middleCols(q + block, block);
    out.middleCols(q, block) = h * (plus + minus);
    out.middleCols(q + block, block) = (-h * I) * (plus - minus);
  }
  return out;
}

MatrixXd real_part_checked(const MatrixXcd& x, const char* what) {
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double imag = x.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-10 * scale) {
    throw NumericalError(std::string("realification left an imaginary part of ") + std::to_string(imag) + " in " + what);
  }
  return x.real();
}

}  // namespace

QuadDataMatrices quadbt_matrices(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule) {
  for (const SampleSet* s : {&samples_c, &samples_o}) {
    if (s->kind != SampleKind::StrictlyProper) throw UsageError("QuadBT data need strictly proper samples");
  }
  return build_matrices(samples_c, samples_o, rule, Flavor::BT, nullptr);
}

QuadDataMatrices quadspa_matrices(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule,
                                  const SampleSet* derivative) {
  for (const SampleSet* s : {&samples_c, &samples_o}) {
    if (s->kind != SampleKind::ZeroShifted) throw UsageError("QuadSPA data need zero-shifted samples");
  }
  return build_matrices(samples_c, samples_o, rule, Flavor::SPA, derivative);
}

ComplexRom quadbt(const QuadDataMatrices& data, Index r, const MatrixXd& d) {
  check_data(data, Flavor::BT, d.rows(), d.cols());
  RomParts<Complex> parts = project<Complex>(data.N, data.M, data.T, data.Gt, r);
  ComplexRom rom;
  rom.A = std::move(parts.A);
  rom.B = std::move(parts.B);
  rom.C = std::move(parts.C);
  rom.D = d.cast<Complex>();
  rom.method = Method::QUADBT;
  rom.order = static_cast<int>(r);
  rom.data_sigma = std::move(parts.sigma);
  rom.data = data;
  rom.constant_term = rom.D;
  return rom;
}

ComplexRom quadspa(const QuadDataMatrices& data, Index r, const MatrixXcd& h0) {
  check_data(data, Flavor::SPA, h0.rows(), h0.cols());
  RomParts<Complex> parts = project<Complex>(data.N, data.M, data.T, data.Gt, r);
  ComplexRom rom;
  MatrixXcd d = h0;
  reciprocal_back(parts, d, rom.notes);
  rom.A = std::move(parts.A);
  rom.B = std::move(parts.B);
  rom.C = std::move(parts.C);
  rom.D = std::move(d);
  rom.method = Method::QUADSPA;
  rom.order = static_cast<int>(r);
  rom.data_sigma = std::move(parts.sigma);
  rom.data = data;
  rom.constant_term = h0;
  return rom;
}

ComplexRom quadbt(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule, Index r) {
  auto prepare = [](const SampleSet& s) {
    if (s.kind == SampleKind::StrictlyProper) return s;
    if (s.kind != SampleKind::RawH) throw UsageError("QuadBT needs raw or strictly proper samples");
    return to_strictly_proper(s, estimate_feedthrough(s).D);
  };
  const SampleSet c = prepare(samples_c);
  const SampleSet o = prepare(samples_o);
  const MatrixXd d = c.D ? *c.D : MatrixXd::Zero(c.p(), c.m());
  return quadbt(quadbt_matrices(c, o, rule), r, d);
}

ComplexRom quadspa(const SampleSet& samples_c, const SampleSet& samples_o, const QuadratureRule& rule, Index r,
                   const SampleSet* derivative) {
  auto prepare = [](const SampleSet& s) {
    if (!s.H0) throw UsageError("QuadSPA needs H(0); attach a measured or computed zero-frequency value");
    if (s.kind == SampleKind::ZeroShifted) return s;
    if (s.kind != SampleKind::RawH) throw UsageError("QuadSPA needs raw or zero-shifted samples");
    return to_zero_shifted(s, *s.H0);
  };
  const SampleSet c = prepare(samples_c);
  const SampleSet o = prepare(samples_o);
  return quadspa(quadspa_matrices(c, o, rule, derivative), r, *c.H0);
}

ReducedModel realify(const ComplexRom& rom) {
  const QuadDataMatrices& data = rom.data;
  if (!data.conjugate_extended) {
    throw UsageError("realify needs data built on a conjugate-closed node set (use a positive_only rule)");
  }
  const MatrixXd n = real_part_checked(pair_cols(pair_rows(data.N, data.p), data.m), "N");
  const MatrixXd m = real_part_checked(pair_cols(pair_rows(data.M, data.p), data.m), "M");
  const MatrixXd t = real_part_checked(pair_rows(data.T, data.p), "T");
  const MatrixXd gt = real_part_checked(pair_cols(data.Gt, data.m), "G");
  MatrixXd d = real_part_checked(rom.constant_term, "the constant term");

  RomParts<double> parts = project<double>(n, m, t, gt, rom.order);
  ReducedModel out;
  out.method = rom.method;
  out.order = rom.order;
  out.notes = rom.notes;
  if (rom.method == Method::QUADSPA) {
    std::vector<std::string> extra;
    reciprocal_back(parts, d, extra);
  }
  out.hankel_used = parts.sigma;
  out.notes.push_back("realified");
  out.sys = StateSpace(std::move(parts.A), std::move(parts.B), std::move(parts.C), std::move(d));
  return out;
}

}  // namespace balkit
