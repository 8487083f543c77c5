#include "bench.hpp"

#include <chrono>
#include <iomanip>

#include "balkit/iofmt.hpp"
#include "balkit/metrics.hpp"
#include "balkit/quadrature.hpp"
#include "balkit/reduce.hpp"

namespace balkit::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double relative_hinf(const TransferFunction& err, const TransferFunction& ref) {
  const double e = hinf_grid(err, kGridLo, kGridHi, kGridN).value;
  const double h = hinf_grid(ref, kGridLo, kGridHi, kGridN).value;
  return e / h;
}

}  // namespace

std::vector<HeatRow> heat_scaling(const HeatOptions& options) {
  std::vector<HeatRow> rows;
  for (Index n : options.sizes) {
    const StateSpace sys = heat_1d(n);
    HeatRow row;
    row.n = n;
    row.r = options.order;

    ReductionOptions low;
    low.factors = FactorMode::LowRank;
    low.adi_tol = options.adi_tol;
    auto t0 = Clock::now();
    const GramianFactors lf = compute_factors(sys, low);
    const ReducedModel lrom = spa(sys, lf, OrderSpec::fixed(options.order));
    row.lowrank_seconds = seconds_since(t0);
    row.rank_u = lf.U.cols();
    row.rank_l = lf.L.cols();
    row.residual_p = lf.residual_P;
    row.residual_q = lf.residual_Q;

    if (n <= options.max_dense) {
      t0 = Clock::now();
      const ReducedModel drom = spa(sys, OrderSpec::fixed(options.order));
      row.dense_seconds = seconds_since(t0);
      row.relative_deviation = relative_hinf(difference(transfer(drom), transfer(lrom)), transfer(sys));
    }
    rows.push_back(row);
  }
  return rows;
}

void print_heat(std::ostream& out, const std::vector<HeatRow>& rows) {
  out << "n,r,dense_s,lowrank_s,r_U,r_L,residual_P,residual_Q,rel_deviation\n";
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.n << ',' << r.r << ',';
    if (r.dense_seconds) out << *r.dense_seconds;
    out << ',' << r.lowrank_seconds << ',' << r.rank_u << ',' << r.rank_l << ',' << r.residual_p << ','
        << r.residual_q << ',';
    if (r.relative_deviation) out << *r.relative_deviation;
    out << '\n';
  }
}

std::vector<QuadRow> quad_convergence(const QuadOptions& options) {
  const StateSpace sys = random_stable(options.n, 1, 1, options.seed);
  const GramianFactors f = lyap_factor_dense(sys);
  const ReducedModel bt_rom = bt(sys, f, OrderSpec::fixed(options.order));
  const ReducedModel spa_rom = spa(sys, f, OrderSpec::fixed(options.order));
  const MatrixXcd h0 = dc_moment(sys).cast<Complex>();
  const TransferFunction fom = transfer(sys);
  const double fom_norm = hinf_grid(fom, kGridLo, kGridHi, kGridN).value;

  std::vector<QuadRow> rows;
  for (Index np : options.counts) {
    const QuadratureRule rule = interleaved_rule(options.lo, options.hi, np, true);
    SampleSet sc = sample_tf(sys, rule.nodes_c);
    SampleSet so = sample_tf(sys, rule.nodes_o);
    sc.H0 = h0;
    so.H0 = h0;
    const ComplexRom qbt = quadbt(sc, so, rule, options.order);
    const ComplexRom qspa = quadspa(sc, so, rule, options.order);
    QuadRow row;
    row.np = np;
    row.bt_deviation = hinf_grid(difference(transfer(qbt), transfer(bt_rom)), kGridLo, kGridHi, kGridN).value / fom_norm;
    row.spa_deviation =
        hinf_grid(difference(transfer(qspa), transfer(spa_rom)), kGridLo, kGridHi, kGridN).value / fom_norm;
    rows.push_back(row);
  }
  return rows;
}

void print_quad(std::ostream& out, const std::vector<QuadRow>& rows) {
  out << "Np,quadbt_vs_bt,quadspa_vs_spa\n";
  out << std::setprecision(6);
  for (const auto& r : rows) out << r.np << ',' << r.bt_deviation << ',' << r.spa_deviation << '\n';
}

std::vector<PaperRow> paper_tables(const std::filesystem::path& manifest, const std::vector<Index>& orders) {
  const StateSpace sys = load_system(manifest);
  const GramianFactors f = lyap_factor_dense(sys);
  const TransferFunction fom = transfer(sys);
  std::vector<PaperRow> rows;
  for (Index r : orders) {
    PaperRow row;
    row.r = r;
    row.bt_error = relative_hinf(difference(fom, transfer(bt(sys, f, OrderSpec::fixed(r)))), fom);
    row.spa_error = relative_hinf(difference(fom, transfer(spa(sys, f, OrderSpec::fixed(r)))), fom);
    rows.push_back(row);
  }
  return rows;
}

void print_paper(std::ostream& out, const std::vector<PaperRow>& rows) {
  out << "r,bt_rel_hinf,spa_rel_hinf\n";
  out << std::setprecision(5) << std::scientific;
  for (const auto& r : rows) out << r.r << ',' << r.bt_error << ',' << r.spa_error << '\n';
  out << std::defaultfloat;
}

}  // namespace balkit::bench
