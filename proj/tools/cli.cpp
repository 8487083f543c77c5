#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "balkit/iofmt.hpp"
#include "balkit/metrics.hpp"
#include "balkit/quadrature.hpp"
#include "balkit/reduce.hpp"
#include "bench.hpp"

namespace balkit {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  Index n = 0;
};

Range parse_range(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError(flag + " expects lo,hi,N");
  try {
    Range r{std::stod(parts[0]), std::stod(parts[1]), static_cast<Index>(std::stol(parts[2]))};
    if (!(r.lo > 0.0) || !(r.hi > r.lo) || r.n < 1) throw UsageError(flag + " needs 0 < lo < hi and N >= 1");
    return r;
  } catch (const std::logic_error&) {
    throw UsageError(flag + " expects numbers lo,hi,N");
  }
}

std::vector<double> range_nodes(const Range& r) {
  if (r.n == 1) return {r.lo};
  return log_nodes(r.lo, r.hi, r.n);
}

json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

// Side weights: trapezoid when the side has two or more nodes, a unit
// weight for a single node.
VectorXd side_weights(const std::vector<double>& nodes, bool positive_only) {
  if (nodes.size() == 1) return VectorXd::Ones(1);
  return trapezoid_weights(nodes, positive_only);
}

struct ReduceArgs {
  std::string method;
  std::optional<Index> order;
  std::optional<double> tol;
  std::string system;
  std::string samples;
  std::string nodes = "1e-3,1e3,100";
  std::string nodes_c;
  std::string nodes_o;
  bool lowrank = false;
  double adi_tol = 1e-10;
  bool realify = false;
  std::string out;
  std::string report;
};

SampleSet subset(const SampleSet& s, const std::vector<std::size_t>& idx) {
  SampleSet out;
  out.kind = s.kind;
  out.D = s.D;
  out.H0 = s.H0;
  for (std::size_t i : idx) {
    out.nodes.push_back(s.nodes[i]);
    out.values.push_back(s.values[i]);
  }
  return out;
}

int cmd_reduce(const ReduceArgs& a, std::ostream& out) {
  const auto t_start = Clock::now();
  Method method = method_from_string(a.method);
  if (!a.order && !a.tol) throw UsageError("give --order or --tol");
  if (a.system.empty() == a.samples.empty()) throw UsageError("give exactly one of --system and --samples");
  const bool quad = method == Method::QUADBT || method == Method::QUADSPA;
  if (!quad && a.system.empty()) throw UsageError("intrusive methods need --system");
  if (a.realify && !quad) throw UsageError("--realify applies to quadbt and quadspa only");
  const OrderSpec spec = a.order ? OrderSpec::fixed(*a.order) : OrderSpec::tolerance(*a.tol);

  json report;
  report["method"] = std::string(to_string(method));

  if (!quad) {
    const StateSpace sys = load_system(a.system);
    ReductionOptions opts;
    opts.factors = a.lowrank ? FactorMode::LowRank : FactorMode::Dense;
    opts.adi_tol = a.adi_tol;
    auto t0 = Clock::now();
    const GramianFactors f = compute_factors(sys, opts);
    const double t_factors = seconds_since(t0);
    t0 = Clock::now();
    ReducedModel rom;
    if (method == Method::BT) {
      rom = bt(sys, f, spec);
    } else if (method == Method::SPA) {
      rom = spa(sys, f, spec);
    } else {
      rom = spa_direct(sys, f, spec);
    }
    const double t_reduce = seconds_since(t0);
    if (!a.out.empty()) save_rom(a.out, rom);
    report["r"] = rom.order;
    report["hankel_singular_values"] = rom.hankel_used ? to_json(*rom.hankel_used) : json(nullptr);
    report["factors"] = {{"exact", f.exact},        {"residual_P", f.residual_P}, {"residual_Q", f.residual_Q},
                         {"r_U", f.U.cols()},       {"r_L", f.L.cols()},          {"iterations_P", f.iterations_P},
                         {"iterations_Q", f.iterations_Q}};
    report["bound"] = rom.hankel_used && rom.order < rom.hankel_used->size() ? bt_bound(*rom.hankel_used, rom.order) : 0.0;
    report["notes"] = rom.notes;
    report["timings"] = {{"factors_s", t_factors}, {"reduce_s", t_reduce}, {"total_s", seconds_since(t_start)}};
    out << "method=" << to_string(method) << " r=" << rom.order << '\n';
    for (const auto& n : rom.notes) out << n << '\n';
    if (!a.report.empty()) write_json(a.report, report);
    return kExitOk;
  }

  // Quadrature methods: a rule and two sample sets.
  QuadratureRule rule;
  SampleSet sc, so;
  std::optional<SampleSet> deriv;
  if (!a.system.empty()) {
    const StateSpace sys = load_system(a.system);
    if (!a.nodes_c.empty() || !a.nodes_o.empty()) {
      if (a.nodes_c.empty() || a.nodes_o.empty()) throw UsageError("give both --nodes-c and --nodes-o");
      rule.nodes_c = range_nodes(parse_range(a.nodes_c, "--nodes-c"));
      rule.nodes_o = range_nodes(parse_range(a.nodes_o, "--nodes-o"));
      rule.positive_only = true;
      rule.weights_c = side_weights(rule.nodes_c, true);
      rule.weights_o = side_weights(rule.nodes_o, true);
    } else {
      const Range r = parse_range(a.nodes, "--nodes");
      rule = interleaved_rule(r.lo, r.hi, r.n, true);
    }
    sc = sample_tf(sys, rule.nodes_c);
    so = sample_tf(sys, rule.nodes_o);
    const MatrixXcd h0 = dc_moment(sys).cast<Complex>();
    sc.H0 = h0;
    so.H0 = h0;
    if (method == Method::QUADSPA) deriv = sample_tf_derivative(sys, rule.nodes_o);
    report["source"] = "system";
  } else {
    SampleSet all = load_samples(a.samples);
    if (all.kind != SampleKind::RawH) throw UsageError("--samples expects RAW_H data");
    if (all.nodes.size() < 2) throw UsageError("need at least two sample rows");
    std::vector<std::size_t> order(all.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return all.nodes[i] < all.nodes[j]; });
    std::vector<std::size_t> ic, io;
    for (std::size_t k = 0; k < order.size(); ++k) (k % 2 == 0 ? ic : io).push_back(order[k]);
    sc = subset(all, ic);
    so = subset(all, io);
    const bool positive = std::all_of(all.nodes.begin(), all.nodes.end(), [](double w) { return w > 0.0; });
    rule.nodes_c = sc.nodes;
    rule.nodes_o = so.nodes;
    rule.positive_only = positive;
    rule.weights_c = side_weights(rule.nodes_c, positive);
    rule.weights_o = side_weights(rule.nodes_o, positive);
    if (method == Method::QUADBT) {
      const FeedthroughEstimate d = estimate_feedthrough(all);
      sc.D = d.D;
      so.D = d.D;
      report["feedthrough"] = {{"source", d.source}, {"uncertainty", d.uncertainty}};
    }
    report["source"] = "samples";
  }

  auto build = [&](Index r) {
    return method == Method::QUADBT ? quadbt(sc, so, rule, r) : quadspa(sc, so, rule, r, deriv ? &*deriv : nullptr);
  };
  const auto t0 = Clock::now();
  Index r = 0;
  if (spec.order) {
    r = *spec.order;
  } else {
    const ComplexRom probe = build(1);
    Index rank = 0;
    for (Index i = 0; i < probe.data_sigma.size(); ++i)
      if (probe.data_sigma(i) > 1e-12 * probe.data_sigma(0)) ++rank;
    r = order_from_tolerance(probe.data_sigma.head(rank), *spec.tol);
  }
  const ComplexRom crom = build(r);
  report["r"] = crom.order;
  report["data_singular_values"] = to_json(crom.data_sigma);
  report["nodes"] = {{"controllability", rule.nodes_c.size()},
                     {"observability", rule.nodes_o.size()},
                     {"positive_only", rule.positive_only}};
  if (a.realify) {
    const ReducedModel rom = realify(crom);
    if (!a.out.empty()) save_rom(a.out, rom);
    report["notes"] = rom.notes;
    report["realified"] = true;
  } else {
    if (!a.out.empty()) save_rom(a.out, crom);
    report["notes"] = crom.notes;
    report["realified"] = false;
  }
  report["timings"] = {{"reduce_s", seconds_since(t0)}, {"total_s", seconds_since(t_start)}};
  out << "method=" << to_string(method) << " r=" << crom.order << (a.realify ? " realified" : "") << '\n';
  if (!a.report.empty()) write_json(a.report, report);
  return kExitOk;
}

struct CompareArgs {
  std::string system;
  std::vector<std::string> roms;
  std::string grid = "1e-4,1e4,400";
  std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const StateSpace sys = load_system(a.system);
  const Range g = parse_range(a.grid, "--grid");
  const std::vector<double> grid = range_nodes(g);
  const TransferFunction fom = transfer(sys);

  std::vector<std::string> names{"fom"};
  std::vector<VectorXd> cols{freq_response(fom, grid)};
  const double fom_peak = cols.front().maxCoeff();

  out << std::left << std::setw(24) << "rom" << std::setw(12) << "method" << std::setw(6) << "r"
      << "rel_hinf_grid\n";
  for (const auto& path : a.roms) {
    const ComplexRom rom = load_complex_rom(path);
    if (rom.B.cols() != sys.m() || rom.C.rows() != sys.p()) {
      throw DimensionError(path + ": ROM is " + std::to_string(rom.C.rows()) + "x" + std::to_string(rom.B.cols()) +
                           " but the system is " + std::to_string(sys.p()) + "x" + std::to_string(sys.m()));
    }
    const VectorXd err = freq_response(difference(fom, transfer(rom)), grid);
    const std::string name = fs::path(path).stem().string();
    names.push_back("err_" + name);
    cols.push_back(err);
    out << std::setw(24) << name << std::setw(12) << to_string(rom.method) << std::setw(6) << rom.order
        << std::setprecision(6) << std::scientific << err.maxCoeff() / fom_peak << std::defaultfloat << '\n';
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot write '" + a.out + "'");
    write_response_csv(f, grid, names, cols);
  }
  return kExitOk;
}

struct BenchArgs {
  std::string suite;
  std::string data;
  std::string out;
  std::vector<Index> sizes;
  std::uint64_t seed = 11;
  std::vector<Index> orders{6, 10, 14, 18, 22, 26, 30};
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::ostringstream table;
  if (a.suite == "heat-scaling") {
    bench::HeatOptions o;
    if (!a.sizes.empty()) o.sizes = a.sizes;
    bench::print_heat(table, bench::heat_scaling(o));
  } else if (a.suite == "quad-convergence") {
    bench::QuadOptions o;
    o.seed = a.seed;
    bench::print_quad(table, bench::quad_convergence(o));
  } else if (a.suite == "paper-tables") {
    if (a.data.empty()) throw UsageError("paper-tables needs --data <manifest> with the benchmark matrices");
    bench::print_paper(table, bench::paper_tables(a.data, a.orders));
  } else {
    throw UsageError("unknown suite '" + a.suite + "'");
  }
  out << table.str();
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot write '" + a.out + "'");
    f << table.str();
  }
  return kExitOk;
}

void report_error(std::ostream& err, const std::string& category, const std::string& message) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"balkit: balanced truncation and singular perturbation model reduction", "balkit"};
  app.require_subcommand(1);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Reduce a system or sampled data");
  reduce->add_option("--method", ra.method, "bt | spa | spa_direct | quadbt | quadspa")->required();
  auto* order_opt = reduce->add_option("--order", ra.order, "reduced order r");
  auto* tol_opt = reduce->add_option("--tol", ra.tol, "relative Hankel tail tolerance");
  order_opt->excludes(tol_opt);
  reduce->add_option("--system", ra.system, "system manifest (JSON)");
  reduce->add_option("--samples", ra.samples, "sample CSV with JSON sidecar");
  reduce->add_option("--nodes", ra.nodes, "lo,hi,Np: interleaved log nodes, Np per side")->capture_default_str();
  reduce->add_option("--nodes-c", ra.nodes_c, "lo,hi,N controllability nodes");
  reduce->add_option("--nodes-o", ra.nodes_o, "lo,hi,N observability nodes");
  reduce->add_flag("--lowrank", ra.lowrank, "low-rank ADI Gramian factors");
  reduce->add_option("--adi-tol", ra.adi_tol, "ADI residual tolerance")->capture_default_str();
  reduce->add_flag("--realify", ra.realify, "real ROM from conjugate-paired data");
  reduce->add_option("--out", ra.out, "ROM output (JSON)");
  reduce->add_option("--report", ra.report, "report output (JSON)");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Frequency response and errors of ROMs against a system");
  compare->add_option("--system", ca.system, "system manifest")->required();
  compare->add_option("--rom", ca.roms, "ROM file (repeatable)")->required();
  compare->add_option("--grid", ca.grid, "lo,hi,N log grid")->capture_default_str();
  compare->add_option("--out", ca.out, "CSV output");

  BenchArgs ba;
  auto* benchcmd = app.add_subcommand("bench", "Benchmark suites");
  benchcmd->add_option("suite", ba.suite, "heat-scaling | quad-convergence | paper-tables")->required();
  benchcmd->add_option("--data", ba.data, "system manifest for paper-tables");
  benchcmd->add_option("--out", ba.out, "CSV output");
  benchcmd->add_option("--sizes", ba.sizes, "heat-scaling sizes");
  benchcmd->add_option("--seed", ba.seed, "seed for quad-convergence")->capture_default_str();
  benchcmd->add_option("--orders", ba.orders, "orders for paper-tables");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (reduce->parsed()) return cmd_reduce(ra, out);
    if (compare->parsed()) return cmd_compare(ca, out);
    return cmd_bench(ba, out);
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const IoError& e) {
    report_error(err, "io", e.what());
    return kExitIo;
  } catch (const Error& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report_error(err, "numerical", e.what());
    return kExitNumerical;
  }
}

}  // namespace balkit
