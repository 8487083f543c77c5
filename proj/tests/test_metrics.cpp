#include <doctest.h>

#include <sstream>

#include "balkit/metrics.hpp"
#include "balkit/reduce.hpp"
#include "oracles.hpp"

using namespace balkit;

TEST_CASE("frequency response of the first-order lag") {
  const TransferFunction h = transfer(oracle::s1());
  CHECK(freq_response(h, {0.0})(0) == doctest::Approx(1.0));
  CHECK(freq_response(h, {1.0})(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  const std::vector<double> grid = log_nodes(1e-2, 1e2, 50);
  const VectorXd v = freq_response(h, grid);
  for (Index i = 0; i < v.size(); ++i) {
    CHECK(v(i) == doctest::Approx(1.0 / std::sqrt(1.0 + grid[static_cast<std::size_t>(i)] * grid[static_cast<std::size_t>(i)])));
    if (i > 0) CHECK(v(i) < v(i - 1));
  }
}

TEST_CASE("all singular values per node") {
  const StateSpace sys = random_stable(6, 3, 2, 1);
  const MatrixXd all = freq_response_all(transfer(sys), {0.5, 2.0});
  CHECK(all.rows() == 2);
  CHECK(all.cols() == 2);
  const VectorXd top = freq_response(transfer(sys), {0.5, 2.0});
  CHECK((all.col(0) - top).norm() <= 1e-14);
  CHECK((all.col(1).array() <= all.col(0).array()).all());
}

TEST_CASE("grid H-infinity estimate") {
  const HinfEstimate e = hinf_grid(transfer(oracle::s1()), 1e-3, 1e3, 200);
  CHECK(e.value >= 0.999);
  CHECK(e.value <= 1.0);

  ReducedModel exact;
  exact.sys = oracle::s1();
  CHECK(hinf_grid(transfer(error_system(oracle::s1(), exact)), 1e-3, 1e3).value <= 1e-12);
  CHECK_THROWS_AS(hinf_grid(transfer(oracle::s1()), 1.0, 1.0), UsageError);

  // resonant peak at w = 1 with damping 0.01: |H(i)| = 50
  MatrixXd a(2, 2);
  a << 0.0, 1.0, -1.0, -0.02;
  MatrixXd b = MatrixXd::Zero(2, 1), c = MatrixXd::Zero(1, 2);
  b(1, 0) = 1.0;
  c(0, 0) = 1.0;
  const StateSpace res(a, b, c, MatrixXd::Zero(1, 1));
  const HinfEstimate peak = hinf_grid(transfer(res), 1e-2, 1e2, 50);
  const double exact_peak = 1.0 / (0.02 * std::sqrt(1.0 - 0.0001));
  CHECK(peak.value == doctest::Approx(exact_peak).epsilon(1e-6));
  CHECK(peak.value <= exact_peak * (1.0 + 1e-12));
  CHECK(hinf_grid(transfer(res), 1e-2, 1e2, 50, false).value < peak.value);
}

TEST_CASE("bt bound") {
  VectorXd s(2);
  s << 0.7310, 0.0190;
  CHECK(bt_bound(s, 1) == doctest::Approx(0.0380));
  CHECK(bt_bound(VectorXd::Ones(1), 0) == 2.0);
  CHECK_THROWS_AS(bt_bound(s, 2), UsageError);
  CHECK_THROWS_AS(bt_bound(s, -1), UsageError);
}

TEST_CASE("bound holds on random systems") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const StateSpace sys = random_stable(15, 2, 2, seed);
    const GramianFactors f = lyap_factor_dense(sys);
    for (Index r : {2, 5}) {
      const ReducedModel rom = bt(sys, f, OrderSpec::fixed(r));
      CHECK(hinf_grid(difference(transfer(sys), transfer(rom)), 1e-4, 1e4).value <=
            bt_bound(*rom.hankel_used, r) + 1e-10);
    }
  }
}

TEST_CASE("nested BT family stays under a shrinking bound") {
  // the error itself need not shrink with r (seed 1 goes from 0.3228 at
  // r = 3 to 0.3980 at r = 4), the bound does
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const StateSpace sys = random_stable(12, 1, 1, seed);
    const GramianFactors f = lyap_factor_dense(sys);
    double prev_bound = std::numeric_limits<double>::infinity();
    for (Index r = 1; r <= 8; ++r) {
      const ReducedModel rom = bt(sys, f, OrderSpec::fixed(r));
      const double bound = bt_bound(*rom.hankel_used, r);
      const double e = hinf_grid(transfer(error_system(sys, rom)), 1e-4, 1e4).value;
      CHECK(bound <= prev_bound);
      CHECK(e <= bound + 1e-10);
      prev_bound = bound;
    }
  }
}

TEST_CASE("response of the reciprocal system at reciprocal nodes") {
  const StateSpace sys = random_stable(9, 2, 2, 4);
  const StateSpace rec = reciprocal(sys);
  const Complex I(0.0, 1.0);
  for (double w : log_nodes(1e-2, 1e2, 15)) {
    CHECK((eval_tf(rec, 1.0 / (I * w)) - eval_tf(sys, I * w)).norm() <= 1e-10);
  }
}

TEST_CASE("poles") {
  ReducedModel rom;
  rom.sys = oracle::s1();
  const VectorXcd p1 = poles(rom);
  REQUIRE(p1.size() == 1);
  CHECK(std::abs(p1(0) - Complex(-1.0, 0.0)) <= 1e-15);

  const ReducedModel b = bt(random_stable(10, 1, 1, 3), OrderSpec::fixed(6));
  const VectorXcd pb = poles(b);
  for (Index i = 0; i < pb.size(); ++i) {
    CHECK(pb(i).real() < 0.0);
    if (i > 0) CHECK(pb(i).real() >= pb(i - 1).real());
  }
}

TEST_CASE("difference rejects mismatched shapes") {
  const TransferFunction d = difference(transfer(random_stable(3, 1, 1, 1)), transfer(random_stable(3, 2, 1, 1)));
  CHECK_THROWS_AS(d(Complex(0.0, 1.0)), DimensionError);
}

TEST_CASE("response CSV") {
  std::ostringstream out;
  write_response_csv(out, {1.0, 10.0}, {"fom", "err"}, {VectorXd::Ones(2), VectorXd::Zero(2)});
  const std::string s = out.str();
  CHECK(s.rfind("omega,fom,err\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  std::ostringstream bad;
  CHECK_THROWS_AS(write_response_csv(bad, {1.0}, {"a"}, {VectorXd::Ones(2)}), DimensionError);
}
