#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "starsense/gates.hpp"
#include "starsense/oracle.hpp"
#include "starsense/rng.hpp"
#include "test_util.hpp"

using namespace starsense;
using test_util::wrap_phase;

namespace {

constexpr double kPi = std::numbers::pi;

BranchPaird random_state(int weight, SplitMix64& rng) {
  BranchPaird s;
  s.weight = weight;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      s.coeffs(a, b) = std::complex<double>(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
  return s.normalized();
}

double state_distance(const BranchPaird& a, const BranchPaird& b) {
  return (a.coeffs - b.coeffs).norm();
}

// Relative phase the closed protocol should imprint on line m: both branch
// weights precess against each other and the A spin flips between branches.
double expected_line_phase(int m, const ExperimentConfig& cfg, const StarSystem& sys) {
  const double delta_gamma = sys.gamma_a + double(sys.n_b - 2 * m) * sys.gamma_b;
  return 2 * kPi * cfg.b_off_tesla * 1e6 * delta_gamma * cfg.t_wait_s;
}

}  // namespace

// ---------------------------------------------------------------------------
// single gates
// ---------------------------------------------------------------------------

TEST_CASE("hadamard on A is an involution and preserves norm") {
  SplitMix64 rng(7, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = random_state(rep % 10, rng);
    const auto h = apply_hadamard_a(s);
    CHECK(h.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(state_distance(apply_hadamard_a(h), s) < 1e-14);
  }
}

TEST_CASE("global C-NOT swaps the flipped-A pattern and squares to identity") {
  const auto g = BranchPaird::ground(4);
  auto s = g;
  s.coeffs(1, 0) = std::complex<double>(0.5, 0.25);
  const auto c = apply_global_cnot(s);
  CHECK(c.coeffs(0, 0) == s.coeffs(0, 0));  // A=0 untouched
  CHECK(c.coeffs(1, 1) == s.coeffs(1, 0));
  CHECK(c.coeffs(1, 0) == s.coeffs(1, 1));
  CHECK(state_distance(apply_global_cnot(c), s) == 0.0);
}

TEST_CASE("branch phase: Zeeman and J contributions separate") {
  const StarSystem sys;
  ExperimentConfig cfg;
  cfg.b_off_tesla = 2.7e-6;
  cfg.t_wait_s = 3.1e-4;
  SUBCASE("J off leaves the bare Zeeman phase") {
    cfg.include_j_during_wait = false;
    for (int a = 0; a < 2; ++a)
      for (int w = 0; w <= sys.n_b; ++w) {
        const double zeeman = 2 * kPi * cfg.b_off_tesla * 1e6 *
                              (a * sys.gamma_a + w * sys.gamma_b) * cfg.t_wait_s;
        CHECK(branch_phase(a, w, cfg, sys) == doctest::Approx(zeeman).epsilon(1e-13));
      }
  }
  SUBCASE("A-flip phase increment carries the J ladder") {
    cfg.include_j_during_wait = true;
    for (int w = 0; w <= sys.n_b; ++w) {
      const double increment = branch_phase(1, w, cfg, sys) - branch_phase(0, w, cfg, sys);
      const double expect = 2 * kPi * cfg.b_off_tesla * 1e6 * sys.gamma_a * cfg.t_wait_s +
                            2 * kPi * sys.j_coupling * cfg.t_wait_s * (w - sys.n_b / 2.0);
      CHECK(increment == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("free evolution applies branch phases cellwise") {
  const StarSystem sys;
  ExperimentConfig cfg;
  cfg.b_off_tesla = 1.9e-6;
  cfg.t_wait_s = 5.5e-4;
  BranchPaird s;
  s.weight = 2;
  s.coeffs.setConstant(std::complex<double>(0.5, 0));
  const auto e = free_evolve(s, cfg, sys);
  CHECK(e.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int a = 0; a < 2; ++a) {
    const double phi_ref = branch_phase(a, s.weight, cfg, sys);
    const double phi_comp = branch_phase(a, sys.n_b - s.weight, cfg, sys);
    CHECK(std::abs(e.coeffs(a, 0) - 0.5 * std::polar(1.0, phi_ref)) < 1e-14);
    CHECK(std::abs(e.coeffs(a, 1) - 0.5 * std::polar(1.0, phi_comp)) < 1e-14);
  }
}

TEST_CASE("single B spin in superposition precesses at gamma_b") {
  // One peripheral spin, A idle: relative phase between the two patterns is
  // the bare B Zeeman phase. J must be off -- with A in a definite state the
  // coupling does not cancel.
  const StarSystem sys(1, 17.251, 42.577, 10.67);
  ExperimentConfig cfg;
  cfg.b_off_tesla = 3.13e-6;
  cfg.t_wait_s = 400e-6;
  cfg.include_j_during_wait = false;
  BranchPaird s;
  s.weight = 0;
  s.coeffs(0, 0) = s.coeffs(0, 1) = 1 / std::sqrt(2.0);
  const auto e = free_evolve(s, cfg, sys);
  const double phase = std::arg(std::conj(e.coeffs(0, 0)) * e.coeffs(0, 1));
  CHECK(phase / kPi == doctest::Approx(0.106612808).epsilon(1e-9));
}

// ---------------------------------------------------------------------------
// closed protocol
// ---------------------------------------------------------------------------

TEST_CASE("line signals carry e^{i phase} with the weighted phase difference") {
  const StarSystem sys;
  const auto ensemble = build_thermal_ensemble<double>(sys);
  SplitMix64 rng(11, 0);
  for (int rep = 0; rep < 12; ++rep) {
    ExperimentConfig cfg;
    cfg.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
    cfg.t_wait_s = rng.uniform() * 1e-3;
    const auto lines = run_noon_protocol(ensemble, cfg);
    REQUIRE(lines.size() == 10);
    for (const auto& line : lines) {
      CHECK(std::abs(line.signal) == doctest::Approx(1.0).epsilon(1e-13));
      const double expect = expected_line_phase(line.weight, cfg, sys);
      CHECK(std::abs(wrap_phase(line.phase() - expect)) < 1e-10);
    }
  }
}

TEST_CASE("pinned protocol phases at the reference working point") {
  const StarSystem sys;
  ExperimentConfig cfg;
  cfg.b_off_tesla = 3.13e-6;
  cfg.t_wait_s = 400e-6;
  const auto lines = run_noon_protocol(build_thermal_ensemble<double>(sys), cfg);
  // m = 0: full NOON line, acquired phase just past pi (wraps negative)
  CHECK(std::abs(wrap_phase(lines[0].phase() - 1.002711776 * kPi)) < 1e-9);
  // m = 1: one B spin against eight
  CHECK(lines[1].phase() / kPi == doctest::Approx(0.78948616).epsilon(1e-9));
  // m = 9: inverted pattern precesses the other way
  CHECK(lines[9].phase() / kPi == doctest::Approx(-0.916318768).epsilon(1e-9));
  // outer lines are the fastest in magnitude per unit detuning
  CHECK(std::abs(wrap_phase(lines[0].phase())) > std::abs(wrap_phase(lines[4].phase())));
}

TEST_CASE("J during the wait cancels line by line") {
  const StarSystem sys;
  const auto ensemble = build_thermal_ensemble<double>(sys);
  SplitMix64 rng(13, 0);
  for (int rep = 0; rep < 8; ++rep) {
    ExperimentConfig on, off;
    on.b_off_tesla = off.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
    on.t_wait_s = off.t_wait_s = rng.uniform() * 2e-3;
    on.include_j_during_wait = true;
    off.include_j_during_wait = false;
    const auto a = run_noon_protocol(ensemble, on);
    const auto b = run_noon_protocol(ensemble, off);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(a[i].signal - b[i].signal) < 1e-12);
  }
}

TEST_CASE("zero detuning returns unit signal on every line") {
  ExperimentConfig cfg;
  cfg.b_off_tesla = 0;
  cfg.t_wait_s = 7.7e-4;
  const auto lines = run_noon_protocol(build_thermal_ensemble<double>(StarSystem{}), cfg);
  for (const auto& line : lines)
    CHECK(std::abs(line.signal - std::complex<double>(1, 0)) < 1e-13);
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.t_wait_s = -1e-6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

TEST_CASE("sweep matches pointwise protocol runs") {
  const StarSystem sys;
  const auto ensemble = build_thermal_ensemble<double>(sys);
  Eigen::VectorXd times(16);
  for (int i = 0; i < 16; ++i) times[i] = i * 2e-5;
  const auto sweep = sweep_t_wait(ensemble, 3.13e-6, times);
  REQUIRE(sweep.lines.size() == 10);
  REQUIRE(sweep.signals.rows() == 10);
  REQUIRE(sweep.signals.cols() == 16);
  ExperimentConfig cfg;
  cfg.b_off_tesla = 3.13e-6;
  for (const int j : {0, 5, 15}) {
    cfg.t_wait_s = times[j];
    const auto lines = run_noon_protocol(ensemble, cfg);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(sweep.signals(i, j) - lines[i].signal) < 1e-14);
  }
}

TEST_CASE("sweep rejects bad time grids") {
  const auto ensemble = build_thermal_ensemble<double>(StarSystem{});
  Eigen::VectorXd one(1);
  one[0] = 0;
  CHECK_THROWS_AS(sweep_t_wait(ensemble, 1e-6, one), std::invalid_argument);
  Eigen::VectorXd jitter(4);
  jitter << 0.0, 1e-5, 2.5e-5, 3e-5;
  CHECK_THROWS_AS(sweep_t_wait(ensemble, 1e-6, jitter), std::invalid_argument);
  Eigen::VectorXd reversed(3);
  reversed << 2e-5, 1e-5, 0.0;
  CHECK_THROWS_AS(sweep_t_wait(ensemble, 1e-6, reversed), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// state-vector oracle
// ---------------------------------------------------------------------------

TEST_CASE("oracle H then C-NOT builds the two-spin Bell state") {
  const StarSystem sys(1, 17.251, 42.577, 10.67);
  auto psi = make_ground_full<double>(0, sys);
  REQUIRE(psi.size() == 4);
  psi = oracle_hadamard_a(psi);
  psi = oracle_global_cnot(psi, sys);
  const double r = 1 / std::sqrt(2.0);
  CHECK(std::abs(psi[0] - std::complex<double>(r, 0)) < 1e-15);
  CHECK(std::abs(psi[3] - std::complex<double>(r, 0)) < 1e-15);
  CHECK(std::abs(psi[1]) < 1e-15);
  CHECK(std::abs(psi[2]) < 1e-15);
}

TEST_CASE("sector embedding round-trips through the full register") {
  const StarSystem sys(5, 17.251, 42.577, 10.67);
  SplitMix64 rng(17, 0);
  for (const std::uint32_t pattern : {0b00000u, 0b00101u, 0b11010u, 0b11111u}) {
    const int w = __builtin_popcount(pattern);
    const auto s = random_state(w, rng);
    const auto psi = sector_to_full(s, pattern, sys);
    CHECK(psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
    const auto back = project_branch_pair(psi, pattern, sys);
    CHECK(back.weight == w);
    CHECK((back.coeffs - s.coeffs).norm() < 1e-14);
  }
  CHECK_THROWS_AS(sector_to_full(random_state(2, rng), 0b1u, sys), std::invalid_argument);
}

TEST_CASE("oracle gates preserve norm") {
  const StarSystem sys(4, 17.251, 42.577, 10.67);
  ExperimentConfig cfg;
  cfg.b_off_tesla = 4e-6;
  cfg.t_wait_s = 6e-4;
  SplitMix64 rng(19, 0);
  auto psi = make_ground_full<double>(0b0110, sys);
  psi = oracle_hadamard_a(psi);
  CHECK(psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
  psi = oracle_global_cnot(psi, sys);
  CHECK(psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
  psi = oracle_free_evolve(psi, cfg, sys);
  CHECK(psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("a-spin signal reads the transverse coherence") {
  const StarSystem sys(3, 17.251, 42.577, 10.67);
  for (const double theta : {0.0, 0.4, -2.2, 3.0}) {
    FullState<double> psi = FullState<double>::Zero(16);
    const std::uint32_t pattern = 0b101;
    psi[pattern] = 1 / std::sqrt(2.0);
    psi[pattern | 0b1000] = std::polar(1 / std::sqrt(2.0), theta);
    const auto sig = a_spin_signal(psi);
    CHECK(std::abs(sig - std::polar(1.0, theta)) < 1e-14);
  }
}

TEST_CASE("compressed protocol matches the oracle on a small star") {
  const StarSystem sys(3, 17.251, 42.577, 10.67);
  SplitMix64 rng(23, 0);
  for (int rep = 0; rep < 6; ++rep) {
    ExperimentConfig cfg;
    cfg.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
    cfg.t_wait_s = rng.uniform() * 1e-3;
    for (std::uint32_t pattern = 0; pattern < 8; ++pattern) {
      const int m = __builtin_popcount(pattern);
      const auto s = protocol_final_state(BranchPaird::ground(m), cfg, sys);
      const auto compressed = 2.0 * std::conj(s.coeffs(0, 0)) * s.coeffs(1, 0);
      const auto reference = oracle_run<double>(pattern, cfg, sys);
      CHECK(std::abs(compressed - reference) < 1e-12);
    }
  }
}

TEST_CASE("equal-weight patterns are indistinguishable to collective gates") {
  const StarSystem sys(5, 17.251, 42.577, 10.67);
  ExperimentConfig cfg;
  cfg.b_off_tesla = 3.13e-6;
  cfg.t_wait_s = 400e-6;
  const auto reference = oracle_run<double>(0b00011, cfg, sys);
  for (const std::uint32_t pattern : {0b00101u, 0b01010u, 0b10001u, 0b11000u})
    CHECK(std::abs(oracle_run<double>(pattern, cfg, sys) - reference) < 1e-13);
}

TEST_CASE("oracle dimension cap") {
  CHECK_THROWS_AS(check_oracle_dim(13), std::invalid_argument);
  CHECK_NOTHROW(check_oracle_dim(12));
  const StarSystem big(13, 17.251, 42.577, 10.67);
  ExperimentConfig cfg;
  CHECK_THROWS_AS(oracle_run<double>(0, cfg, big), std::invalid_argument);
}

TEST_CASE("n_b = 1 protocol signal: pinned two-spin phase") {
  const StarSystem sys(1, 17.251, 42.577, 10.67);
  ExperimentConfig cfg;
  cfg.b_off_tesla = 3.13e-6;
  cfg.t_wait_s = 400e-6;
  const auto sig = oracle_run<double>(0, cfg, sys);
  CHECK(std::arg(sig) / kPi == doctest::Approx(0.149809312).epsilon(1e-9));
  CHECK(std::abs(sig) == doctest::Approx(1.0).epsilon(1e-13));
}
