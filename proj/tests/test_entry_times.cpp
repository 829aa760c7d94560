#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "entrytime/entry_times.hpp"
#include "entrytime/errors.hpp"
#include "entrytime/model_spec.hpp"
#include "entrytime/models.hpp"
#include "entrytime/oracles.hpp"
#include "support.hpp"

using namespace entrytime;

namespace {

NormTrajectory traj(const std::string& spec) { return make_trajectory(build_model_from_spec(spec)); }

const SearchConfig kCfg{};

/// u_{r+1} ≤ u_r + 1e-7 + 4·time_tol wherever both are finite.
bool u_nonincreasing(const EntryTimeTable& t, double time_tol) {
  for (std::size_t r = 0; r + 1 < t.u.size(); ++r) {
    if (t.u[r].is_infinite() || t.u[r + 1].is_infinite()) continue;
    if (t.u[r + 1].value() > t.u[r].value() + 1e-7 + 4.0 * time_tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("final entry time examples") {
  EntryTime e = final_entry_time(traj("scalar-decay nu=1"), 3, kCfg);
  CHECK(std::abs(e.time.value() - 3.0) <= kCfg.time_tol);

  e = final_entry_time(traj("gaussian-shift"), 4, kCfg);
  CHECK(std::abs(e.time.value() - 4.0) <= kCfg.time_tol);

  e = final_entry_time(traj("nilpotent-shift L=1"), 2, kCfg);
  CHECK(std::abs(e.time.value() - 1.0) <= kCfg.time_tol);

  e = final_entry_time(traj("matrix [[0,1],[0,0]]"), 1, kCfg);
  CHECK(e.time.is_infinite());
  CHECK(e.status == EntryStatus::HorizonExceeded);
}

TEST_CASE("t_0 of contractions is exactly zero") {
  for (const char* spec : {"scalar-decay nu=2", "gaussian-shift", "nilpotent-shift L=1", "damped-nilpotent"}) {
    const EntryTime e = final_entry_time(traj(spec), 0, kCfg);
    CHECK(e.time.value() == 0.0);
    CHECK(e.status == EntryStatus::Exact);
  }
}

TEST_CASE("transient growth gives a positive t_0") {
  const NormTrajectory m = traj("matrix [[-1,10],[0,-1]]");
  const EntryTime e = final_entry_time(m, 0, kCfg);
  REQUIRE(e.time.is_finite());
  CHECK(e.time.value() > 1.0);
  CHECK(m.evaluate(e.time.value()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.evaluate(e.time.value() - 1e-3) > 1.0);
}

TEST_CASE("entry time table examples") {
  const EntryTimeTable g = entry_time_table(traj("gaussian-shift"), 2, kCfg);
  REQUIRE(g.u.size() == 3);
  CHECK(std::abs(g.u[0].value() - 2.0) <= 2 * kCfg.time_tol);
  CHECK(std::abs(g.u[1].value() - 2.0 * (std::sqrt(2.0) - 1.0)) <= 2 * kCfg.time_tol);
  CHECK(std::abs(g.u[2].value() - 2.0 * (std::sqrt(3.0) - std::sqrt(2.0))) <= 2 * kCfg.time_tol);

  const EntryTimeTable s = entry_time_table(traj("scalar-decay nu=2"), 5, kCfg);
  for (const auto& u : s.u) CHECK(std::abs(u.value() - 0.5) <= 2 * kCfg.time_tol);

  const EntryTimeTable n = entry_time_table(traj("nilpotent-shift L=1"), 4, kCfg);
  CHECK(std::abs(n.u[0].value() - 1.0) <= 2 * kCfg.time_tol);
  for (int r = 1; r <= 4; ++r) CHECK(n.u[static_cast<std::size_t>(r)].value() == 0.0);
  REQUIRE(n.extinction_time.has_value());
  CHECK(std::abs(*n.extinction_time - 1.0) <= kCfg.time_tol);
}

TEST_CASE("tables carry the infinity conventions") {
  const EntryTimeTable t = entry_time_table(traj("matrix [[0,1],[0,0]]"), 4, kCfg);
  REQUIRE(t.t.size() == 6);
  REQUIRE(t.u.size() == 5);
  for (std::size_t r = 0; r < t.u.size(); ++r) {
    CHECK(t.u[r].is_infinite() == t.t[r + 1].is_infinite());
  }
  CHECK(t.has_infinite_u());
  for (const auto s : t.status) CHECK(s == EntryStatus::HorizonExceeded);
}

TEST_CASE("make_entry_time_table builds u and the monotonicity diagnostic") {
  const EntryTimeTable t = make_entry_time_table(
      {ExtendedReal(0.0), ExtendedReal(1.0), ExtendedReal(1.5), ExtendedReal::infinity()},
      {EntryStatus::Exact, EntryStatus::Bisected, EntryStatus::Bisected, EntryStatus::HorizonExceeded});
  CHECK(t.r_max == 2);
  CHECK(t.u[0].value() == 1.0);
  CHECK(t.u[1].value() == 0.5);
  CHECK(t.u[2].is_infinite());
  CHECK(t.monotonicity_defect == -0.5);
  CHECK_THROWS_AS(make_entry_time_table({ExtendedReal(0.0)}, {EntryStatus::Exact, EntryStatus::Exact}),
                  InvalidArgument);
}

TEST_CASE("CSV layout") {
  const EntryTimeTable t = entry_time_table(traj("matrix [[0,1],[0,0]]"), 1, kCfg);
  const std::string csv = t.to_csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,t_r,u_r,status");
  std::getline(in, line);
  CHECK(line.rfind("0,inf,inf,horizon-exceeded", 0) == 0);
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "2,inf,,horizon-exceeded");

  const std::string s = entry_time_table(traj("scalar-decay nu=2"), 1, kCfg).to_csv();
  CHECK(s.find("\n0,0,") != std::string::npos);
  CHECK(s.find(",exact\n") != std::string::npos);
}

TEST_CASE("search configuration is validated") {
  SearchConfig c;
  c.time_tol = 1e-2;
  c.grid_step = 1e-3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SearchConfig{};
  c.horizon_cap = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SearchConfig{};
  c.norm_floor = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(final_entry_time(traj("scalar-decay"), -1, kCfg), InvalidArgument);
  CHECK_THROWS_AS(entry_time_table(traj("scalar-decay"), 0, kCfg), InvalidArgument);
}

TEST_CASE("vector entry time examples") {
  const SemigroupModel m = build_model_from_spec("matrix [[-1,0],[0,-2]]");
  const std::vector<double> e1{1.0, 0.0};
  const std::vector<double> e2{0.0, 1.0};
  CHECK(std::abs(vector_entry_time(m, e2, 1, kCfg).time.value() - 0.5) <= kCfg.time_tol);
  CHECK(std::abs(vector_entry_time(m, e1, 1, kCfg).time.value() - 1.0) <= kCfg.time_tol);
  CHECK(std::abs(vector_entry_time(m, e1, 3, kCfg).time.value() - 3.0) <= kCfg.time_tol);
  const std::vector<double> bad{0.6, 0.6};
  CHECK_THROWS_AS(vector_entry_time(m, bad, 1, kCfg), InvalidArgument);
}

TEST_CASE("the operator entry time dominates every vector entry time") {
  const SemigroupModel m = build_model_from_spec("matrix [[-1,10],[0,-1]]");
  const NormTrajectory op = make_trajectory(m);
  std::mt19937_64 rng(2024);
  for (int r : {0, 1, 3}) {
    const double t_op = final_entry_time(op, r, kCfg).time.value();
    for (int k = 0; k < 50; ++k) {
      const auto x = testing_support::random_unit(rng, 2);
      const EntryTime tx = vector_entry_time(m, x, r, kCfg);
      REQUIRE(tx.time.is_finite());
      CHECK(tx.time.value() <= t_op + kCfg.time_tol);
    }
  }
}

TEST_CASE("u is nonincreasing on every suite model") {
  for (const auto& spec : testing_support::suite_specs()) {
    CAPTURE(spec);
    const EntryTimeTable t = entry_time_table(traj(spec), 20, kCfg);
    CHECK(u_nonincreasing(t, kCfg.time_tol));
  }
}

TEST_CASE("entry times are subadditive on random triangular models") {
  // For t > t_r + t_s, ‖T(t)‖ ≤ ‖T(a)‖‖T(t-a)‖ ≤ e^{-r}e^{-s}, so t_{r+s} ≤ t_r + t_s.
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    const SemigroupModel m(MatrixSemigroup{testing_support::random_triangular(seed, 3, seed % 2 == 0)});
    const EntryTimeTable t = entry_time_table(make_trajectory(m), 20, kCfg);
    REQUIRE_FALSE(t.has_infinite_u());
    for (int r = 0; r <= 10; ++r) {
      for (int s = 0; r + s <= 21; ++s) {
        const double lhs = t.t[static_cast<std::size_t>(r + s)].value();
        CHECK(lhs <= t.t[static_cast<std::size_t>(r)].value() + t.t[static_cast<std::size_t>(s)].value() +
                         4 * kCfg.time_tol);
      }
    }
  }
}

TEST_CASE("u can increase: a lower-triangular contraction") {
  // ‖e^{tA}‖ is nonincreasing here, yet u_r climbs toward 1/0.7216 from below.
  const SemigroupModel m(MatrixSemigroup{testing_support::random_triangular(1, 3, false)});
  const NormTrajectory tr = make_trajectory(m);
  CHECK(tr.flags().is_contraction);
  const EntryTimeTable t = entry_time_table(tr, 20, kCfg);
  CHECK(t.u[2].value() > t.u[1].value() + 3e-3);
  CHECK(t.monotonicity_defect > 3e-3);
  // Independent check of t_1, t_2, t_3 on a 1e-4 grid.
  double brackets[3];
  for (int r = 1; r <= 3; ++r) {
    brackets[r - 1] = oracles::dense_grid_entry_time(tr, r, 1e-4, 40.0).value.value();
  }
  CHECK((brackets[2] - brackets[1]) - (brackets[1] - brackets[0]) > 3e-3 - 2e-4);
  CHECK(std::abs(t.u[20].value() - 1.0 / 0.721604880222058) <= 1e-4);
}

TEST_CASE("the norm equals e^{-r} at each continuous crossing") {
  for (const auto& spec : testing_support::suite_specs()) {
    const NormTrajectory tr = traj(spec);
    if (!tr.flags().is_norm_continuous) continue;
    CAPTURE(spec);
    const EntryTimeTable t = entry_time_table(tr, 12, kCfg);
    for (int r = 1; r <= 12; ++r) {
      const ExtendedReal& tr_r = t.t[static_cast<std::size_t>(r)];
      if (tr_r.is_infinite()) continue;
      CAPTURE(r);
      CHECK(std::abs(tr.evaluate(tr_r.value()) - std::exp(-r)) <= std::exp(-r) * 1e-4);
    }
  }
}

TEST_CASE("monotone bisection and last-crossing scan agree on contractions") {
  SearchConfig bisect = kCfg;
  bisect.method = SearchMethod::MonotoneBisection;
  SearchConfig scan = kCfg;
  scan.method = SearchMethod::LastCrossingScan;
  for (const auto& spec : testing_support::suite_specs()) {
    const NormTrajectory tr = traj(spec);
    if (!tr.flags().is_contraction) continue;
    CAPTURE(spec);
    for (int r = 0; r <= 10; ++r) {
      const EntryTime a = final_entry_time(tr, r, bisect);
      const EntryTime b = final_entry_time(tr, r, scan);
      REQUIRE(a.time.is_finite() == b.time.is_finite());
      if (a.time.is_finite()) CHECK(std::abs(a.time.value() - b.time.value()) <= 2 * kCfg.time_tol);
    }
  }
}

TEST_CASE("a non-monotone bump is found by the scan, not by a first crossing") {
  // Dips below e^{-1} near t = 1 and comes back above it until t ≈ 3.
  const NormTrajectory bump(
      "bump",
      [](double t) { return std::exp(-t) + 0.5 * std::exp(-4.0 * (t - 2.5) * (t - 2.5)); }, TrajectoryFlags{});
  const EntryTime e = final_entry_time(bump, 1, kCfg);
  REQUIRE(e.time.is_finite());
  CHECK(e.time.value() > 2.5);
  CHECK(bump.evaluate(e.time.value()) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  for (double t = e.time.value() + 0.01; t < 20.0; t += 0.01) CHECK(bump.evaluate(t) <= std::exp(-1.0));
}

TEST_CASE("a plateau exactly at the level already counts as entered") {
  // ‖T‖ = e^{-1} on [1, 2], then decays. t_r is the infimum of times after which
  // ‖T‖ ≤ e^{-r}, so only values strictly above the level delay it.
  const NormTrajectory plateau(
      "plateau",
      [](double t) {
        if (t < 1.0) return std::exp(-t);
        if (t <= 2.0) return std::exp(-1.0);
        return std::exp(-1.0 - (t - 2.0));
      },
      TrajectoryFlags{true, true, true, false});
  CHECK(std::abs(final_entry_time(plateau, 1, kCfg).time.value() - 1.0) <= kCfg.time_tol);
  SearchConfig scan = kCfg;
  scan.method = SearchMethod::LastCrossingScan;
  CHECK(std::abs(final_entry_time(plateau, 1, scan).time.value() - 1.0) <= kCfg.time_tol);
}

TEST_CASE("extinction boundary") {
  const auto b = extinction_boundary(traj("damped-nilpotent nu=1 L=1.5"), kCfg);
  REQUIRE(b.has_value());
  CHECK(std::abs(*b - 1.5) <= kCfg.time_tol);
  CHECK_FALSE(extinction_boundary(traj("scalar-decay nu=1"), kCfg).has_value());
}

TEST_CASE("final entry into an arbitrary level") {
  const EntryTime e = final_entry_into(traj("scalar-decay nu=1"), 0.25, kCfg);
  CHECK(std::abs(e.time.value() - std::log(4.0)) <= kCfg.time_tol);
  CHECK_THROWS_AS(final_entry_into(traj("scalar-decay nu=1"), 0.0, kCfg), InvalidArgument);
}
