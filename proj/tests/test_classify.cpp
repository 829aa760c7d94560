#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "entrytime/classify.hpp"
#include "entrytime/errors.hpp"
#include "entrytime/model_spec.hpp"
#include "entrytime/oracles.hpp"
#include "support.hpp"

using namespace entrytime;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Run {
  NormTrajectory traj;
  EntryTimeTable table;
  Classification verdict;
};

Run run(const SemigroupModel& m, int r_max) {
  NormTrajectory tr = make_trajectory(m);
  EntryTimeTable t = entry_time_table(tr, r_max, SearchConfig{});
  Classification c = classify(t, ClassifyThresholds{});
  return {tr, t, c};
}

Run run(const std::string& spec, int r_max) { return run(build_model_from_spec(spec), r_max); }

EntryTimeTable table_from_u(const std::vector<double>& u) {
  std::vector<ExtendedReal> t{ExtendedReal(0.0)};
  std::vector<EntryStatus> s{EntryStatus::Exact};
  for (double x : u) {
    t.push_back(ExtendedReal(t.back().value() + x));
    s.push_back(EntryStatus::Bisected);
  }
  return make_entry_time_table(t, s);
}

}  // namespace

TEST_CASE("classification examples") {
  const Run g = run("gaussian-shift", 50);
  CHECK(g.verdict.verdict == Verdict::Superstable);
  CHECK_FALSE(g.verdict.extinction_test_passed);

  const Run n = run("nilpotent-shift L=1", 20);
  CHECK(n.verdict.verdict == Verdict::FiniteTimeExtinction);
  CHECK(n.verdict.k == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(n.verdict.k_error >= 0.0);

  const Run s = run("scalar-decay nu=2", 40);
  CHECK(s.verdict.verdict == Verdict::Stable);
  CHECK(s.verdict.nu == doctest::Approx(2.0).epsilon(1e-6));

  const Run u = run("matrix [[0,1],[0,0]]", 20);
  CHECK(u.verdict.verdict == Verdict::Unstable);
  CHECK(u.verdict.diagnostics.any_infinite);
}

TEST_CASE("classification needs a long enough table") {
  const EntryTimeTable t = table_from_u(std::vector<double>(10, 1.0));
  CHECK_THROWS_AS(classify(t, ClassifyThresholds{}), InvalidArgument);
  ClassifyThresholds th;
  th.plateau_window = 0;
  CHECK_THROWS_AS(th.validate(), InvalidArgument);
  th = ClassifyThresholds{};
  th.eps_super = -1.0;
  CHECK_THROWS_AS(th.validate(), InvalidArgument);
}

TEST_CASE("synthetic tails") {
  // A plateau classifies as Stable with ν = 1/u.
  Classification c = classify(table_from_u(std::vector<double>(30, 0.25)), ClassifyThresholds{});
  CHECK(c.verdict == Verdict::Stable);
  CHECK(c.nu == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c.diagnostics.growth_elasticity == doctest::Approx(0.0).epsilon(1e-12));

  // u_r = 1/(r+1): rate grows like r, so the plateau test cannot pass but the trend test does.
  std::vector<double> harmonic;
  for (int r = 0; r < 40; ++r) harmonic.push_back(1.0 / (r + 1.0));
  c = classify(table_from_u(harmonic), ClassifyThresholds{});
  CHECK(c.verdict == Verdict::Superstable);
  CHECK(c.diagnostics.growth_elasticity > 0.9);

  // Geometric decay: summable, extinction declared with k close to the full sum.
  std::vector<double> geometric;
  for (int r = 0; r < 40; ++r) geometric.push_back(std::pow(0.5, r));
  c = classify(table_from_u(geometric), ClassifyThresholds{});
  CHECK(c.verdict == Verdict::FiniteTimeExtinction);
  CHECK(std::abs(c.k - 2.0) <= c.k_error + 1e-12);
}

TEST_CASE("the implication chain holds on the suite") {
  for (const auto& spec : testing_support::suite_specs()) {
    CAPTURE(spec);
    const Classification c = run(spec, 20).verdict;
    if (c.verdict == Verdict::FiniteTimeExtinction) CHECK(c.superstable_test_passed);
    if (c.superstable_test_passed) CHECK(c.stable_test_passed);
    if (c.verdict == Verdict::Stable) CHECK(c.nu > 0.0);
    CHECK(c.k >= 0.0);
  }
}

TEST_CASE("growth characteristic examples") {
  const Run s = run("scalar-decay nu=2", 40);
  GrowthEstimate g = growth_characteristic(s.traj, s.table, default_growth_grid(s.table), ClassifyThresholds{});
  CHECK(std::abs(g.omega_large_t + 2.0) <= 1e-3);
  CHECK(std::abs(g.omega_inf_grid + 2.0) <= 1e-3);
  CHECK(std::abs(g.omega_entry + 2.0) <= 1e-3);
  CHECK(g.agreement_spread <= 1e-3);

  const Run ga = run("gaussian-shift", 50);
  g = growth_characteristic(ga.traj, ga.table, default_growth_grid(ga.table), ClassifyThresholds{});
  CHECK(g.omega_large_t == -kInf);
  CHECK(g.omega_inf_grid == -kInf);
  CHECK(g.omega_entry == -kInf);
  CHECK(g.all_minus_infinity);

  const Run j = run("matrix [[-1,10],[0,-1]]", 60);
  g = growth_characteristic(j.traj, j.table, default_growth_grid(j.table), ClassifyThresholds{});
  CHECK(std::abs(g.omega_entry + 1.0) <= 5e-2);
  CHECK(std::abs(g.omega_large_t + 1.0) <= 5e-2);

  const Run u = run("matrix [[0,1],[0,0]]", 20);
  g = growth_characteristic(u.traj, u.table, default_growth_grid(u.table), ClassifyThresholds{});
  CHECK(g.omega_entry == 0.0);
}

TEST_CASE("growth grid must reach the table") {
  const Run s = run("scalar-decay nu=2", 20);
  const std::vector<double> short_grid{0.5, 1.0};
  CHECK_THROWS_AS(growth_characteristic(s.traj, s.table, short_grid, ClassifyThresholds{}), InvalidArgument);
  CHECK_THROWS_AS(growth_characteristic(s.traj, s.table, {}, ClassifyThresholds{}), InvalidArgument);
}

TEST_CASE("routes agree on stable matrix models") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    CAPTURE(seed);
    const Matrix a = testing_support::random_triangular(seed + 500, 3);
    const Run r = run(SemigroupModel(MatrixSemigroup{a}), 60);
    REQUIRE(r.verdict.verdict == Verdict::Stable);
    const GrowthEstimate g =
        growth_characteristic(r.traj, r.table, default_growth_grid(r.table), ClassifyThresholds{});
    const double abscissa = oracles::spectral_abscissa_triangular(a);
    CHECK(std::abs(g.omega_entry - g.omega_large_t) <= 5e-2);
    CHECK(std::abs(g.omega_entry - abscissa) <= 5e-2);
    CHECK(std::abs(g.omega_large_t - abscissa) <= 5e-2);
  }
}

TEST_CASE("Gelfand examples") {
  CHECK(gelfand_spectral_radius(SemigroupModel(MatrixSemigroup{Matrix::diagonal({-1, -3})}), 1.0, 64).radius ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
  const double nil = gelfand_spectral_radius(build_model_from_spec("matrix [[0,1],[0,0]]"), 1.0, 1 << 20).radius;
  CHECK(std::abs(nil - 1.0) <= 1e-3);
  const double scalar =
      gelfand_spectral_radius(SemigroupModel(MatrixSemigroup{Matrix::diagonal({-2, -2})}), 1.0, 16).radius;
  CHECK(std::abs(scalar - std::exp(-2.0)) <= 1e-6);
  CHECK_THROWS_AS(gelfand_spectral_radius(build_model_from_spec("gaussian-shift"), 1.0, 16), InvalidArgument);
}

TEST_CASE("Gelfand radius respects the stability index") {
  for (const char* spec : {"matrix [[-1,10],[0,-1]]", "matrix [[-1,0],[0,-2]]", "matrix [[-0.5,3,0],[0,-1,2],[0,0,-2]]"}) {
    CAPTURE(spec);
    const SemigroupModel m = build_model_from_spec(spec);
    const Run r = run(m, 60);
    REQUIRE(r.verdict.verdict == Verdict::Stable);
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(gelfand_spectral_radius(m, t, 1 << 12).radius <= std::exp(-t * r.verdict.nu) * 1.05);
    }
  }
}

TEST_CASE("matrix models never go extinct") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CAPTURE(seed);
    const Matrix a = testing_support::random_dense(seed + 1000, 3, 3, -2.0, 1.0);
    CHECK(run(SemigroupModel(MatrixSemigroup{a}), 16).verdict.verdict != Verdict::FiniteTimeExtinction);
  }
}

TEST_CASE("fractional integration is superstable with small spectral radius") {
  const SemigroupModel m = build_model_from_spec("fractional-integration n=64");
  CHECK(run(m, 20).verdict.verdict == Verdict::Superstable);
  for (double t : {1.0, 2.0}) CHECK(gelfand_spectral_radius(m, t, 256).radius < 0.05);
}

TEST_CASE("stability and extinction indices") {
  const auto nus = default_nu_grid();
  REQUIRE(nus.size() == 11);
  CHECK(nus.front() == 1.0);
  CHECK(nus.back() == 1024.0);

  const Run s = run("scalar-decay nu=2", 40);
  StabilityIndices i = stability_and_extinction_indices(s.traj, s.table, nus, ClassifyThresholds{});
  CHECK(i.nu_hat == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(i.k_hat_sum == kInf);
  CHECK_FALSE(i.sum_converged);

  const Run d = run("damped-nilpotent nu=1 L=1", 20);
  i = stability_and_extinction_indices(d.traj, d.table, nus, ClassifyThresholds{});
  CHECK(std::abs(i.k_hat_sum - 1.0) <= 0.05);
  CHECK(std::abs(i.k_hat_overshoot - 1.0) <= 0.05);
  // Closed form: M_ν = e^{ν-1}, (log M_ν)/ν = 1 - 1/ν.
  for (std::size_t k = 0; k < nus.size(); ++k) {
    CHECK(std::abs(i.log_m[k] / nus[k] - (1.0 - 1.0 / nus[k])) <= 2e-3);
  }

  const Run g = run("gaussian-shift", 50);
  i = stability_and_extinction_indices(g.traj, g.table, nus, ClassifyThresholds{});
  CHECK(i.k_hat_sum == kInf);
  CHECK(i.k_partial_sum == doctest::Approx(2.0 * std::sqrt(51.0)).epsilon(1e-6));
}
