#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entrytime/entry_times.hpp"
#include "entrytime/errors.hpp"
#include "entrytime/model_spec.hpp"
#include "entrytime/oracles.hpp"
#include "support.hpp"

using namespace entrytime;
using namespace entrytime::oracles;

namespace {

SemigroupModel parse(const char* spec) { return build_model_from_spec(spec); }

}  // namespace

TEST_CASE("closed-form entry time examples") {
  CHECK(closed_form_entry_times(parse("gaussian-shift"), 9).t[9].value() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(closed_form_entry_times(parse("scalar-decay nu=4"), 2).t[2].value() == 0.5);
  CHECK(closed_form_entry_times(parse("damped-nilpotent nu=1 L=1"), 3).t[3].value() == 1.0);

  const EntryTimeTable n = closed_form_entry_times(parse("nilpotent-shift L=1"), 4);
  CHECK(n.t[0].value() == 0.0);
  for (int r = 1; r <= 5; ++r) CHECK(n.t[static_cast<std::size_t>(r)].value() == 1.0);
  CHECK(n.u[0].value() == 1.0);

  CHECK_THROWS_AS(closed_form_entry_times(parse("matrix [[-1,0],[0,-1]]"), 3), InvalidArgument);
  CHECK_THROWS_AS(closed_form_entry_times(parse("fractional-integration n=32"), 3), InvalidArgument);
}

TEST_CASE("dense grid examples") {
  OracleResult r = dense_grid_entry_time(make_trajectory(parse("scalar-decay nu=1")), 2, 1e-4);
  CHECK(r.method == Method::DenseGrid);
  CHECK(r.step == 1e-4);
  CHECK(std::abs(r.value.value() - 2.0) <= 1e-4 + 1e-12);

  r = dense_grid_entry_time(make_trajectory(parse("gaussian-shift")), 1, 1e-4);
  CHECK(std::abs(r.value.value() - 2.0) <= 1e-4 + 1e-12);

  const NormTrajectory m = make_trajectory(parse("matrix [[-1,10],[0,-1]]"));
  const OracleResult coarse = dense_grid_entry_time(m, 0, 1e-4, 10.0);
  const OracleResult fine = dense_grid_entry_time(m, 0, 1e-5, 10.0);
  CHECK(coarse.value.value() > 0.0);
  CHECK(std::abs(coarse.value.value() - fine.value.value()) <= 1e-4);

  CHECK(dense_grid_entry_time(make_trajectory(parse("matrix [[0,1],[0,0]]")), 1, 1e-2).value.is_infinite());
  CHECK_THROWS_AS(dense_grid_entry_time(m, 1, 0.0), InvalidArgument);
}

TEST_CASE("spectral abscissa examples") {
  CHECK(spectral_abscissa_triangular(Matrix::diagonal({-1, -3})) == -1.0);
  CHECK(spectral_abscissa_triangular(Matrix{{-1, 10}, {0, -1}}) == -1.0);
  CHECK(spectral_abscissa_triangular(Matrix{{0, 1}, {0, 0}}) == 0.0);
  CHECK(spectral_abscissa_triangular(Matrix{{-2, 0}, {5, -4}}) == -2.0);
  CHECK_THROWS_AS(spectral_abscissa_triangular(Matrix{{1, 2}, {3, 4}}), InvalidArgument);
}

TEST_CASE("closed forms agree with the searched tables") {
  const SearchConfig cfg;
  for (const char* spec : {"scalar-decay nu=1", "scalar-decay nu=2", "gaussian-shift", "nilpotent-shift L=1",
                           "damped-nilpotent nu=1 L=1", "damped-nilpotent nu=2 L=3"}) {
    CAPTURE(spec);
    const SemigroupModel m = parse(spec);
    const EntryTimeTable oracle = closed_form_entry_times(m, 50);
    const EntryTimeTable searched = entry_time_table(make_trajectory(m), 50, cfg);
    double worst = 0.0;
    for (std::size_t r = 0; r <= 50; ++r) {
      worst = std::max(worst, std::abs(oracle.t[r].value() - searched.t[r].value()));
    }
    CHECK(worst <= 2 * cfg.time_tol);
  }
}

TEST_CASE("dense grid brackets the bisected entry times") {
  const SearchConfig cfg;
  constexpr double kStep = 1e-3;
  for (const auto& spec : testing_support::suite_specs()) {
    CAPTURE(spec);
    const NormTrajectory tr = make_trajectory(build_model_from_spec(spec));
    for (int r : {0, 1, 3}) {
      CAPTURE(r);
      const EntryTime e = final_entry_time(tr, r, cfg);
      const double horizon = e.time.is_finite() ? 2.0 * e.time.value() + 5.0 : 20.0;
      const OracleResult d = dense_grid_entry_time(tr, r, kStep, horizon);
      REQUIRE(d.value.is_finite() == e.time.is_finite());
      if (!e.time.is_finite()) continue;
      CHECK(e.time.value() <= d.value.value() + cfg.time_tol);
      CHECK(e.time.value() >= d.value.value() - kStep - cfg.time_tol);
    }
  }
}
