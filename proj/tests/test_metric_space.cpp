#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "brenier/error.hpp"
#include "brenier/metric_space.hpp"
#include "brenier/seed.hpp"

using namespace brenier;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }
Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// ∫_a^b √φ(t) dt = (2π)^{−1/4}·√π·[erf(b/2) − erf(a/2)]
double sqrt_pdf_integral(double a, double b) {
  return std::pow(2 * M_PI, -0.25) * std::sqrt(M_PI) * (std::erf(0.5 * b) - std::erf(0.5 * a));
}

}  // namespace

TEST_CASE("seed derivation is stable and label dependent") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
}

TEST_CASE("path lengths") {
  const auto flat = Scenario::gaussian_scale({3.0, 3.0});
  const Vec x = v2(0.1, -0.4), y = v2(1.2, 0.9);
  CHECK(path_length(Polyline::segment(x, y), flat) == doctest::Approx(std::sqrt(3.0) * (x - y).norm()).epsilon(1e-13));

  const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
  CHECK(path_length(Polyline::segment(v1(0), v1(1)), g2u) == doctest::Approx(0.582707).epsilon(1e-6));
  CHECK(path_length(Polyline::segment(v1(0), v1(1)), g2u) == doctest::Approx(sqrt_pdf_integral(0, 1)).epsilon(1e-9));
  CHECK_THROWS_AS(path_length(Polyline{{v1(0.5), v1(0.5)}}, g2u), Error);
  CHECK_THROWS_AS(path_length(Polyline::segment(v1(0), v1(9)), g2u), Error);
}

TEST_CASE("exact one-dimensional distance") {
  const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
  CHECK(distance_1d(g2u, -8, 8) == doctest::Approx(sqrt_pdf_integral(-8, 8)).epsilon(1e-10));
  CHECK(distance_1d(g2u, -8, 8, 1e-12) == doctest::Approx(sqrt_pdf_integral(-8, 8)).epsilon(1e-11));
  CHECK(distance_1d(g2u, 0.3, 0.3) == 0.0);
  CHECK(distance_1d(g2u, 1.0, -0.5) == doctest::Approx(sqrt_pdf_integral(-0.5, 1.0)).epsilon(1e-10));
  const auto gs = Scenario::gaussian_scale({2.5});
  CHECK(distance_1d(gs, 0, 2) == doctest::Approx(2 * std::sqrt(2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(distance_1d(Scenario::identity(2), 0, 1), Error);
}

TEST_CASE("geodesic upper bounds") {
  SUBCASE("flat metric keeps the segment") {
    const auto flat = Scenario::gaussian_scale({2.0, 2.0});
    const Vec x = v2(-1, 0.5), y = v2(1.5, -0.3);
    const auto r = geodesic_upper(flat, x, y, 8, 50);
    CHECK(r.length == doctest::Approx(std::sqrt(2.0) * (x - y).norm()).epsilon(1e-12));
    CHECK(r.accepted == 0);
  }
  SUBCASE("one dimension matches the exact distance") {
    const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
    const auto r = geodesic_upper(g2u, v1(-1.2), v1(2.0), 16, 100);
    CHECK(std::abs(r.length - distance_1d(g2u, -1.2, 2.0)) <= 1e-6);
  }
  SUBCASE("product scenario never exceeds the straight path") {
    const auto p = Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_to_uniform_1d(2.0)});
    const Vec x = v2(-2.0, 1.5), y = v2(2.0, -1.0);
    const auto r = geodesic_upper(p, x, y, 32, 500);
    const double straight = path_length(Polyline::segment(x, y, 32), p);
    CHECK(r.length <= straight + 1e-12);
    CHECK(r.length < straight);  // the metric decays off the axes, so bending helps
    CHECK(r.length == doctest::Approx(path_length(r.path, p)).epsilon(1e-12));
  }
  SUBCASE("triangle inequality with concatenated initialization") {
    const auto p = Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_to_uniform_1d(1.0)});
    const Vec x = v2(-1.5, 0.2), y = v2(0.3, 1.1), z = v2(1.4, -0.8);
    const auto xy = geodesic_upper(p, x, y, 12, 100);
    const auto yz = geodesic_upper(p, y, z, 12, 100);
    const Polyline joined = Polyline::concat(xy.path, yz.path);
    const auto xz = geodesic_upper(p, x, z, 0, 100, &joined);
    CHECK(xz.length <= xy.length + yz.length + 1e-8);
  }
  CHECK_THROWS_AS(geodesic_upper(Scenario::identity(2), v2(0, 0), v2(0, 0), 4, 1), Error);
}

TEST_CASE("Lemma 5.1 chain") {
  const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
  const auto c = lemma_contraction_check(g2u, v1(0), v1(1));
  CHECK(c.dm2 == doctest::Approx(std::pow(sqrt_pdf_integral(0, 1), 2)).epsilon(1e-12));
  CHECK(c.mid == doctest::Approx(oracle::normal_cdf(1.0) - 0.5).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(0.34134).epsilon(1e-4));
  CHECK(c.pass);

  const auto gs = Scenario::gaussian_scale({1.7});
  const auto e = lemma_contraction_check(gs, v1(-0.4), v1(1.1));
  CHECK(e.dm2 == doctest::Approx(1.7 * 1.5 * 1.5).epsilon(1e-12));
  CHECK(e.mid == doctest::Approx(e.dm2).epsilon(1e-12));
  CHECK(e.rhs == doctest::Approx(e.dm2).epsilon(1e-12));
  const auto z = lemma_contraction_check(g2u, v1(0.2), v1(0.2));
  CHECK(z.dm2 == 0.0);
  CHECK(z.pass);

  const std::vector<Scenario> cases = {
      g2u,
      Scenario::gaussian_scale({0.5, 2.0}),
      Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_to_uniform_1d(2.0)}),
      Scenario::radial_gaussian_to_ball(3, 1.0),
  };
  for (const auto& s : cases) {
    std::mt19937_64 rng(derive_seed(5, "lemma-test"));
    double worst = kInf;
    for (int k = 0; k < 1000; ++k) {
      const Vec x = s.sample_source(rng), y = s.sample_source(rng);
      if (!s.in_smooth_region(x) || !s.in_smooth_region(y)) continue;
      worst = std::min(worst, lemma_contraction_check(s, x, y).slack());
    }
    CAPTURE(s.descriptor().dump());
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("concentration profile") {
  std::vector<double> grid;
  for (int k = 0; k < 16; ++k) grid.push_back(0.1 + 1.9 * k / 15.0);
  const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
  const auto rep = concentration_profile(g2u, {v1(1.0), 0.0}, {1.0}, 100000, 11);
  CHECK(rep.paper_bound[0] == doctest::Approx(1 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(rep.empirical_mass[0] >= 0.84);
  CHECK(rep.pass);

  const auto radial = Scenario::radial_gaussian_to_ball(3, 1.0);
  const auto r3 = concentration_profile(radial, {Vec::Unit(3, 0), 0.0}, {0.8}, 20000, 3);
  CHECK(r3.paper_bound[0] == doctest::Approx(0.1853).epsilon(1e-3));
  CHECK(r3.pass);

  const auto full = concentration_profile(radial, {Vec::Ones(3), 0.5}, grid, 20000, 3);
  CHECK(full.pass);
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(full.empirical_mass[k] >= full.empirical_mass[k - 1]);
  const auto again = concentration_profile(radial, {Vec::Ones(3), 0.5}, grid, 20000, 3);
  CHECK(again.to_csv() == full.to_csv());
  CHECK(concentration_profile(radial, {Vec::Ones(3), 0.5}, {100.0}, 1000, 1).empirical_mass[0] == 1.0);

  try {
    concentration_profile(g2u, {v1(1.0), 0.0}, grid, 10, std::nullopt);
    FAIL("expected SeedRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSeedRequired);
  }
}

TEST_CASE("combination of concentration functions") {
  const auto k_mu = [](double r) { return 0.5 * r * r; };
  const auto step = [](double t) { return t >= 1.0 ? kInf : 0.0; };
  CHECK(km_combination(k_mu, step, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(km_combination(k_mu, step, 0.0, 1.0) == doctest::Approx(0.0));
  for (double h : {0.7, 1.3, 2.0}) CHECK(km_combination(k_mu, step, h, 1.0) == doctest::Approx(k_mu(h * h)));
  const auto step3 = [](double t) { return t >= 3.0 ? kInf : 0.0; };
  CHECK(km_combination(k_mu, step3, 2.0, 3.0) == doctest::Approx(k_mu(4.0 / 3.0)));
}

TEST_CASE("Bishop-Gromov profiles") {
  std::vector<double> grid;
  for (int k = 0; k < 32; ++k) grid.push_back(0.1 + 2.1 * k / 31.0);
  const auto g2u = Scenario::gaussian_to_uniform_1d(1.0);
  const auto p = bishop_gromov_profile(g2u, v1(0.0), grid);
  CHECK(p.pass);
  CHECK(p.max_violation <= 1e-8);
  CHECK(p.exponent == 2);
  const auto off = bishop_gromov_profile(g2u, v1(0.7), grid);
  CHECK(off.pass);

  const double sigma = 2.0;
  const auto gs = Scenario::gaussian_scale({sigma});
  const auto q = bishop_gromov_profile(gs, v1(0.0), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k];
    CHECK(q.profile[k] == doctest::Approx((2 * oracle::normal_cdf(r / std::sqrt(sigma)) - 1) / (r * r)).epsilon(1e-9));
  }
  CHECK(q.pass);

  // μ(B_r)/r → 2·p(0)/√Φ''(0) as r → 0.
  const auto small = bishop_gromov_profile(g2u, v1(0.0), {1e-3});
  const double p0 = oracle::normal_pdf(0.0);
  CHECK(small.density[0] == doctest::Approx(2 * p0 / std::sqrt(p0)).epsilon(1e-5));

  const auto radial = Scenario::radial_gaussian_to_ball(3, 1.0);
  std::vector<double> rg;
  for (int k = 0; k < 12; ++k) rg.push_back(0.05 + 0.1 * k);
  const auto rp = bishop_gromov_profile(radial, Vec::Zero(3), rg);
  CHECK(rp.exponent == 6);
  CHECK(rp.pass);
  CHECK_THROWS_AS(bishop_gromov_profile(radial, Vec::Ones(3), rg), Error);
  CHECK_THROWS_AS(bishop_gromov_profile(Scenario::identity(2), Vec::Zero(2), rg), Error);
}

TEST_CASE("diameter experiment") {
  const auto rep = diameter_experiment({1, 2, 4}, 1.0, 20000, 42);
  CHECK(rep.exact_1d == doctest::Approx(sqrt_pdf_integral(-8, 8)).epsilon(1e-10));
  CHECK(rep.diameter_exponent == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.estimates[0] <= rep.exact_1d);
  const auto again = diameter_experiment({1, 2, 4}, 1.0, 20000, 42);
  CHECK(again.to_json().dump() == rep.to_json().dump());
  CHECK_THROWS_AS(diameter_experiment({1}, 1.0, 10, std::nullopt), Error);
  CHECK(loglog_slope({1, 2, 4}, {3, 3 * std::sqrt(2.0), 6}) == doctest::Approx(0.5));
}

TEST_CASE("completeness check") {
  std::vector<Vec> grid1;
  for (int k = 0; k <= 16; ++k) grid1.push_back(v1(-4 + 0.5 * k));
  const auto gs = completeness_check(Scenario::gaussian_scale({0.5}), grid1);
  CHECK(gs.inf_eig_g == doctest::Approx(0.5));
  CHECK(gs.verdict == "complete-on-region");
  CHECK(gs.lemma_epsilon == doctest::Approx(std::sqrt(0.5)));
  CHECK(gs.epsilon == doctest::Approx(std::sqrt(0.5)));

  const auto g2u = completeness_check(Scenario::gaussian_to_uniform_1d(1.0), grid1);
  CHECK(g2u.verdict == "not-established");
  CHECK(g2u.inf_eig_g == doctest::Approx(oracle::normal_pdf(4.0)));

  std::vector<Vec> grid2;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) grid2.push_back(v2(i, j));
  const auto id = completeness_check(Scenario::identity(2), grid2);
  CHECK(id.verdict == "complete-on-region");
  CHECK(id.epsilon == doctest::Approx(1.0));
}
