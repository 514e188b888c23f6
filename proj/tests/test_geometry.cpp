#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"

#include "brenier/error.hpp"
#include "brenier/geometry.hpp"
#include "brenier/linalg.hpp"

using namespace brenier;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

std::vector<Scenario> separable_catalog() {
  return {
      Scenario::identity(2),
      Scenario::gaussian_scale({0.5, 2.0, 3.0}),
      Scenario::gaussian_to_uniform_1d(1.0),
      Scenario::gaussian_to_uniform_1d(2.0),
      Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_to_uniform_1d(2.0)}),
      Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_scale({2.0})}),
      Scenario::custom_1d(Potential1d::gaussian(0, 1), Potential1d::quartic(0.2)),
  };
}

std::vector<Vec> sample_points(const Scenario& s, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Vec> pts;
  while (static_cast<int>(pts.size()) < count) {
    Vec x(s.dim());
    for (int i = 0; i < s.dim(); ++i) x(i) = u(rng);
    if (s.in_smooth_region(x)) pts.push_back(x);
  }
  return pts;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Non-separable fixture: Φ = ½|x|² + e^{a·x}, V quartic, composites derived
// from the Monge–Ampère relation.
struct Fixture {
  Jet phi, v;
  TargetComposites comps;
  MetricFrame frame;
};

Fixture ridge_fixture(const Vec& x) {
  Vec a(x.size());
  for (int i = 0; i < x.size(); ++i) a(i) = 0.5 - 0.3 * i;
  Fixture f;
  f.phi = synthetic::exp_ridge_jet(a, x);
  f.v = synthetic::quartic_v_jet(x);
  f.comps = derive_composites(f.phi, f.v, 3);
  f.frame = metric_frame(f.phi);
  return f;
}

}  // namespace

TEST_CASE("metric frame examples") {
  const auto id = metric_frame(jets_phi(Scenario::identity(2), Vec::Constant(2, 0.3), 3));
  CHECK(id.g.isApprox(Mat::Identity(2, 2)));
  CHECK(id.christoffel.max_abs() == 0.0);

  const auto g2u = metric_frame(jets_phi(Scenario::gaussian_to_uniform_1d(1.0), v1(1.0), 3));
  CHECK(g2u.g(0, 0) == doctest::Approx(oracle::normal_pdf(1.0)).epsilon(1e-14));
  CHECK(g2u.christoffel(0, 0, 0) == doctest::Approx(-0.5).epsilon(1e-14));

  const auto sc = metric_frame(jets_phi(Scenario::gaussian_scale({4.0, 4.0}), Vec::Constant(2, 1.0), 3));
  CHECK(sc.g.isApprox(4 * Mat::Identity(2, 2)));
  CHECK(sc.christoffel.max_abs() == 0.0);
  CHECK((sc.g * sc.g_inv - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(metric_frame(jets_phi(Scenario::identity(1), v1(0.0), 2)), Error);
}

TEST_CASE("Christoffel symbols are symmetric and match their definition") {
  Vec x(3);
  x << 0.2, -0.4, 0.9;
  const auto f = ridge_fixture(x);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(f.frame.christoffel(k, i, j) == f.frame.christoffel(k, j, i));
        double expect = 0.0;
        for (int l = 0; l < 3; ++l) expect += 0.5 * f.frame.g_inv(k, l) * f.phi.d3(i, j, l);
        CHECK(f.frame.christoffel(k, i, j) == doctest::Approx(expect).epsilon(1e-13));
      }
}

TEST_CASE("Riemann tensor vanishes on flat and separable scenarios") {
  for (const auto& s : separable_catalog()) {
    for (const auto& x : sample_points(s, 5, 2)) {
      const Jet phi = jets_phi(s, x, 3);
      CHECK(riemann(metric_frame(phi), phi).max_abs() < 1e-14);
    }
  }
}

TEST_CASE("Riemann symmetries on random jets") {
  std::mt19937_64 rng(17);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      Jet phi = Jet::zero(Vec::Zero(d), 3);
      phi.hess = synthetic::random_spd(d, rng);
      phi.d3 = synthetic::random_symmetric(d, 3, rng);
      const auto frame = metric_frame(phi);
      const Tensor r = riemann(frame, phi);
      double worst = 0.0;
      for_each_index(d, 4, [&](std::span<const int> id) {
        const int i = id[0], j = id[1], k = id[2], l = id[3];
        worst = std::max(worst, std::abs(r(i, j, k, l) + r(j, i, k, l)));
        worst = std::max(worst, std::abs(r(i, j, k, l) + r(i, j, l, k)));
        worst = std::max(worst, std::abs(r(i, j, k, l) - r(k, l, i, j)));
      });
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("Ricci routes agree on scenarios") {
  for (const auto& s : separable_catalog()) {
    for (const auto& x : sample_points(s, 100, 3)) {
      const Jet phi = jets_phi(s, x, 3);
      const Jet v = s.source().jet(x, 2);
      const auto comps = target_composites(s, x, 1);
      const auto frame = metric_frame(phi);
      const Mat a = ricci(frame, phi, v, &comps, RicciRoute::kContraction);
      const Mat b = ricci(frame, phi, v, &comps, RicciRoute::kCoordinate);
      CAPTURE(to_string(s.kind()));
      CHECK(max_abs(a - b) <= 1e-10);
    }
  }
}

TEST_CASE("Ricci routes agree on a curved non-separable fixture") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    const auto f = ridge_fixture(x);
    const Mat a = ricci(f.frame, f.phi, f.v, &f.comps, RicciRoute::kContraction);
    const Mat b = ricci(f.frame, f.phi, f.v, &f.comps, RicciRoute::kCoordinate);
    CHECK(max_abs(a - b) <= 1e-10);
    CHECK(max_abs(a - a.transpose()) <= 1e-12);
  }
}

TEST_CASE("Ricci examples") {
  const auto s = Scenario::gaussian_to_uniform_1d(1.0);
  for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    const Jet phi = jets_phi(s, v1(x), 3);
    const auto comps = target_composites(s, v1(x), 1);
    const Mat r = ricci(metric_frame(phi), phi, s.source().jet(v1(x), 2), &comps, RicciRoute::kCoordinate);
    CHECK(std::abs(r(0, 0)) < 1e-12);
  }
  const auto id = Scenario::identity(2);
  const Jet phi = jets_phi(id, Vec::Ones(2), 3);
  CHECK(max_abs(ricci(metric_frame(phi), phi, id.source().jet(Vec::Ones(2), 2), nullptr,
                      RicciRoute::kContraction)) == 0.0);
  CHECK_THROWS_WITH_AS(
      ricci(metric_frame(phi), phi, id.source().jet(Vec::Ones(2), 2), nullptr, RicciRoute::kCoordinate),
      doctest::Contains("MissingComposites"), Error);
}

TEST_CASE("first Ricci term is a non-negative form") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x(i) = 0.5 * n01(rng);
    const auto f = ridge_fixture(x);
    const Mat q = ricci_first_term(f.frame, f.phi);
    for (int k = 0; k < 100; ++k) {
      Vec xi(3);
      for (int i = 0; i < 3; ++i) xi(i) = n01(rng);
      CHECK(xi.dot(q * xi) >= -1e-14);
    }
  }
}

TEST_CASE("Hessian variants") {
  // Flat frame: Euclidean Hessian.
  const auto flat = metric_frame(jets_phi(Scenario::gaussian_scale({2.0, 2.0}), Vec::Ones(2), 3));
  Jet f = Jet::zero(Vec::Ones(2), 2);
  f.grad << 1, 2;
  f.hess << 3, 1, 1, 5;
  CHECK(max_abs(hess_m(f, flat) - f.hess) == 0.0);

  // Linear f sees only the connection.
  const auto s = Scenario::gaussian_to_uniform_1d(1.0);
  const auto frame = metric_frame(jets_phi(s, v1(1.3), 3));
  Jet lin = Jet::zero(v1(1.3), 2);
  lin.grad(0) = 2.0;
  CHECK(hess_m(lin, frame)(0, 0) == doctest::Approx(-frame.christoffel(0, 0, 0) * 2.0));
  CHECK(hess_m(lin, frame)(0, 0) != 0.0);

  // D²_M P on gaussian_to_uniform at x = 2.
  const auto pg = point_geometry(s, v1(2.0));
  CHECK(pg.weights.p_hess_m(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("symmetric Hessian agrees with the coordinate form") {
  for (const auto& s : separable_catalog()) {
    if (s.dim() != 1) continue;
    for (const auto& x : sample_points(s, 20, 6)) {
      const Jet phi = jets_phi(s, x, 3);
      const auto frame = metric_frame(phi);
      const Jet dual = legendre_dual_jets(phi);
      Jet f = Jet::zero(x, 2);
      f.grad(0) = std::cos(x(0));
      f.hess(0, 0) = -std::sin(x(0));
      const Mat a = hess_m(f, frame, HessianVariant::kCoordinate);
      const Mat b = hess_m(f, frame, HessianVariant::kSymmetric, &dual);
      CHECK(std::abs(a(0, 0) - b(0, 0)) <= 1e-9 * (1 + std::abs(a(0, 0))));
    }
  }
  Vec x(2);
  x << 0.3, -0.2;
  const auto fx = ridge_fixture(x);
  const Jet dual = legendre_dual_jets(fx.phi.truncated(3));
  Jet f = Jet::zero(x, 2);
  f.grad << 0.7, -1.1;
  f.hess << 0.4, 0.2, 0.2, -0.9;
  CHECK(max_abs(hess_m(f, fx.frame) - hess_m(f, fx.frame, HessianVariant::kSymmetric, &dual)) < 1e-12);
  CHECK_THROWS_AS(hess_m(f, fx.frame, HessianVariant::kSymmetric), Error);
}

TEST_CASE("Bakry-Emery routes agree") {
  for (const auto& s : separable_catalog()) {
    for (const auto& x : sample_points(s, 100, 12)) {
      const auto pg = point_geometry(s, x);
      const Mat b = bakry_emery(pg.frame, pg.phi, pg.v, &pg.comps, BakryEmeryRoute::kRicciPlusHessian);
      CHECK(max_abs(pg.weights.be - b) <= 1e-10);
    }
  }
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    const auto f = ridge_fixture(x);
    const Mat a = bakry_emery(f.frame, f.phi, f.v, &f.comps, BakryEmeryRoute::kCoordinate);
    const Mat b = bakry_emery(f.frame, f.phi, f.v, &f.comps, BakryEmeryRoute::kRicciPlusHessian);
    CHECK(max_abs(a - b) <= 1e-10);
  }
}

TEST_CASE("Bakry-Emery closed forms") {
  for (double x = -4.0; x <= 4.0; x += 0.25) {
    const auto pg = point_geometry(Scenario::gaussian_to_uniform_1d(1.0), v1(x));
    CHECK(std::abs(pg.weights.be(0, 0) - (0.5 + 0.25 * x * x)) <= 1e-10);
  }
  const auto id = point_geometry(Scenario::identity(3), Vec::Constant(3, 0.7));
  CHECK(max_abs(id.weights.be - Mat::Identity(3, 3)) < 1e-15);
  const auto sc = point_geometry(Scenario::gaussian_scale({0.5, 3.0}), Vec::Constant(2, -1.2));
  CHECK(max_abs(sc.weights.be - Mat::Identity(2, 2)) < 1e-14);
}

TEST_CASE("modified tensor") {
  const auto pg = point_geometry(Scenario::gaussian_to_uniform_1d(1.0), v1(1.0));
  const Mat& be = pg.weights.be;
  CHECK(max_abs(modified_tensor(be, pg.weights.p_grad, INFINITY) - be) == 0.0);
  CHECK(modified_tensor(be, pg.weights.p_grad, 1e12)(0, 0) == doctest::Approx(be(0, 0)));
  // ∇P = x/2, so R_{2,μ} = ½ + x²/4 − x²/4 = ½.
  CHECK(modified_tensor(be, pg.weights.p_grad, 2.0)(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = -INFINITY;
  for (double n : {1.5, 2.0, 3.0, 10.0, 100.0}) {
    const double val = modified_tensor(be, pg.weights.p_grad, n)(0, 0);
    CHECK(val >= prev);
    prev = val;
  }
  CHECK_THROWS_WITH_AS(modified_tensor(be, pg.weights.p_grad, 1.0), doctest::Contains("InvalidN"), Error);
}

TEST_CASE("verify_bounds") {
  const double sigma = 2.5;
  std::vector<Vec> pts;
  for (double x = -2; x <= 2; x += 0.5) pts.push_back(Vec::Constant(2, x));
  const auto rep = verify_bounds(Scenario::gaussian_scale({sigma, sigma}), pts, 0.0, INFINITY);
  CHECK(rep.pass);
  for (const auto& b : rep.points) {
    CHECK(b.thm43_constant == doctest::Approx(1 / sigma));
    CHECK(std::abs(b.thm43_slack) < 1e-12);
  }

  std::vector<Vec> grid;
  for (int k = 0; k <= 32; ++k) grid.push_back(v1(-4.0 + 0.25 * k));
  CHECK(verify_bounds(Scenario::gaussian_to_uniform_1d(1.0), grid, 0.0, 2.0).pass);
  CHECK(verify_bounds(Scenario::identity(2), pts, 1.0, INFINITY).pass);
  CHECK_FALSE(verify_bounds(Scenario::identity(2), pts, 1.1, INFINITY).pass);
  // Finite N subtracts ∇P⊗∇P = xxᵀ/(N − d): only the origin keeps K = 1.
  CHECK(verify_bounds(Scenario::identity(2), {Vec::Zero(2)}, 1.0, 5.0).pass);
  CHECK_FALSE(verify_bounds(Scenario::identity(2), {Vec::Ones(2)}, 1.0, 5.0).pass);
  const auto csv = rep.to_csv();
  CHECK(csv.rfind("point,min_eig_be,min_eig_modified,slack\n", 0) == 0);
  CHECK(rep.to_json()["points"].size() == pts.size());
}

TEST_CASE("Theorem 1.1 across the catalog") {
  for (const auto& s : separable_catalog()) {
    for (const auto& x : sample_points(s, 50, 30)) {
      CHECK(linalg::min_eigenvalue(point_geometry(s, x).weights.be) >= -1e-10);
    }
  }
}

TEST_CASE("CD(0, 2d) on uniform targets") {
  const auto s = Scenario::product({Scenario::gaussian_to_uniform_1d(1.0), Scenario::gaussian_to_uniform_1d(3.0)});
  for (const auto& x : sample_points(s, 50, 31)) {
    const auto pg = point_geometry(s, x);
    const Mat r = modified_tensor(pg.weights.be, pg.weights.p_grad, 4.0);
    CHECK(linalg::min_eigenvalue(r) >= -1e-10);
  }
}
