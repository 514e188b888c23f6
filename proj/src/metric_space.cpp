#include "brenier/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "brenier/error.hpp"
#include "brenier/io.hpp"
#include "brenier/linalg.hpp"
#include "brenier/quadrature.hpp"
#include "brenier/seed.hpp"

namespace brenier {
namespace {

double segment_length(const Scenario& s, const Vec& a, const Vec& b) {
  const Vec v = b - a;
  if (v.squaredNorm() == 0.0) throw Error(ErrorCode::kInvalidArgument, "consecutive polyline nodes coincide");
  return quad::gauss_legendre5(
      [&](double t) {
        const Mat g = s.phi_derivatives(a + t * v, 2).hess;
        return std::sqrt(v.dot(g * v));
      },
      0.0, 1.0);
}

double metric_speed_1d(const Scenario& s, double t) {
  return std::sqrt(s.factors().front()->derivs(t, 2)[2]);
}

// Largest b ≤ hi with f(b) ≤ 0 for an increasing f with f(lo) ≤ 0.
double solve_increasing(const std::function<double(double)>& f, double lo, double hi) {
  const double f_hi = f(hi);
  if (f_hi <= 0) return hi;
  const double f_lo = f(lo);
  if (f_lo >= 0) return lo;
  std::uintmax_t iters = 200;
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

void require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw Error(ErrorCode::kSeedRequired, "a master seed is required for Monte Carlo operations");
}

Vec sample_smooth(const Scenario& s, std::mt19937_64& rng) {
  for (;;) {
    Vec x = s.sample_source(rng);
    if (s.in_smooth_region(x)) return x;
  }
}

nlohmann::json doubles(const std::vector<double>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(x);
  return j;
}

}  // namespace

Polyline Polyline::segment(const Vec& x, const Vec& y, int count) {
  if (count < 2) throw Error(ErrorCode::kInvalidArgument, "a polyline needs at least two nodes");
  Polyline p;
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / (count - 1);
    p.nodes.push_back((1.0 - t) * x + t * y);
  }
  p.nodes.back() = y;
  return p;
}

Polyline Polyline::concat(const Polyline& a, const Polyline& b) {
  Polyline p = a;
  p.nodes.insert(p.nodes.end(), b.nodes.begin() + 1, b.nodes.end());
  return p;
}

double path_length(const Polyline& p, const Scenario& s) {
  if (p.nodes.size() < 2) throw Error(ErrorCode::kInvalidArgument, "a polyline needs at least two nodes");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k) sum += segment_length(s, p.nodes[k], p.nodes[k + 1]);
  return sum;
}

GeodesicResult geodesic_upper(const Scenario& s, const Vec& x, const Vec& y, int nodes, int iters,
                              const Polyline* init) {
  if ((x - y).squaredNorm() == 0.0) throw Error(ErrorCode::kDomainError, "geodesic endpoints coincide");
  if (!s.in_smooth_region(x) || !s.in_smooth_region(y)) {
    throw Error(ErrorCode::kDomainError, "geodesic endpoints outside the smooth region");
  }
  GeodesicResult out;
  out.path = init ? *init : Polyline::segment(x, y, nodes);
  auto& pts = out.path.nodes;
  const int n = static_cast<int>(pts.size());
  if (n < 2 || (pts.front() - x).squaredNorm() > 0.0 || (pts.back() - y).squaredNorm() > 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "initial polyline must run from x to y");
  }
  std::vector<double> seg(n - 1);
  for (int k = 0; k + 1 < n; ++k) seg[k] = segment_length(s, pts[k], pts[k + 1]);
  out.initial_length = std::accumulate(seg.begin(), seg.end(), 0.0);

  const int d = s.dim();
  std::vector<double> step(n, 0.25 * (y - x).norm() / std::max(1, n - 1));
  const double floor = 1e-12 * (1.0 + (y - x).norm());
  for (int it = 0; it < iters; ++it) {
    bool active = false;
    for (int k = 1; k + 1 < n; ++k) {
      if (step[k] < floor) continue;
      active = true;
      bool moved = false;
      for (int c = 0; c < d && !moved; ++c)
        for (double sign : {1.0, -1.0}) {
          Vec trial = pts[k];
          trial(c) += sign * step[k];
          double left = 0, right = 0;
          try {
            if (!s.in_smooth_region(trial)) continue;
            left = segment_length(s, pts[k - 1], trial);
            right = segment_length(s, trial, pts[k + 1]);
          } catch (const Error& e) {
            if (e.code() == ErrorCode::kDomainError || e.code() == ErrorCode::kInvalidArgument) continue;
            throw;
          }
          // Strict decrease beyond rounding, so flat metrics keep the segment.
          if (left + right < (seg[k - 1] + seg[k]) * (1.0 - 1e-14)) {
            pts[k] = trial;
            seg[k - 1] = left;
            seg[k] = right;
            ++out.accepted;
            moved = true;
            break;
          }
        }
      if (!moved) step[k] *= 0.5;
    }
    if (!active) break;
  }
  out.length = std::accumulate(seg.begin(), seg.end(), 0.0);
  return out;
}

double distance_1d(const Scenario& s, double x, double y, double tol) {
  if (s.dim() != 1) throw Error(ErrorCode::kInvalidArgument, "distance_1d needs a one-dimensional scenario");
  if (x == y) return 0.0;
  const double lo = std::min(x, y), hi = std::max(x, y);
  if (!s.in_smooth_region(Vec::Constant(1, lo)) || !s.in_smooth_region(Vec::Constant(1, hi))) {
    throw Error(ErrorCode::kDomainError, "distance_1d endpoints outside the smooth region");
  }
  quad::Options opts;
  opts.abs_tol = tol;
  return quad::adaptive([&](double t) { return metric_speed_1d(s, t); }, lo, hi, opts).value;
}

LemmaChain lemma_contraction_check(const Scenario& s, const Vec& x, const Vec& y) {
  LemmaChain c;
  const Vec dx = y - x;
  const Vec dg = s.transport(y) - s.transport(x);
  c.mid = dg.dot(dx);
  c.rhs = dx.norm() * dg.norm();
  if (dx.squaredNorm() == 0.0) {
    c.pass = true;
    c.exact = true;
    return c;
  }
  if (s.dim() == 1) {
    const double dist = distance_1d(s, x(0), y(0), 1e-13);
    c.dm2 = dist * dist;
    c.exact = true;
  } else {
    const double len = path_length(Polyline::segment(x, y, 33), s);
    c.dm2 = len * len;
  }
  c.pass = c.dm2 <= c.mid + 1e-9 && c.mid <= c.rhs + 1e-12;
  return c;
}

ConcentrationReport concentration_profile(const Scenario& s, const HalfSpace& a, const std::vector<double>& h_grid,
                                          int samples, std::optional<std::uint64_t> seed) {
  require_seed(seed);
  if (a.u.size() != s.dim() || a.u.norm() == 0.0) throw Error(ErrorCode::kInvalidArgument, "bad half-space normal");
  if (a.c < 0) throw Error(ErrorCode::kInvalidArgument, "half-space must satisfy μ(A) ≥ ½ (c ≥ 0)");
  if (samples <= 0) throw Error(ErrorCode::kInvalidArgument, "samples must be positive");
  const double diam = s.target_diameter();
  if (!std::isfinite(diam)) throw Error(ErrorCode::kInvalidArgument, "target support must be bounded");

  ConcentrationReport rep;
  rep.a = a;
  rep.a.u = a.u.normalized();
  rep.h_grid = h_grid;
  rep.sample_count = samples;
  rep.seed = *seed;
  rep.diameter = diam;

  auto rng = stream(*seed, "concentration/" + s.descriptor().dump());
  std::vector<double> bound(samples);
  for (int k = 0; k < samples; ++k) {
    const Vec x = sample_smooth(s, rng);
    const double depth = x.dot(rep.a.u) - a.c;
    if (depth <= 0) {
      bound[k] = 0.0;
      continue;
    }
    const Vec proj = x - depth * rep.a.u;
    double u = std::sqrt(depth * diam);
    try {
      if (s.dim() == 1) {
        u = distance_1d(s, proj(0), x(0));
      } else {
        u = std::min(u, std::sqrt(depth * (s.transport(x) - s.transport(proj)).norm()));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomainError) throw;
    }
    bound[k] = u;
  }
  std::sort(bound.begin(), bound.end());
  rep.pass = true;
  for (double h : h_grid) {
    const auto count = std::upper_bound(bound.begin(), bound.end(), h) - bound.begin();
    const double mass = static_cast<double>(count) / samples;
    const double q = h * h / diam;
    const double paper = 1.0 - std::exp(-0.5 * q * q);
    rep.empirical_mass.push_back(mass);
    rep.paper_bound.push_back(paper);
    rep.pass = rep.pass && mass >= paper;
  }
  return rep;
}

nlohmann::json ConcentrationReport::to_json() const {
  return {{"halfspace", {{"u", io::to_json(a.u)}, {"c", a.c}}},
          {"diameter", diameter},
          {"samples", sample_count},
          {"seed", seed},
          {"h", doubles(h_grid)},
          {"empirical", doubles(empirical_mass)},
          {"bound", doubles(paper_bound)},
          {"pass", pass}};
}

std::string ConcentrationReport::to_csv() const {
  std::string out = "h,empirical,bound\n";
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    out += io::fmt(h_grid[k]) + "," + io::fmt(empirical_mass[k]) + "," + io::fmt(paper_bound[k]) + "\n";
  }
  return out;
}

double km_combination(const std::function<double(double)>& k_mu, const std::function<double(double)>& k_nu,
                      double h, double scale) {
  if (!(scale > 0)) throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  std::vector<double> ts;
  for (int k = 0; k < 64; ++k) ts.push_back(scale * std::pow(10.0, -3.0 + 6.0 * k / 63.0));
  ts.push_back(scale);
  double best = kInf;
  for (double t : ts) best = std::min(best, std::exp(-k_mu(h * h / t)) + std::exp(-k_nu(t)));
  return std::max(0.0, -std::log(best));
}

BishopGromovProfile bishop_gromov_profile(const Scenario& s, const Vec& x0, const std::vector<double>& r_grid,
                                          double tolerance) {
  const int d = s.dim();
  if (x0.size() != d) throw Error(ErrorCode::kInvalidArgument, "x0 dimension mismatch");
  BishopGromovProfile p;
  p.x0 = x0;
  p.exponent = 2 * d;

  std::function<double(double)> ball_mass;
  if (d == 1 && s.separable()) {
    const Potential1d& src = s.source().factors().front();
    const Interval w = src.window();
    double lo = std::max(w.lo, -8.0), hi = std::min(w.hi, 8.0);
    while (!s.in_smooth_region(Vec::Constant(1, lo))) lo = 0.5 * (lo + x0(0));
    while (!s.in_smooth_region(Vec::Constant(1, hi))) hi = 0.5 * (hi + x0(0));
    const double c = x0(0);
    if (!(lo < c && c < hi)) throw Error(ErrorCode::kDomainError, "x0 outside the smooth region");
    ball_mass = [&s, &src, lo, hi, c](double r) {
      const double b = solve_increasing([&](double t) { return distance_1d(s, c, t, 1e-13) - r; }, c, hi);
      const double a = -solve_increasing([&](double t) { return distance_1d(s, -t, c, 1e-13) - r; }, -c, -lo);
      quad::Options opts;
      opts.abs_tol = 1e-13;
      return quad::adaptive([&](double t) { return std::exp(-src.derivs(t, 0)[0]); }, a, b, opts).value;
    };
  } else if (s.kind() == ScenarioKind::kRadialGaussianToBall) {
    if (x0.norm() != 0.0) throw Error(ErrorCode::kInvalidArgument, "radial balls are centred at the origin");
    const double h = 0.5 * d;
    const double r_max = std::sqrt(2.0 * boost::math::gamma_q_inv(h, 1e-13));
    ball_mass = [&s, d, h, r_max](double r) {
      Vec e = Vec::Zero(d);
      const auto speed = [&](double t) {
        e(0) = t;
        return std::sqrt(s.phi_derivatives(e, 2).hess(0, 0));
      };
      quad::Options opts;
      opts.abs_tol = 1e-11 * r;
      const double rad = solve_increasing(
          [&](double big) { return quad::adaptive(speed, 0.0, big, opts).value - r; }, 0.0, r_max);
      return boost::math::gamma_p(h, 0.5 * rad * rad);
    };
  } else {
    throw Error(ErrorCode::kInvalidArgument, "exact balls need a 1D or radial scenario");
  }

  for (double r : r_grid) {
    if (!(r > 0)) throw Error(ErrorCode::kInvalidArgument, "radii must be positive");
    const double m = ball_mass(r);
    p.r.push_back(r);
    p.mass.push_back(m);
    p.profile.push_back(m / std::pow(r, p.exponent));
    p.density.push_back(m / std::pow(r, d));
  }
  for (std::size_t k = 1; k < p.profile.size(); ++k) {
    if (p.r[k] > p.r[k - 1]) p.max_violation = std::max(p.max_violation, p.profile[k] - p.profile[k - 1]);
  }
  p.pass = p.max_violation <= tolerance;
  return p;
}

nlohmann::json BishopGromovProfile::to_json() const {
  return {{"x0", io::to_json(x0)}, {"exponent", exponent},   {"r", doubles(r)},
          {"mass", doubles(mass)}, {"profile", doubles(profile)}, {"density", doubles(density)},
          {"max_violation", max_violation}, {"pass", pass}};
}

std::string BishopGromovProfile::to_csv() const {
  std::string out = "r,profile\n";
  for (std::size_t k = 0; k < r.size(); ++k) out += io::fmt(r[k]) + "," + io::fmt(profile[k]) + "\n";
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::kInvalidArgument, "slope fit needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = std::log(x[k]) - mx;
    sxy += u * (std::log(y[k]) - my);
    sxx += u * u;
  }
  return sxy / sxx;
}

Scenario diameter_scenario(DiameterFamily family, int d, double diameter) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (d == 1) return Scenario::gaussian_to_uniform_1d(diameter);
  if (family == DiameterFamily::kRadial) return Scenario::radial_gaussian_to_ball(d, diameter);
  const Scenario side = Scenario::gaussian_to_uniform_1d(diameter / std::sqrt(static_cast<double>(d)));
  return Scenario::product(std::vector<Scenario>(d, side));
}

namespace {

double pair_bound_percentile(const Scenario& s, int samples, std::uint64_t seed) {
  // The stream ignores D, so D sweeps reuse the same source samples.
  auto rng = stream(seed, "diameter/" + to_string(s.kind()) + "/" + std::to_string(s.dim()));
  std::vector<double> u(samples);
  for (int k = 0; k < samples; ++k) {
    const Vec x = sample_smooth(s, rng);
    const Vec y = sample_smooth(s, rng);
    u[k] = std::sqrt((x - y).norm() * (s.transport(x) - s.transport(y)).norm());
  }
  const auto idx = static_cast<std::size_t>(std::ceil(0.999 * samples)) - 1;
  std::nth_element(u.begin(), u.begin() + idx, u.end());
  return u[idx];
}

}  // namespace

DiameterReport diameter_experiment(const std::vector<int>& dims, double diameter, int samples,
                                   std::optional<std::uint64_t> seed, DiameterFamily family,
                                   const std::vector<double>& d_values) {
  require_seed(seed);
  if (dims.empty() || samples <= 0 || !(diameter > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "diameter experiment needs dims, samples and D > 0");
  }
  DiameterReport rep;
  rep.family = family;
  rep.diameter = diameter;
  rep.dims = dims;
  rep.samples = samples;
  rep.seed = *seed;
  std::vector<double> dd;
  for (int d : dims) {
    rep.estimates.push_back(pair_bound_percentile(diameter_scenario(family, d, diameter), samples, *seed));
    dd.push_back(d);
  }
  if (dims.size() >= 2) rep.d_exponent = loglog_slope(dd, rep.estimates);
  rep.d_values = d_values;
  for (double dv : d_values) {
    rep.d_estimates.push_back(pair_bound_percentile(diameter_scenario(family, dims.front(), dv), samples, *seed));
  }
  if (d_values.size() >= 2) rep.diameter_exponent = loglog_slope(d_values, rep.d_estimates);
  rep.exact_1d = distance_1d(Scenario::gaussian_to_uniform_1d(diameter), -8.0, 8.0, 1e-12);
  return rep;
}

nlohmann::json DiameterReport::to_json() const {
  return {{"family", family == DiameterFamily::kRadial ? "radial" : "product"},
          {"D", diameter},
          {"dims", dims},
          {"estimates", doubles(estimates)},
          {"d_exponent", d_exponent},
          {"D_values", doubles(d_values)},
          {"D_estimates", doubles(d_estimates)},
          {"D_exponent", diameter_exponent},
          {"exact_1d_diameter", exact_1d},
          {"samples", samples},
          {"seed", seed},
          {"percentile", 99.9}};
}

std::string DiameterReport::to_csv() const {
  std::string out = "d,estimate\n";
  for (std::size_t k = 0; k < dims.size(); ++k) out += std::to_string(dims[k]) + "," + io::fmt(estimates[k]) + "\n";
  return out;
}

CompletenessReport completeness_check(const Scenario& s, const std::vector<Vec>& grid) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "completeness grid is empty");
  CompletenessReport r;
  r.full_support = s.source().support().kind == SupportBox::Kind::kAllSpace &&
                   s.target().support().kind == SupportBox::Kind::kAllSpace;
  r.inf_eig_g = kInf;
  r.inf_eig_hess_v = kInf;
  for (const Vec& x : grid) {
    r.inf_eig_g = std::min(r.inf_eig_g, linalg::min_eigenvalue(s.phi_derivatives(x, 2).hess));
    r.inf_eig_hess_v = std::min(r.inf_eig_hess_v, linalg::min_eigenvalue(s.source().jet(x, 2).hess));
    if (r.full_support) {
      const Mat w2 = s.target().jet(s.transport(x), 2).hess;
      r.sup_norm_hess_w = std::max(r.sup_norm_hess_w, linalg::symmetric_eigenvalues(w2).cwiseAbs().maxCoeff());
    }
  }
  r.epsilon = std::sqrt(std::max(0.0, r.inf_eig_g));
  const bool lemma = r.full_support && r.inf_eig_hess_v > 0 && r.sup_norm_hess_w > 0;
  if (lemma) r.lemma_epsilon = std::pow(r.inf_eig_hess_v / r.sup_norm_hess_w, 0.25);
  r.verdict = lemma && r.epsilon > 0 ? "complete-on-region" : "not-established";
  return r;
}

nlohmann::json CompletenessReport::to_json() const {
  return {{"inf_eig_g", inf_eig_g},
          {"epsilon", epsilon},
          {"full_support", full_support},
          {"inf_eig_hess_v", inf_eig_hess_v},
          {"sup_norm_hess_w", sup_norm_hess_w},
          {"lemma_epsilon", lemma_epsilon},
          {"verdict", verdict}};
}

}  // namespace brenier
