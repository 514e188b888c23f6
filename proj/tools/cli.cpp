#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "brenier/calabi.hpp"
#include "brenier/diffusion.hpp"
#include "brenier/error.hpp"
#include "brenier/geometry.hpp"
#include "brenier/integral_estimates.hpp"
#include "brenier/io.hpp"
#include "brenier/linalg.hpp"
#include "brenier/metric_space.hpp"
#include "brenier/scenario.hpp"

namespace brenier::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string scenario;
  std::string scenario_file;
  double diameter = 1.0;
  int dim = 1;
  bool dim_given = false;
  std::string sigma = "1";
  std::string grid;
  std::string x;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int samples = 100000;
  std::string dims = "1,2,4,8,16";
  std::string out;
  std::string n = "inf";
  double k = 0.0;
  double tol = 1e-10;
  double fd_tol = 1e-4;
  std::string family = "radial";
  std::string p = "2";
  std::string d_values = "0.5,1,2";
  std::string u;
  double c = 0.0;
  double radius = 1.5;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError(std::string("malformed ") + what + " '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

/// lo:hi:count with inclusive endpoints.
std::vector<double> parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("grid must be lo:hi:count, got '" + text + "'");
  const double lo = parse_list(parts[0], "grid bound")[0];
  const double hi = parse_list(parts[1], "grid bound")[0];
  const double count = parse_list(parts[2], "grid count")[0];
  if (count < 1 || count != std::floor(count) || hi < lo || (count == 1 && hi != lo)) {
    throw UsageError("grid needs lo <= hi and a positive integer count, got '" + text + "'");
  }
  const int n = static_cast<int>(count);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

Vec parse_point(const std::string& text, int dim) {
  const auto v = parse_list(text, "point");
  if (static_cast<int>(v.size()) != dim) {
    throw UsageError("point '" + text + "' has " + std::to_string(v.size()) + " coordinates, scenario has " +
                     std::to_string(dim));
  }
  return Eigen::Map<const Vec>(v.data(), dim);
}

double parse_n(const std::string& text) {
  if (text == "inf") return kInf;
  return parse_list(text, "N")[0];
}

Scenario build_scenario(const Config& c) {
  if (!c.scenario_file.empty()) {
    std::ifstream in(c.scenario_file);
    if (!in) throw UsageError("cannot read scenario file '" + c.scenario_file + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("scenario file is not valid JSON: " + std::string(e.what()));
    }
    return Scenario::from_json(j);
  }
  const std::string& name = c.scenario;
  if (name.empty()) throw UsageError("--scenario or --scenario-file is required");
  if (!(c.diameter > 0)) throw UsageError("--D must be positive");
  if (c.dim < 1) throw UsageError("--dim must be positive");
  if (name == "identity") return Scenario::identity(c.dim);
  if (name == "gaussian_scale") {
    auto sigma = parse_list(c.sigma, "sigma");
    if (sigma.size() == 1) sigma.assign(c.dim, sigma[0]);
    if (c.dim_given && static_cast<int>(sigma.size()) != c.dim) throw UsageError("--sigma length differs from --dim");
    for (double v : sigma)
      if (!(v > 0)) throw UsageError("--sigma entries must be positive");
    return Scenario::gaussian_scale(sigma);
  }
  if (name == "gaussian_to_uniform_1d") {
    if (c.dim != 1) throw UsageError("gaussian_to_uniform_1d is one-dimensional");
    return Scenario::gaussian_to_uniform_1d(c.diameter);
  }
  if (name == "product") return diameter_scenario(DiameterFamily::kProduct, c.dim, c.diameter);
  if (name == "radial" || name == "radial_gaussian_to_ball") return Scenario::radial_gaussian_to_ball(c.dim, c.diameter);
  if (name == "custom_1d") {
    if (c.dim != 1) throw UsageError("custom_1d is one-dimensional");
    return Scenario::custom_1d(Potential1d::gaussian(0, 1), Potential1d::quartic(0.1));
  }
  throw UsageError("unknown scenario '" + name + "'");
}

std::vector<Vec> grid_points(const Config& c, const Scenario& s, const char* fallback_1d) {
  const int d = s.dim();
  const std::string spec = !c.grid.empty() ? c.grid : (d == 1 ? fallback_1d : (d == 2 ? "-2:2:9" : "-1:1:3"));
  const auto axis = parse_grid(spec);
  std::vector<Vec> pts;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = axis[idx[i]];
    if (s.in_smooth_region(x)) pts.push_back(x);
    int i = 0;
    while (i < d && ++idx[i] == static_cast<int>(axis.size())) idx[i++] = 0;
    if (i == d) break;
  }
  if (pts.empty()) throw UsageError("no grid point lies in the smooth region");
  return pts;
}

json envelope(const std::string& command, const Scenario* s, const Config& c, bool stochastic) {
  json j;
  j["artifact"] = "brenier";
  j["version"] = BRENIER_VERSION;
  j["command"] = command;
  j["scenario"] = s ? s->descriptor() : json(nullptr);
  j["seed"] = stochastic ? json(c.seed) : json(nullptr);
  return j;
}

void emit(const Config& c, const json& report, const std::string& csv, std::ostream& out) {
  if (c.out.empty()) {
    out << report.dump(2) << "\n";
    return;
  }
  std::string prefix = c.out;
  if (prefix.size() > 5 && prefix.substr(prefix.size() - 5) == ".json") prefix.resize(prefix.size() - 5);
  io::write_file(prefix + ".json", report.dump(2) + "\n");
  if (!csv.empty()) io::write_file(prefix + ".csv", csv);
  out << (report.value("pass", false) ? "PASS" : "FAIL") << " " << report.value("command", "") << " -> " << prefix
      << ".json" << (csv.empty() ? "" : " " + prefix + ".csv") << "\n";
}

void require_seed(const Config& c, bool stochastic) {
  if (stochastic && !c.seed_given) throw Error(ErrorCode::kSeedRequired, "this command needs --seed");
  if (!stochastic && c.seed_given) throw UsageError("--seed is only accepted by stochastic commands");
}

// ---- verify ---------------------------------------------------------------

class CheckList {
 public:
  // kind "max" checks worst ≤ tol, kind "min" checks worst ≥ −tol.
  void add(const std::string& name, const std::string& kind, double worst, double tol, int count,
           json extra = json::object()) {
    const bool pass = kind == "max" ? worst <= tol : worst >= -tol;
    json j = {{"name", name}, {"bound", kind == "max" ? "residual <= tolerance" : "slack >= -tolerance"},
              {"worst", worst}, {"tolerance", tol}, {"evaluations", count}, {"pass", pass}};
    if (!extra.empty()) j["details"] = std::move(extra);
    checks_.push_back(std::move(j));
    pass_ = pass_ && pass;
  }
  void skip(const std::string& name, const std::string& reason) {
    checks_.push_back({{"name", name}, {"skipped", reason}});
  }
  const json& checks() const { return checks_; }
  bool pass() const { return pass_; }

 private:
  json checks_ = json::array();
  bool pass_ = true;
};

double rel(double diff, double scale) { return std::abs(diff) / std::max(1.0, std::abs(scale)); }

bool uniform_target(const Scenario& s) {
  if (s.target().is_ball()) return true;
  for (const auto& f : s.target().factors())
    if (f.kind() != Potential1d::Kind::kUniform) return false;
  return true;
}

std::vector<std::array<int, 3>> index_triples(int d) {
  std::vector<std::array<int, 3>> out;
  if (d > 2) {
    for (int i = 0; i < d; ++i) out.push_back({i, i, i});
    return out;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out.push_back({i, j, k});
  return out;
}

int cmd_verify(const Config& c, std::ostream& out) {
  require_seed(c, false);
  if (!(c.tol > 0) || !(c.fd_tol > 0)) throw UsageError("tolerances must be positive");
  const Scenario s = build_scenario(c);
  const double n = parse_n(c.n);
  const auto pts = grid_points(c, s, "-4:4:33");
  const int d = s.dim();
  const int np = static_cast<int>(pts.size());
  CheckList checks;

  double worst = 0;
  for (const Vec& x : pts) worst = std::max(worst, std::abs(ma_residual(s, x)));
  checks.add("monge_ampere_residual", "max", worst, 1e-12, np);

  if (!s.separable()) {
    const std::string why = "radial scenarios carry jets to order 2 only";
    for (const char* name : {"monge_ampere_gradient", "ricci_routes", "bakry_emery_routes", "bounds", "cd_0_2d",
                             "gamma2_closed_1d", "gamma2_direct_fd", "calabi_positivity", "calabi_inequality", "calabi_fd",
                             "lphi_identities"})
      checks.skip(name, why);
  } else {
    worst = 0;
    for (const Vec& x : pts) worst = std::max(worst, monge_ampere_gradient_residual(s, x).lpNorm<Eigen::Infinity>());
    checks.add("monge_ampere_gradient", "max", worst, c.tol, np);

    double ric = 0, be = 0;
    for (const Vec& x : pts) {
      const PointGeometry pg = point_geometry(s, x);
      const Mat a = ricci(pg.frame, pg.phi, pg.v, &pg.comps, RicciRoute::kContraction);
      const Mat b = ricci(pg.frame, pg.phi, pg.v, &pg.comps, RicciRoute::kCoordinate);
      ric = std::max(ric, rel((a - b).cwiseAbs().maxCoeff(), a.cwiseAbs().maxCoeff()));
      const Mat e = bakry_emery(pg.frame, pg.phi, pg.v, &pg.comps, BakryEmeryRoute::kCoordinate);
      const Mat f = bakry_emery(pg.frame, pg.phi, pg.v, &pg.comps, BakryEmeryRoute::kRicciPlusHessian);
      be = std::max(be, rel((e - f).cwiseAbs().maxCoeff(), e.cwiseAbs().maxCoeff()));
    }
    checks.add("ricci_routes", "max", ric, c.tol, np);
    checks.add("bakry_emery_routes", "max", be, c.tol, np);

    auto bounds_check = [&](const std::string& name, double k, double nn) {
      const GeometryReport rep = verify_bounds(s, pts, k, nn, c.tol);
      double slack = kInf;
      for (const auto& b : rep.points)
        slack = std::min({slack, b.min_eig_be, b.thm43_slack, b.lower_form_slack, b.lemma91_slack, b.cauchy_slack,
                          b.min_eig_modified});
      checks.add(name, "min", slack, c.tol, np, {{"K", k}, {"N", std::isfinite(nn) ? json(nn) : json("inf")}});
    };
    bounds_check("bounds", c.k, n);
    if (uniform_target(s)) {
      bounds_check("cd_0_2d", 0.0, 2.0 * d);
    } else {
      checks.skip("cd_0_2d", "target potential is not constant");
    }

    std::vector<TestField> fields = {TestField::linear(Vec::Unit(d, 0)), TestField::quadratic(Mat::Identity(d, d), Vec::Zero(d)),
                                     TestField::sine(Vec::Constant(d, 0.7), 0.3)};
    double closed = 0, fd = 0;
    for (const Vec& x : pts)
      for (const auto& f : fields) {
        const double g = gamma2(f, s, x, Gamma2Route::kBochner);
        if (d == 1) closed = std::max(closed, rel(g - gamma2(f, s, x, Gamma2Route::kClosed1d), g));
        fd = std::max(fd, rel(g - gamma2(f, s, x, Gamma2Route::kDirectFd), g));
      }
    if (d == 1) {
      checks.add("gamma2_closed_1d", "max", closed, 1e-9, np * 3);
    } else {
      checks.skip("gamma2_closed_1d", "closed form is one-dimensional");
    }
    checks.add("gamma2_direct_fd", "max", fd, c.fd_tol, np * 3);

    double pos = kInf, ineq = kInf, cfd = 0, ident = 0;
    for (const Vec& x : pts) {
      const Jet phi = s.phi_derivatives(x, 4);
      const MetricFrame frame = metric_frame(phi);
      const auto p = calabi_positivity_check(phi, frame);
      pos = std::min(pos, p.iii - p.lower);
      const auto q = calabi_inequality_check(frame, phi, d);
      ineq = std::min(ineq, q.quartic - q.s_sq_over_d);
      const auto r = calabi_fd_check(s, x);
      cfd = std::max(cfd, rel(r.residual, r.fd));
      for (auto which : {LphiIdentity::kD2Lower, LphiIdentity::kD2Upper, LphiIdentity::kD3Lower, LphiIdentity::kD3Upper})
        for (const auto& idx : index_triples(d)) {
          const IdentityResidual r = lphi_identity(s, x, which, idx);
          ident = std::max(ident, rel(r.residual(), r.rhs));
        }
    }
    checks.add("calabi_positivity", "min", pos, 1e-9, np);
    checks.add("calabi_inequality", "min", ineq, 1e-10, np);
    checks.add("calabi_fd", "max", cfd, c.fd_tol, np);
    checks.add("lphi_identities", "max", ident, c.fd_tol, np);
  }

  double lemma = kInf;
  int pairs = 0;
  for (int k = 0; k + 1 < np; ++k) {
    for (const Vec& y : {pts[k + 1], pts[np - 1 - k]}) {
      if ((pts[k] - y).norm() == 0) continue;
      lemma = std::min(lemma, lemma_contraction_check(s, pts[k], y).slack());
      ++pairs;
    }
  }
  if (pairs > 0) checks.add("lemma_chain", "min", lemma, 1e-9, pairs);

  json rep = envelope("verify", &s, c, false);
  rep["grid"] = {{"spec", c.grid.empty() ? "default" : c.grid}, {"points", np}};
  rep["tolerance"] = {{"exact", c.tol}, {"fd", c.fd_tol}};
  rep["checks"] = checks.checks();
  rep["pass"] = checks.pass();
  emit(c, rep, "", out);
  return checks.pass() ? kOk : kCheckFailed;
}

// ---- report ---------------------------------------------------------------

std::string matrix_text(const Mat& m) {
  if (m.size() == 1) return io::fmt(m(0, 0));
  std::string s;
  for (int i = 0; i < m.rows(); ++i) {
    s += "\n   ";
    for (int j = 0; j < m.cols(); ++j) s += " " + io::fmt(m(i, j));
  }
  return s;
}

int cmd_report(const Config& c, std::ostream& out) {
  require_seed(c, false);
  const Scenario s = build_scenario(c);
  if (c.x.empty()) throw UsageError("--x is required");
  const Vec x = parse_point(c.x, s.dim());
  if (!s.in_smooth_region(x)) throw UsageError("point lies outside the smooth region of the scenario");
  const int d = s.dim();

  json j = envelope("report", &s, c, false);
  std::ostringstream text;
  j["x"] = io::to_json(x);
  const Jet phi2 = s.phi_derivatives(x, 2);
  j["transport"] = io::to_json(s.transport(x));
  j["metric"] = io::to_json(phi2.hess);
  j["ma_residual"] = ma_residual(s, x);
  text << "scenario " << s.descriptor().dump() << "\nx = " << io::point_cell(x) << "\n";
  text << "grad Phi = " << io::point_cell(s.transport(x)) << "\n";
  text << "metric g =" << (d == 1 ? " " : "") << matrix_text(phi2.hess) << "\n";

  if (s.separable()) {
    const double n = c.n == "inf" ? 2.0 * d : parse_n(c.n);
    const PointGeometry pg = point_geometry(s, x);
    const Tensor r = riemann(pg.frame, pg.phi);
    const Mat ric = ricci(pg.frame, pg.phi, pg.v, &pg.comps, RicciRoute::kContraction);
    const Mat rn = modified_tensor(pg.weights.be, pg.weights.p_grad, n);
    const TestField f = TestField::linear(Vec::Unit(d, 0));
    const double g2 = gamma2(f, s, x, Gamma2Route::kBochner);
    const Jet phi4 = s.phi_derivatives(x, 4);
    const CalabiFrame cf =
        calabi_decomposition(phi4, s.source().jet(x, 3), target_composites(s, x, 3), metric_frame(phi4));
    double riemann_max = 0;
    for (double v : r.data()) riemann_max = std::max(riemann_max, std::abs(v));

    j["riemann_max_abs"] = riemann_max;
    j["ricci"] = io::to_json(ric);
    j["be"] = io::to_json(pg.weights.be);
    j["N"] = std::isfinite(n) ? json(n) : json("inf");
    j["modified"] = io::to_json(rn);
    j["gamma2_linear_e1"] = g2;
    j["calabi"] = {{"S", cf.s}, {"I", cf.term_i}, {"II", cf.term_ii}, {"III", cf.term_iii}, {"L_Phi_S", cf.total()}};
    text << "Riemann max |R_ijkl| = " << io::fmt(riemann_max) << "\n";
    text << "ricci =" << (d == 1 ? " " : "") << matrix_text(ric) << "\n";
    text << "be =" << (d == 1 ? " " : "") << matrix_text(pg.weights.be) << "\n";
    text << "R_N (N = " << io::fmt(n) << ") =" << (d == 1 ? " " : "") << matrix_text(rn) << "\n";
    text << "gamma2(x_1) = " << io::fmt(g2) << "\n";
    text << "calabi S = " << io::fmt(cf.s) << ", I = " << io::fmt(cf.term_i) << ", II = " << io::fmt(cf.term_ii)
         << ", III = " << io::fmt(cf.term_iii) << "\n";
  } else {
    j["note"] = "radial scenarios carry jets to order 2 only";
    text << "curvature tensors need order-3 jets; radial scenarios stop at order 2\n";
  }
  j["pass"] = true;
  out << text.str();
  if (!c.out.empty()) emit(c, j, "", out);
  return kOk;
}

// ---- experiments ----------------------------------------------------------

std::string csv_header_rows(const std::vector<json>& rows, const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const json& v = r.at(cols[k]);
      s += (k ? "," : "") + (v.is_number() ? io::fmt(v.get<double>()) : v.get<std::string>());
    }
    s += "\n";
  }
  return s;
}

int cmd_concentration(const Config& c, std::ostream& out) {
  require_seed(c, true);
  const Scenario s = build_scenario(c);
  HalfSpace a{c.u.empty() ? Vec(Vec::Unit(s.dim(), 0)) : parse_point(c.u, s.dim()), c.c};
  if (!(a.u.norm() > 0)) throw UsageError("--u must be non-zero");
  const auto h = parse_grid(c.grid.empty() ? "0.125:2:16" : c.grid);
  if (c.samples < 1) throw UsageError("--samples must be positive");
  const ConcentrationReport r = concentration_profile(s, a, h, c.samples, c.seed);
  json j = envelope("experiment concentration", &s, c, true);
  j["tolerance"] = 0.0;
  j["result"] = r.to_json();
  j["pass"] = r.pass;
  emit(c, j, r.to_csv(), out);
  return r.pass ? kOk : kCheckFailed;
}

int cmd_diameter(const Config& c, std::ostream& out) {
  require_seed(c, true);
  std::vector<int> dims;
  for (double v : parse_list(c.dims, "dims")) {
    if (v < 1 || v != std::floor(v)) throw UsageError("--dims entries must be positive integers");
    dims.push_back(static_cast<int>(v));
  }
  if (!(c.diameter > 0)) throw UsageError("--D must be positive");
  if (c.samples < 2) throw UsageError("--samples must be at least 2");
  DiameterFamily fam;
  if (c.family == "radial") {
    fam = DiameterFamily::kRadial;
  } else if (c.family == "product") {
    fam = DiameterFamily::kProduct;
  } else {
    throw UsageError("--family must be radial or product");
  }
  const DiameterReport r = diameter_experiment(dims, c.diameter, c.samples, c.seed, fam);
  json j = envelope("experiment diameter", nullptr, c, true);
  j["tolerance"] = nullptr;
  j["result"] = r.to_json();
  j["pass"] = true;
  emit(c, j, r.to_csv(), out);
  return kOk;
}

int cmd_bishop_gromov(const Config& c, std::ostream& out) {
  require_seed(c, false);
  const Scenario s = build_scenario(c);
  const Vec x0 = c.x.empty() ? Vec(Vec::Zero(s.dim())) : parse_point(c.x, s.dim());
  const auto r_grid = parse_grid(c.grid.empty() ? "0.05:1.6:32" : c.grid);
  if (r_grid.front() <= 0) throw UsageError("radii must be positive");
  const double tol = c.tol == 1e-10 ? 1e-8 : c.tol;
  const BishopGromovProfile r = bishop_gromov_profile(s, x0, r_grid, tol);
  json j = envelope("experiment bishop-gromov", &s, c, false);
  j["tolerance"] = tol;
  j["result"] = r.to_json();
  j["pass"] = r.pass;
  emit(c, j, r.to_csv(), out);
  return r.pass ? kOk : kCheckFailed;
}

int cmd_estimates(const Config& c, std::ostream& out) {
  require_seed(c, false);
  const auto ps = parse_list(c.p, "p");
  std::vector<std::pair<double, Scenario>> runs;
  if (c.scenario_file.empty() && c.scenario == "gaussian_to_uniform_1d") {
    for (double dv : parse_list(c.d_values, "D values")) {
      Config k = c;
      k.diameter = dv;
      runs.emplace_back(dv, build_scenario(k));
    }
  } else {
    const Scenario s = build_scenario(c);
    runs.emplace_back(s.target_diameter(), s);
  }
  std::vector<json> rows;
  json reports = json::array();
  bool pass = true;
  for (const auto& [dv, s] : runs) {
    std::vector<IntegralReport> reps = {lm_check(s)};
    for (int k = 0; k <= 2; ++k) reps.push_back(theorem61_check(s, LambdaWeight::power(k)));
    reps.push_back(variance_estimate(s));
    for (double p : ps) reps.push_back(reverse_holder(s, p));
    reps.push_back(vw_check(s));
    for (const auto& r : reps) {
      pass = pass && r.pass;
      json jr = r.to_json();
      jr["D"] = dv;
      rows.push_back({{"D", dv}, {"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}, {"ratio", r.ratio}});
      reports.push_back(std::move(jr));
    }
  }
  json j = envelope("experiment estimates", &runs.front().second, c, false);
  j["tolerance"] = "per report";
  j["result"] = reports;
  j["pass"] = pass;
  emit(c, j, csv_header_rows(rows, {"D", "name", "lhs", "rhs", "slack", "ratio"}), out);
  return pass ? kOk : kCheckFailed;
}

int cmd_poincare(const Config& c, std::ostream& out) {
  require_seed(c, false);
  if (!(c.radius > 0)) throw UsageError("--radius must be positive");
  std::vector<std::pair<double, Scenario>> runs;
  if (c.scenario_file.empty() && c.scenario == "gaussian_to_uniform_1d") {
    for (double dv : parse_list(c.d_values, "D values")) {
      Config k = c;
      k.diameter = dv;
      runs.emplace_back(dv, build_scenario(k));
    }
  } else {
    const Scenario s = build_scenario(c);
    runs.emplace_back(s.target_diameter(), s);
  }
  const int d = runs.front().second.dim();
  std::vector<TestField> fields;
  for (double centre : parse_grid(c.grid.empty() ? "-2:2:9" : c.grid))
    fields.push_back(TestField::bump(centre * Vec::Unit(d, 0), Vec::Constant(d, c.radius)));
  for (int i = 0; i < d; ++i) fields.push_back(TestField::linear(Vec::Unit(d, i)));

  std::vector<json> rows;
  json reports = json::array();
  bool pass = true;
  for (const auto& [dv, s] : runs) {
    const IntegralReport r = poincare_rayleigh(s, fields);
    pass = pass && r.pass;
    json jr = r.to_json();
    jr["D"] = dv;
    int idx = 0;
    for (const auto& f : r.details.at("fields")) {
      if (f.contains("quotient")) {
        rows.push_back({{"D", dv}, {"field", f.at("field").get<std::string>() + "#" + std::to_string(idx)},
                        {"quotient", f.at("quotient")}, {"quotient_times_D", f.at("quotient").get<double>() * dv}});
      }
      ++idx;
    }
    reports.push_back(std::move(jr));
  }
  json j = envelope("experiment poincare", &runs.front().second, c, false);
  j["tolerance"] = 0.0;
  j["result"] = reports;
  j["pass"] = pass;
  emit(c, j, csv_header_rows(rows, {"D", "field", "quotient", "quotient_times_D"}), out);
  return pass ? kOk : kCheckFailed;
}

int cmd_scenario_list(std::ostream& out) {
  const std::vector<std::pair<std::string, json>> catalog = {
      {"identity", Scenario::identity(2).descriptor()},
      {"gaussian_scale", Scenario::gaussian_scale({1.0, 2.0}).descriptor()},
      {"gaussian_to_uniform_1d", Scenario::gaussian_to_uniform_1d(1.0).descriptor()},
      {"product", diameter_scenario(DiameterFamily::kProduct, 2, 1.0).descriptor()},
      {"radial_gaussian_to_ball", Scenario::radial_gaussian_to_ball(3, 1.0).descriptor()},
      {"custom_1d", Scenario::custom_1d(Potential1d::gaussian(0, 1), Potential1d::quartic(0.1)).descriptor()},
  };
  for (const auto& [name, desc] : catalog) out << name << "\t" << desc.dump() << "\n";
  return kOk;
}

void add_scenario_options(CLI::App* app, Config& c) {
  app->add_option("--scenario", c.scenario, "catalog name (see `scenario list`)");
  app->add_option("--scenario-file", c.scenario_file, "scenario descriptor JSON");
  app->add_option("--D", c.diameter, "target diameter");
  app->add_option("--dim", c.dim, "dimension")->each([&c](const std::string&) { c.dim_given = true; });
  app->add_option("--sigma", c.sigma, "gaussian_scale sigma, scalar or comma list");
}

void add_common(CLI::App* app, Config& c) {
  app->add_option("--seed", c.seed, "master seed")->each([&c](const std::string&) { c.seed_given = true; });
  app->add_option("--out", c.out, "output prefix for .json/.csv files");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Hessian metric-measure spaces of optimal transport maps", "brenier"};
  app.set_version_flag("--version", BRENIER_VERSION);
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "deterministic identity and inequality suite");
  add_scenario_options(verify, c);
  add_common(verify, c);
  verify->add_option("--grid", c.grid, "per-axis grid lo:hi:count (inclusive)");
  verify->add_option("--N", c.n, "dimension parameter of R_N, or inf");
  verify->add_option("--K", c.k, "curvature lower bound");
  verify->add_option("--tol", c.tol, "tolerance for exact checks");
  verify->add_option("--fd-tol", c.fd_tol, "tolerance for finite-difference checks");

  auto* report = app.add_subcommand("report", "pointwise tensor dump");
  add_scenario_options(report, c);
  add_common(report, c);
  report->add_option("--x", c.x, "point, comma separated");
  report->add_option("--N", c.n, "dimension parameter of R_N (default 2d)");

  auto* experiment = app.add_subcommand("experiment", "numerical experiments");
  experiment->require_subcommand(1);
  auto* conc = experiment->add_subcommand("concentration", "half-space enlargement masses");
  auto* diam = experiment->add_subcommand("diameter", "diameter scaling in d and D");
  auto* bg = experiment->add_subcommand("bishop-gromov", "ball mass profile");
  auto* est = experiment->add_subcommand("estimates", "integral inequalities for the top eigenvalue");
  auto* poin = experiment->add_subcommand("poincare", "Rayleigh quotients of test fields");
  for (auto* sub : {conc, bg, est, poin}) add_scenario_options(sub, c);
  for (auto* sub : {conc, diam, bg, est, poin}) add_common(sub, c);
  conc->add_option("--grid", c.grid, "h grid lo:hi:count");
  conc->add_option("--samples", c.samples, "Monte Carlo samples");
  conc->add_option("--u", c.u, "half-space normal, comma separated");
  conc->add_option("--c", c.c, "half-space offset, >= 0");
  diam->add_option("--dims", c.dims, "comma separated dimensions");
  diam->add_option("--D", c.diameter, "target diameter");
  diam->add_option("--samples", c.samples, "pairs per dimension");
  diam->add_option("--family", c.family, "radial or product");
  bg->add_option("--x", c.x, "ball centre");
  bg->add_option("--grid", c.grid, "radius grid lo:hi:count");
  bg->add_option("--tol", c.tol, "monotonicity tolerance");
  est->add_option("--p", c.p, "reverse Hölder exponents");
  est->add_option("--d-values", c.d_values, "D sweep for gaussian_to_uniform_1d");
  poin->add_option("--grid", c.grid, "bump centres along x_1, lo:hi:count");
  poin->add_option("--radius", c.radius, "bump radius");
  poin->add_option("--d-values", c.d_values, "D sweep for gaussian_to_uniform_1d");

  auto* scenario = app.add_subcommand("scenario", "scenario catalog");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "list catalog scenarios");

  std::vector<std::string> argv_store = {"brenier"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return cmd_verify(c, out);
    if (*report) return cmd_report(c, out);
    if (*conc) return cmd_concentration(c, out);
    if (*diam) return cmd_diameter(c, out);
    if (*bg) return cmd_bishop_gromov(c, out);
    if (*est) return cmd_estimates(c, out);
    if (*poin) return cmd_poincare(c, out);
    if (*list) return cmd_scenario_list(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kQuadratureFailure:
      case ErrorCode::kInversionFailure:
      case ErrorCode::kSingularHessian:
        return kCheckFailed;
      default:
        return kUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace brenier::cli
