#include "qcompat/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qcompat/figures.hpp"
#include "qcompat/robustness.hpp"
#include "qcompat/sdp.hpp"
#include "qcompat/witness.hpp"

#ifndef QCOMPAT_GOLDEN_PATH
#define QCOMPAT_GOLDEN_PATH "data/golden.json"
#endif

namespace qcompat {

namespace {

using nlohmann::json;
using Segments = std::vector<std::pair<double, double>>;

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CachedSweep {
  std::vector<SweepRecord> records;
  double seconds;
};

class Context {
 public:
  Context(json golden, unsigned workers) : golden_(std::move(golden)), workers_(workers) {}

  const json& golden(const char* key) const { return golden_.at(key); }

  std::vector<double> grid() const {
    const auto& g = golden_.at("grid");
    return time_grid(g.at("t_min").get<double>(), g.at("t_max").get<double>(), g.at("t_step").get<double>());
  }

  RobustnessOptions robustness_options(bool refine = false) const {
    RobustnessOptions o;
    o.dr = golden_.at("grid").at("dr").get<double>();
    o.refine = refine;
    return o;
  }

  const CachedSweep& figure(int id) {
    const FigureSpec fig = figure_spec(id);
    return pair(fig.map1, fig.map2, true, true);
  }

  const CachedSweep& pair(const DynamicalMap& m1, const DynamicalMap& m2, bool generic, bool cd) {
    const std::string key = m1.label() + "|" + m2.label() + (generic ? "|g" : "") + (cd ? "|cd" : "");
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SweepOptions so;
    so.generic = generic;
    so.cd = cd;
    so.robustness = robustness_options();
    so.workers = workers_;
    const auto t0 = std::chrono::steady_clock::now();
    auto records = sweep(m1, m2, grid(), so);
    return cache_.emplace(key, CachedSweep{std::move(records), seconds_since(t0)}).first->second;
  }

 private:
  json golden_;
  unsigned workers_;
  std::map<std::string, CachedSweep> cache_;
};

std::vector<CurvePoint> column(const std::vector<SweepRecord>& recs, bool generic) {
  std::vector<CurvePoint> out;
  for (const auto& r : recs) out.push_back({r.t, generic ? r.r_generic : r.r_cd});
  return out;
}

bool any_indeterminate(const std::vector<SweepRecord>& recs) {
  for (const auto& r : recs)
    if (r.indeterminate) return true;
  return false;
}

std::string show(const Segments& segs) {
  std::string s;
  for (const auto& [a, b] : segs) s += strf("[%.2f,%.2f]", a, b);
  return s.empty() ? "none" : s;
}

// Rising segments of e^{-rate t} cos^2(omega t) on a fine grid.
Segments closed_form_rising(double rate, double omega, double t_min, double t_max) {
  std::vector<CurvePoint> curve;
  const double h = 1e-4;
  for (double t = t_min; t <= t_max + 1e-12; t += h) {
    const double c = std::cos(omega * t);
    curve.push_back({t, std::exp(-rate * t) * c * c});
  }
  return rising_segments(curve, 0.0);
}

// Every robustness segment sits inside some reference segment widened by
// `slack`; returns the number of distinct reference segments hit.
int aligned_hits(const Segments& robust, const Segments& reference, double slack, bool& all_inside) {
  std::vector<bool> hit(reference.size(), false);
  all_inside = true;
  for (const auto& [a, b] : robust) {
    bool inside = false;
    for (std::size_t k = 0; k < reference.size(); ++k)
      if (a >= reference[k].first - slack && b <= reference[k].second + slack) {
        hit[k] = true;
        inside = true;
        break;
      }
    all_inside = all_inside && inside;
  }
  int n = 0;
  for (bool h : hit) n += h;
  return n;
}

CheckOutcome check_zero_crossing(Context& ctx) {
  const auto& g = ctx.golden("zero_crossing");
  const auto window = g.at("window").get<std::vector<double>>();
  const double analytic = g.at("analytic").get<double>();
  const double max_seconds = g.at("max_seconds").get<double>();

  const double exact = 2.0 * std::log(1.5);
  const CachedSweep& s = ctx.figure(1);
  const auto& recs = s.records;
  std::size_t first = recs.size();
  for (std::size_t i = recs.size(); i-- > 0;) {
    if (recs[i].r_cd != 0.0) break;
    first = i;
  }
  if (first == recs.size()) return {"", false, "CD robustness never reaches 0", 0};
  const double t0 = recs[first].t;
  const bool ok = t0 >= window[0] && t0 <= window[1] && std::abs(analytic - exact) < 1e-9 && s.seconds <= max_seconds &&
                  !any_indeterminate(recs);
  return {"", ok,
          strf("first permanent zero t=%.2f, window [%.2f,%.2f], analytic 2ln(3/2)=%.4f, sweep %.1fs", t0, window[0],
               window[1], exact, s.seconds),
          0};
}

CheckOutcome check_monotonicity(Context& ctx) {
  const double slack = ctx.golden("monotonicity").at("slack").get<double>();
  const auto& recs = ctx.figure(1).records;
  double worst = -1.0;
  int violations = 0;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i)
    for (bool generic : {true, false}) {
      const double a = generic ? recs[i].r_generic : recs[i].r_cd;
      const double b = generic ? recs[i + 1].r_generic : recs[i + 1].r_cd;
      worst = std::max(worst, b - a);
      if (b > a + slack) ++violations;
    }
  return {"", violations == 0 && !any_indeterminate(recs),
          strf("%zu points, largest increase %.4g, %d violations", recs.size(), worst, violations), 0};
}

CheckOutcome check_rising(Context& ctx, const char* key, int fig, double rate, double omega) {
  const auto& g = ctx.golden(key);
  const double deadband = g.at("deadband").get<double>();
  const double slack = g.at("alignment").get<double>();
  const int min_segments = g.at("min_segments").get<int>();
  const auto grid = ctx.grid();
  const Segments reference = closed_form_rising(rate, omega, grid.front(), grid.back());

  const auto& recs = ctx.figure(fig).records;
  bool ok = !any_indeterminate(recs);
  std::string detail;
  for (bool generic : {true, false}) {
    const Segments segs = rising_segments(column(recs, generic), deadband);
    bool inside = false;
    const int hits = aligned_hits(segs, reference, slack, inside);
    const bool pass = static_cast<int>(segs.size()) >= min_segments && inside && hits >= min_segments;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += strf("%s: %zu segments %s, %d trace-distance rises matched%s", generic ? "generic" : "cd", segs.size(),
                   show(segs).c_str(), hits, inside ? "" : ", misaligned");
  }
  return {"", ok, detail, 0};
}

CheckOutcome check_eternal(Context& ctx) {
  const auto& g = ctx.golden("eternal");
  const double deadband = g.at("deadband").get<double>();
  const auto max_segments = g.at("max_segments").get<std::size_t>();
  const auto& recs = ctx.figure(6).records;
  const Segments sg = rising_segments(column(recs, true), deadband);
  const Segments sc = rising_segments(column(recs, false), deadband);
  return {"", sg.size() <= max_segments && sc.size() <= max_segments && !any_indeterminate(recs),
          strf("generic %s, cd %s", show(sg).c_str(), show(sc).c_str()), 0};
}

CheckOutcome check_upward_closure(Context& ctx) {
  const auto& g = ctx.golden("upward_closure");
  std::mt19937_64 rng(g.at("seed").get<std::uint64_t>());
  const int pairs = g.at("pairs").get<int>();
  const auto offsets = g.at("offsets").get<std::vector<double>>();
  const RobustnessOptions opts = ctx.robustness_options(true);

  int failures = 0, probes = 0;
  double min_q = 1.0, max_r = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Channel a = random_channel(rng, 2, 2);
    const Channel b = random_channel(rng, 2, 2);
    for (NoiseClass noise : {NoiseClass::generic, NoiseClass::completely_depolarizing}) {
      const auto res = robustness(a, b, noise, opts);
      max_r = std::max(max_r, res.r_star);
      for (double off : offsets) {
        const auto f = feasibility_q(a, b, res.r_star + off, noise);
        ++probes;
        min_q = std::min(min_q, f.q);
        if (f.q < -opts.feasibility_tol || f.status != SdpStatus::optimal || res.indeterminate) ++failures;
      }
    }
  }
  return {"", failures == 0,
          strf("%d probes above r*, min q %.3g, largest r* %.4f, %d failures", probes, min_q, max_r, failures), 0};
}

CheckOutcome check_measurement_bound(Context& ctx) {
  const auto& g = ctx.golden("measurement_bound");
  std::mt19937_64 rng(g.at("seed").get<std::uint64_t>());
  const int pairs = g.at("pairs").get<int>();
  const auto times = g.at("times").get<std::vector<double>>();
  const double slack = g.at("slack").get<double>();
  const RobustnessOptions opts = ctx.robustness_options(true);
  const DynamicalMap d1 = parse_family("depolarizing"), d2 = parse_family("depolarizing-indiv");

  std::vector<Povm> m1, m2;
  for (int k = 0; k < pairs; ++k) {
    const auto psi = random_state_vector(rng, 2);
    const auto phi = random_state_vector(rng, 2);
    m1.push_back(Povm::projective(psi));
    m2.push_back(Povm::projective(phi));
  }
  int violations = 0, bad = 0;
  double worst = -1.0;
  for (double t : times) {
    const Channel c1 = evaluate(d1, t), c2 = evaluate(d2, t);
    const auto rc = robustness(c1, c2, NoiseClass::generic, opts);
    bad += rc.indeterminate;
    for (int k = 0; k < pairs; ++k) {
      const auto rm = measurement_robustness(dual_apply(c1, m1[k]), dual_apply(c2, m2[k]), NoiseClass::generic, opts);
      bad += rm.indeterminate;
      worst = std::max(worst, rm.r_star - rc.r_star);
      if (rm.r_star > rc.r_star + slack) ++violations;
    }
  }
  return {"", violations == 0 && bad == 0,
          strf("%zu instances, max(R_M - R_C) %.4g, %d violations, %d indeterminate", times.size() * pairs, worst,
               violations, bad),
          0};
}

CheckOutcome check_dominance(Context& ctx) {
  const double cap = ctx.golden("dominance").at("cap").get<double>();
  int violations = 0;
  std::size_t points = 0;
  for (int id = 1; id <= kFigureCount; ++id)
    for (const auto& r : ctx.figure(id).records) {
      ++points;
      if (!(r.r_generic >= 0.0 && r.r_generic <= r.r_cd + 1e-12 && r.r_cd <= cap) || r.indeterminate) ++violations;
    }
  return {"", violations == 0, strf("%zu points across %d figures, %d violations", points, kFigureCount, violations),
          0};
}

CheckOutcome check_identity_self(Context& ctx) {
  const auto& g = ctx.golden("identity_self");
  const double expected = g.at("value").get<double>();
  const double tol = g.at("tolerance").get<double>();
  const Channel id = Channel::identity(2);
  const auto res = robustness(id, id, NoiseClass::completely_depolarizing, ctx.robustness_options(true));
  return {"", std::abs(res.r_star - expected) <= tol && !res.indeterminate,
          strf("R_CD(id, id) = %.5f, expected %.3f +- %.3f", res.r_star, expected, tol), 0};
}

CheckOutcome check_teleportation(Context& ctx) {
  const double tol = ctx.golden("teleportation").at("tolerance").get<double>();
  const FigureSpec fig = figure_spec(7);
  const double lambda = fig.map2.lambda(), omega = fig.map2.omega();
  double worst = 0.0;
  int plateau_errors = 0;
  const auto grid = ctx.grid();
  for (double t : grid) {
    const auto tf = teleport_fidelity(fig.map2, t);
    const double c = std::cos(omega * t);
    const double expected = 3.0 * std::exp(-lambda * t) * c * c;
    worst = std::max(worst, std::abs(tf.n_value - expected));
    const bool plateau = tf.f_max == 2.0 / 3.0;
    if (plateau != (tf.n_value <= 1.0)) ++plateau_errors;
    if (!plateau && std::abs(tf.f_max - 0.5 * (1.0 + tf.n_value / 3.0)) > tol) ++plateau_errors;
  }
  return {"", worst <= tol && plateau_errors == 0,
          strf("%zu points, max |N - 3w| = %.3g, %d plateau mismatches", grid.size(), worst, plateau_errors), 0};
}

CheckOutcome check_measure_signs(Context& ctx) {
  const double tol = ctx.golden("measure_signs").at("normalization_tolerance").get<double>();
  const DynamicalMap id = DynamicalMap::identity();
  const auto& d1 = ctx.pair(id, parse_family("depolarizing"), true, false).records;
  const auto& d2 = ctx.figure(4).records;
  const auto& ad = ctx.figure(5).records;
  const auto r1 = indivisibility_from_curve(column(d1, true));
  const auto r2 = indivisibility_from_curve(column(d2, true));
  const auto r3 = indivisibility_from_curve(column(ad, true));
  bool norm = true;
  for (const auto* r : {&r1, &r2, &r3}) norm = norm && std::abs(r->n_normalized - r->n_raw / (1.0 + r->n_raw)) <= tol;
  const bool ok = r1.n_raw == 0.0 && r2.n_raw > 0.0 && r3.n_raw > 0.0 && norm && !any_indeterminate(d1);
  return {"", ok,
          strf("D1 %.4g, D2 %.4g, amplitude damping %.4g (raw, identity reference, generic noise)", r1.n_raw, r2.n_raw,
               r3.n_raw),
          0};
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) h(i, j) = complex(n(rng), n(rng));
  return h.hermitian_part();
}

CheckOutcome check_solver(Context& ctx) {
  const auto& g = ctx.golden("solver");
  std::mt19937_64 rng(g.at("seed").get<std::uint64_t>());
  const int eig_n = g.at("eig_instances").get<int>();
  const double eig_tol = g.at("eig_tolerance").get<double>();
  const int planted_n = g.at("planted_instances").get<int>();
  const double planted_tol = g.at("planted_tolerance").get<double>();

  double eig_err = 0.0;
  int failures = 0;
  for (int k = 0; k < eig_n; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k % 4);
    const ComplexMatrix h = random_hermitian(rng, d);
    SdpProblem p;
    const auto x = p.add_block("X", d);
    const auto t = p.add_scalar("t");
    p.set_sense(Sense::maximize);
    p.add_scalar_objective(t, 1.0);
    p.add_matrix_equality({{x, [](const ComplexMatrix& m) { return m; }}}, {{t, ComplexMatrix::identity(d)}}, h);
    const auto sol = solve(p);
    if (sol.status != SdpStatus::optimal) ++failures;
    eig_err = std::max(eig_err, std::abs(sol.objective_value - min_eigenvalue(h)));
  }

  // Planted pair: X* and S* share eigenvectors with complementary supports,
  // C = sum_i y_i F_i + S*, so X* is optimal with value sum_i y_i b_i.
  double planted_err = 0.0;
  bool replay = true;
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int k = 0; k < planted_n; ++k) {
    const std::size_t dims[2] = {3, 2};
    SdpProblem p;
    std::vector<ComplexMatrix> xs, ss;
    for (std::size_t b = 0; b < 2; ++b) {
      p.add_block("B" + std::to_string(b), dims[b]);
      const auto v = hermitian_eig(random_hermitian(rng, dims[b])).vectors;
      ComplexMatrix xd(dims[b], dims[b]), sd(dims[b], dims[b]);
      for (std::size_t i = 0; i + 1 < dims[b]; ++i) xd(i, i) = u(rng);
      sd(dims[b] - 1, dims[b] - 1) = u(rng);
      xs.push_back(v * xd * v.adjoint());
      ss.push_back(v * sd * v.adjoint());
    }
    const int m = 4;
    std::vector<ComplexMatrix> c = ss;
    double optimum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double y = n(rng);
      std::vector<SdpProblem::BlockCoef> row;
      double rhs = 0.0;
      for (std::size_t b = 0; b < 2; ++b) {
        const ComplexMatrix f = random_hermitian(rng, dims[b]);
        rhs += (f * xs[b]).trace().real();
        ComplexMatrix yf = f;
        yf *= complex(y);
        c[b] += yf;
        row.push_back({b, f});
      }
      optimum += y * rhs;
      p.add_equality(row, {}, rhs);
    }
    for (std::size_t b = 0; b < 2; ++b) p.add_objective(b, c[b]);
    const auto s1 = solve(p);
    const auto s2 = solve(p);
    if (s1.status != SdpStatus::optimal) ++failures;
    planted_err = std::max(planted_err, std::abs(s1.objective_value - optimum));
    replay = replay && s1.iterations == s2.iterations && s1.objective_value == s2.objective_value;
    for (std::size_t b = 0; b < 2; ++b) replay = replay && s1.block_values[b] == s2.block_values[b];
  }
  return {"", failures == 0 && eig_err <= eig_tol && planted_err <= planted_tol && replay,
          strf("eigenvalue LP max error %.3g (%d), planted max error %.3g (%d), replay %s, %d solver failures", eig_err,
               eig_n, planted_err, planted_n, replay ? "identical" : "differs", failures),
          0};
}

using CheckFn = CheckOutcome (*)(Context&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"zero_crossing", check_zero_crossing},
      {"monotonicity", check_monotonicity},
      {"nonmonotonicity",
       [](Context& c) { return check_rising(c, "nonmonotonicity", 4, 0.5, 5.0 * std::numbers::pi); }},
      {"amplitude_damping",
       [](Context& c) { return check_rising(c, "amplitude_damping", 5, 0.5, 5.0 * std::numbers::pi); }},
      {"eternal", check_eternal},
      {"upward_closure", check_upward_closure},
      {"measurement_bound", check_measurement_bound},
      {"dominance", check_dominance},
      {"identity_self", check_identity_self},
      {"teleportation", check_teleportation},
      {"measure_signs", check_measure_signs},
      {"solver", check_solver},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string default_golden_path() { return QCOMPAT_GOLDEN_PATH; }

std::vector<CheckOutcome> validate(const ValidationOptions& opts,
                                   const std::function<void(const CheckOutcome&)>& on_result) {
  for (const auto& name : opts.only) {
    bool known = false;
    for (const auto& n : check_names()) known = known || n == name;
    if (!known) throw DomainError("unknown check: " + name);
  }
  const std::string path = opts.golden_path.empty() ? default_golden_path() : opts.golden_path;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read golden file " + path);
  json golden;
  try {
    golden = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed golden file " + path + ": " + e.what());
  }

  Context ctx(std::move(golden), std::max(1u, opts.workers));
  std::vector<CheckOutcome> out;
  for (const auto& [name, fn] : registry()) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), name) == opts.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckOutcome res;
    try {
      res = fn(ctx);
    } catch (const std::exception& e) {
      res = {"", false, std::string("error: ") + e.what(), 0};
    }
    res.name = name;
    res.seconds = seconds_since(t0);
    if (on_result) on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace qcompat
