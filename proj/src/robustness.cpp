#include "qcompat/robustness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qcompat {

const char* to_string(NoiseClass n) {
  return n == NoiseClass::generic ? "generic" : "completely_depolarizing";
}

namespace {

ComplexMatrix identity_term(const ComplexMatrix& m) { return m; }

}  // namespace

SdpProblem feasibility_problem(const Channel& ch1, const Channel& ch2, double r, NoiseClass noise) {
  if (ch1.din() != ch2.din()) throw DimensionError("channel pair must share the input dimension");
  if (!(r >= 0.0)) throw DomainError("mixing weight r must be non-negative");
  const std::size_t din = ch1.din(), d1 = ch1.dout(), d2 = ch2.dout();
  const SubsystemShape joint{din, d1, d2};
  const std::size_t n = din * d1 * d2;

  SdpProblem p;
  p.set_sense(Sense::maximize);
  // Joint Choi matrix C = X + q 1 with X PSD.
  const std::size_t x = p.add_block("X", n);
  const std::size_t q = p.add_scalar("q");
  p.add_scalar_objective(q, 1.0);

  auto marginal_term = [&](std::vector<std::size_t> keep) {
    return [joint, keep, r](const ComplexMatrix& m) {
      ComplexMatrix out = partial_trace(m, joint, std::span<const std::size_t>(keep));
      out *= complex(1.0 + r);
      return out;
    };
  };
  const ComplexMatrix one1 = ComplexMatrix::identity(din * d1);
  const ComplexMatrix one2 = ComplexMatrix::identity(din * d2);
  ComplexMatrix q1 = one1, q2 = one2;
  q1 *= complex((1.0 + r) * static_cast<double>(d2));
  q2 *= complex((1.0 + r) * static_cast<double>(d1));

  std::vector<SdpProblem::MapTerm> terms1{{x, marginal_term({0, 1})}};
  std::vector<SdpProblem::MapTerm> terms2{{x, marginal_term({0, 2})}};

  // Noise blocks carry the weight r: N_i here is r times the noise Choi
  // matrix, which keeps the problem well scaled as r -> 0.
  auto negate = [](const ComplexMatrix& m) {
    ComplexMatrix out = m;
    out *= complex(-1.0);
    return out;
  };
  if (noise == NoiseClass::generic) {
    const std::size_t n1 = p.add_block("N1", din * d1);
    const std::size_t n2 = p.add_block("N2", din * d2);
    terms1.push_back({n1, negate});
    terms2.push_back({n2, negate});
    const SubsystemShape s1{din, d1}, s2{din, d2};
    ComplexMatrix tp = ComplexMatrix::identity(din);
    tp *= complex(r);
    p.add_matrix_equality({{n1, [s1](const ComplexMatrix& m) { return partial_trace(m, s1, {0}); }}}, {}, tp,
                          "noise1.tp");
    p.add_matrix_equality({{n2, [s2](const ComplexMatrix& m) { return partial_trace(m, s2, {0}); }}}, {}, tp,
                          "noise2.tp");
  } else {
    const std::size_t e1 = p.add_block("eta1", d1);
    const std::size_t e2 = p.add_block("eta2", d2);
    const ComplexMatrix in = ComplexMatrix::identity(din);
    auto lift = [in](const ComplexMatrix& m) {
      ComplexMatrix out = kron(in, m);
      out *= complex(-1.0);
      return out;
    };
    terms1.push_back({e1, lift});
    terms2.push_back({e2, lift});
    p.add_equality({{e1, ComplexMatrix::identity(d1)}}, {}, r, "eta1.trace");
    p.add_equality({{e2, ComplexMatrix::identity(d2)}}, {}, r, "eta2.trace");
  }
  p.add_matrix_equality(terms1, {{q, q1}}, ch1.choi(), "marginal1");
  p.add_matrix_equality(terms2, {{q, q2}}, ch2.choi(), "marginal2");
  return p;
}

SdpProblem measurement_feasibility_problem(const Povm& m1, const Povm& m2, double r, NoiseClass noise) {
  if (m1.dim() != m2.dim()) throw DimensionError("POVM pair must share the dimension");
  if (!(r >= 0.0)) throw DomainError("mixing weight r must be non-negative");
  const std::size_t d = m1.dim(), a = m1.outcomes(), b = m2.outcomes();

  SdpProblem p;
  p.set_sense(Sense::maximize);
  const std::size_t q = p.add_scalar("q");
  p.add_scalar_objective(q, 1.0);
  // Joint effects G_ij = X_ij + q 1; noise effects are pre-multiplied by r.
  std::vector<std::size_t> g(a * b);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) g[i * b + j] = p.add_block("G" + std::to_string(i) + std::to_string(j), d);
  // Trivial noise effects p_i 1 are 1 x 1 blocks lifted to the identity.
  const bool trivial = noise == NoiseClass::completely_depolarizing;
  const std::size_t nd = trivial ? 1 : d;
  std::vector<std::size_t> n1(a), n2(b);
  for (std::size_t i = 0; i < a; ++i) n1[i] = p.add_block("N1_" + std::to_string(i), nd);
  for (std::size_t j = 0; j < b; ++j) n2[j] = p.add_block("N2_" + std::to_string(j), nd);

  auto scaled = [](double s) {
    return [s](const ComplexMatrix& m) {
      ComplexMatrix out = m;
      out *= complex(s);
      return out;
    };
  };
  const ComplexMatrix one = ComplexMatrix::identity(d);
  const HermitianMap noise_term = trivial ? HermitianMap([one](const ComplexMatrix& m) {
    ComplexMatrix out = one;
    out *= -m(0, 0);
    return out;
  })
                                          : HermitianMap(scaled(-1.0));

  for (std::size_t i = 0; i < a; ++i) {
    std::vector<SdpProblem::MapTerm> terms;
    for (std::size_t j = 0; j < b; ++j) terms.push_back({g[i * b + j], scaled(1.0 + r)});
    terms.push_back({n1[i], noise_term});
    ComplexMatrix qc = ComplexMatrix::identity(d);
    qc *= complex((1.0 + r) * static_cast<double>(b));
    p.add_matrix_equality(terms, {{q, qc}}, m1.effects()[i], "marginal1." + std::to_string(i));
  }
  for (std::size_t j = 0; j < b; ++j) {
    std::vector<SdpProblem::MapTerm> terms;
    for (std::size_t i = 0; i < a; ++i) terms.push_back({g[i * b + j], scaled(1.0 + r)});
    terms.push_back({n2[j], noise_term});
    ComplexMatrix qc = ComplexMatrix::identity(d);
    qc *= complex((1.0 + r) * static_cast<double>(a));
    p.add_matrix_equality(terms, {{q, qc}}, m2.effects()[j], "marginal2." + std::to_string(j));
  }
  std::vector<SdpProblem::MapTerm> sum1, sum2;
  for (auto k : n1) sum1.push_back({k, identity_term});
  for (auto k : n2) sum2.push_back({k, identity_term});
  ComplexMatrix total = ComplexMatrix::identity(nd);
  total *= complex(r);
  p.add_matrix_equality(sum1, {}, total, "noise1.normalization");
  p.add_matrix_equality(sum2, {}, total, "noise2.normalization");
  return p;
}

namespace {

FeasibilityResult run(const SdpProblem& p, const SdpSettings& settings) {
  const SdpSolution s = solve(p, settings);
  return {s.objective_value, s.status, s.iterations};
}

}  // namespace

FeasibilityResult feasibility_q(const Channel& ch1, const Channel& ch2, double r, NoiseClass noise,
                                const SdpSettings& settings) {
  return run(feasibility_problem(ch1, ch2, r, noise), settings);
}

FeasibilityResult measurement_feasibility_q(const Povm& m1, const Povm& m2, double r, NoiseClass noise,
                                            const SdpSettings& settings) {
  return run(measurement_feasibility_problem(m1, m2, r, noise), settings);
}

namespace {

template <class Oracle>
RobustnessResult search(Oracle&& oracle, const RobustnessOptions& opts) {
  if (!(opts.dr > 0.0)) throw DomainError("dr must be positive");
  if (!(opts.r_max > 0.0)) throw DomainError("r_max must be positive");

  RobustnessResult res;
  auto probe = [&](double r) {
    FeasibilityResult f = oracle(r, opts.solver);
    bool bad = f.status != SdpStatus::optimal;
    if (bad) {
      SdpSettings more = opts.solver;
      more.max_iterations *= 4;
      f = oracle(r, more);
      bad = f.status != SdpStatus::optimal;
    }
    res.search_trace.push_back({r, f.q, bad});
    res.indeterminate = res.indeterminate || bad;
    return f.q >= -opts.feasibility_tol;
  };

  const auto n_max = static_cast<long>(std::ceil(opts.r_max / opts.dr - 1e-9));
  auto grid_r = [&](long k) { return static_cast<double>(k) * opts.dr; };

  long hit = -1;
  if (opts.scan == GridScan::linear) {
    for (long k = 0; k <= 2 * n_max && hit < 0; ++k)
      if (probe(grid_r(k))) hit = k;
  } else if (probe(0.0)) {
    hit = 0;
  } else if (probe(grid_r(n_max))) {
    long lo = 0, hi = n_max;
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (probe(grid_r(mid)) ? hi : lo) = mid;
    }
    hit = hi;
  } else {
    for (long k = n_max + 1; k <= 2 * n_max && hit < 0; ++k)
      if (probe(grid_r(k))) hit = k;
  }

  if (hit < 0) {
    res.indeterminate = true;
    res.r_star = grid_r(2 * n_max);
    res.q_at_r_star = res.search_trace.back().q;
    return res;
  }

  auto q_of = [&](double r) {
    for (auto it = res.search_trace.rbegin(); it != res.search_trace.rend(); ++it)
      if (it->r == r) return it->q;
    return std::numeric_limits<double>::quiet_NaN();
  };

  double hi = grid_r(hit);
  if (opts.refine && hit > 0) {
    double lo = grid_r(hit - 1);
    while (hi - lo > opts.refine_width) {
      const double mid = 0.5 * (lo + hi);
      (probe(mid) ? hi : lo) = mid;
    }
    res.method = SearchMethod::grid_plus_bisection;
  }
  res.r_star = hi;
  res.q_at_r_star = q_of(hi);
  return res;
}

}  // namespace

RobustnessResult robustness(const Channel& ch1, const Channel& ch2, NoiseClass noise, const RobustnessOptions& opts) {
  if (ch1.din() != ch2.din()) throw DimensionError("channel pair must share the input dimension");
  return search([&](double r, const SdpSettings& s) { return feasibility_q(ch1, ch2, r, noise, s); }, opts);
}

RobustnessResult measurement_robustness(const Povm& m1, const Povm& m2, NoiseClass noise,
                                        const RobustnessOptions& opts) {
  if (m1.dim() != m2.dim()) throw DimensionError("POVM pair must share the dimension");
  return search([&](double r, const SdpSettings& s) { return measurement_feasibility_q(m1, m2, r, noise, s); }, opts);
}

std::vector<double> time_grid(double t_min, double t_max, double t_step) {
  if (!(t_step > 0.0)) throw DomainError("t_step must be positive");
  if (!(t_min >= 0.0)) throw DomainError("t_min must be non-negative");
  if (!(t_max >= t_min)) throw DomainError("t_max must not be below t_min");
  const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = t_min + static_cast<double>(i) * t_step;
  return grid;
}

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw DomainError("time grid has a negative entry");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid is not strictly increasing");
  }
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SweepRecord> sweep(const DynamicalMap& map1, const DynamicalMap& map2, const std::vector<double>& t_grid,
                               const SweepOptions& opts) {
  check_grid(t_grid);
  if (map1.dim() != map2.dim()) throw DimensionError("dynamical maps must act on the same space");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRecord> out(t_grid.size());
  const ComplexMatrix zero = ComplexMatrix::diagonal({1.0, 0.0});
  const ComplexMatrix one = ComplexMatrix::diagonal({0.0, 1.0});

  parallel_for(t_grid.size(), opts.workers, [&](std::size_t i) {
    const double t = t_grid[i];
    const Channel c1 = evaluate(map1, t);
    const Channel c2 = evaluate(map2, t);
    SweepRecord rec{t, nan, nan, nan, {}, false};
    if (opts.generic) {
      const auto r = robustness(c1, c2, NoiseClass::generic, opts.robustness);
      rec.r_generic = r.r_star;
      rec.indeterminate = rec.indeterminate || r.indeterminate;
    }
    if (opts.cd) {
      const auto r = robustness(c1, c2, NoiseClass::completely_depolarizing, opts.robustness);
      rec.r_cd = r.r_star;
      rec.indeterminate = rec.indeterminate || r.indeterminate;
    }
    if (c2.din() == 2) rec.trace_distance = trace_distance(apply(c2, zero), apply(c2, one));
    out[i] = std::move(rec);
  });
  return out;
}

double dynamical_map_robustness(const DynamicalMap& map1, const DynamicalMap& map2, const std::vector<double>& t_grid,
                                NoiseClass noise, const RobustnessOptions& opts, unsigned workers) {
  SweepOptions so;
  so.generic = noise == NoiseClass::generic;
  so.cd = !so.generic;
  so.robustness = opts;
  so.workers = workers;
  double best = 0.0;
  for (const auto& rec : sweep(map1, map2, t_grid, so)) best = std::max(best, so.generic ? rec.r_generic : rec.r_cd);
  return best;
}

}  // namespace qcompat
