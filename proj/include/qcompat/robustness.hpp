#pragma once

// Incompatibility robustness of channel pairs and measurement pairs, and
// sweeps of it along dynamical maps.

#include <cstddef>
#include <string>
#include <vector>

#include "qcompat/channel.hpp"
#include "qcompat/sdp.hpp"

namespace qcompat {

enum class NoiseClass { generic, completely_depolarizing };

const char* to_string(NoiseClass n);

enum class SearchMethod { grid, grid_plus_bisection };

/// How grid points are visited. Both give the same answer whenever
/// compatibility is upward closed in r, which holds for both noise classes.
enum class GridScan { bisection, linear };

struct RobustnessOptions {
  double dr = 0.005;
  bool refine = false;
  double refine_width = 1e-5;
  /// Upper end of the grid. Robustness never exceeds 1.
  double r_max = 1.0;
  GridScan scan = GridScan::bisection;
  /// q >= -feasibility_tol counts as compatible.
  double feasibility_tol = 1e-6;
  SdpSettings solver;
};

struct Probe {
  double r;
  double q;
  bool indeterminate;
};

struct RobustnessResult {
  double r_star = 0.0;
  double q_at_r_star = 0.0;
  std::vector<Probe> search_trace;
  SearchMethod method = SearchMethod::grid;
  /// Some probe failed to converge even after the retry.
  bool indeterminate = false;
};

struct FeasibilityResult {
  double q;
  SdpStatus status;
  int iterations;
};

/// max q such that the noisy pair ((C1 + r N1)/(1+r), (C2 + r N2)/(1+r))
/// admits a joint channel whose Choi matrix dominates q * 1. Compatible iff q >= 0.
FeasibilityResult feasibility_q(const Channel& ch1, const Channel& ch2, double r, NoiseClass noise,
                                const SdpSettings& settings = {});
/// Same for POVMs. Generic noise is any POVM; completely_depolarizing noise
/// is a trivial POVM {p_i 1}, the dual image of a completely depolarizing channel.
FeasibilityResult measurement_feasibility_q(const Povm& m1, const Povm& m2, double r,
                                            NoiseClass noise = NoiseClass::generic, const SdpSettings& settings = {});

/// The SDP solved by feasibility_q, exposed for dumping and cross-checks.
SdpProblem feasibility_problem(const Channel& ch1, const Channel& ch2, double r, NoiseClass noise);
SdpProblem measurement_feasibility_problem(const Povm& m1, const Povm& m2, double r,
                                           NoiseClass noise = NoiseClass::generic);

RobustnessResult robustness(const Channel& ch1, const Channel& ch2, NoiseClass noise,
                            const RobustnessOptions& opts = {});
RobustnessResult measurement_robustness(const Povm& m1, const Povm& m2, NoiseClass noise = NoiseClass::generic,
                                        const RobustnessOptions& opts = {});

struct SweepOptions {
  bool generic = true;
  bool cd = true;
  RobustnessOptions robustness;
  unsigned workers = 1;
};

struct SweepRecord {
  double t;
  double r_generic;  // NaN when the noise class was not requested
  double r_cd;
  double trace_distance;  // between map2 outputs of |0><0| and |1><1|
  std::vector<std::pair<std::string, double>> extras;
  bool indeterminate = false;
};

/// One record per grid time, in grid order regardless of worker count.
std::vector<SweepRecord> sweep(const DynamicalMap& map1, const DynamicalMap& map2, const std::vector<double>& t_grid,
                               const SweepOptions& opts);

/// max over the grid of the per-time robustness.
double dynamical_map_robustness(const DynamicalMap& map1, const DynamicalMap& map2,
                                const std::vector<double>& t_grid, NoiseClass noise,
                                const RobustnessOptions& opts = {}, unsigned workers = 1);

/// t_min, t_min + step, ... up to t_max (inclusive within half a step of rounding).
std::vector<double> time_grid(double t_min, double t_max, double t_step);

}  // namespace qcompat
