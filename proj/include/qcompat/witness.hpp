#pragma once

// Witnesses of non-Markovian dynamics: trace-distance curves, teleportation
// fidelity, and the CP-indivisibility measure built from robustness curves.

#include <string>
#include <utility>
#include <vector>

#include "qcompat/channel.hpp"
#include "qcompat/robustness.hpp"

namespace qcompat {

struct CurvePoint {
  double t;
  double value;
};

/// D(L_t(rho1), L_t(rho2)) on the grid.
std::vector<CurvePoint> blp_curve(const DynamicalMap& map, const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                                  const std::vector<double>& t_grid);

struct TeleportResult {
  double n_value;  // trace norm of the correlation matrix
  double f_max;
};

/// Horodecki bound for the state (1 x L_t)(|psi-><psi-|).
TeleportResult teleport_fidelity(const DynamicalMap& map, double t);

struct IndivisibilityOptions {
  double deadband = 2e-3;
  /// Sum the increments over each segment instead of integrating r(t).
  bool integrate_derivative = false;
  /// Minimum samples per period of an oscillating family.
  double min_points_per_period = 10.0;
};

struct IndivisibilityReport {
  double n_raw = 0.0;
  double n_normalized = 0.0;
  std::vector<std::pair<double, double>> rising_segments;
  std::string reference;
  std::vector<CurvePoint> curve;
};

/// Maximal runs of grid steps whose increment exceeds the dead-band.
std::vector<std::pair<double, double>> rising_segments(const std::vector<CurvePoint>& curve, double deadband);

/// Measure from an already computed robustness curve.
IndivisibilityReport indivisibility_from_curve(const std::vector<CurvePoint>& curve,
                                               const IndivisibilityOptions& opts = {});

/// Robustness of (reference_t, map_t) along the grid, then the measure.
IndivisibilityReport cp_indivisibility_measure(const DynamicalMap& map, const DynamicalMap& reference,
                                               const std::vector<double>& t_grid, NoiseClass noise,
                                               const RobustnessOptions& robustness = {},
                                               const IndivisibilityOptions& opts = {}, unsigned workers = 1);

}  // namespace qcompat
