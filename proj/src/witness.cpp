#include "qcompat/witness.hpp"

#include <cmath>
#include <numbers>

namespace qcompat {

std::vector<CurvePoint> blp_curve(const DynamicalMap& map, const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                                  const std::vector<double>& t_grid) {
  if (rho1.rows() != map.dim() || rho2.rows() != map.dim())
    throw DimensionError("blp_curve: states do not match the map dimension");
  std::vector<CurvePoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Channel ch = evaluate(map, t);
    out.push_back({t, trace_distance(apply(ch, rho1), apply(ch, rho2))});
  }
  return out;
}

TeleportResult teleport_fidelity(const DynamicalMap& map, double t) {
  if (map.dim() != 2) throw DimensionError("teleport_fidelity needs a qubit map");
  const double s = 1.0 / std::numbers::sqrt2;
  const std::vector<complex> singlet{0.0, s, -s, 0.0};
  const ComplexMatrix state = apply_second(evaluate(map, t), ComplexMatrix::outer(singlet), 2);

  const ComplexMatrix paulis[3] = {pauli::x(), pauli::y(), pauli::z()};
  ComplexMatrix corr(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) corr(i, j) = (state * kron(paulis[i], paulis[j])).trace().real();
  const double n = trace_norm(corr);
  return {n, n > 1.0 ? 0.5 * (1.0 + n / 3.0) : 2.0 / 3.0};
}

std::vector<std::pair<double, double>> rising_segments(const std::vector<CurvePoint>& curve, double deadband) {
  std::vector<std::pair<double, double>> segs;
  bool open = false;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const bool up = curve[i + 1].value - curve[i].value > deadband;
    if (up && !open) {
      segs.emplace_back(curve[i].t, curve[i + 1].t);
      open = true;
    } else if (up) {
      segs.back().second = curve[i + 1].t;
    } else {
      open = false;
    }
  }
  return segs;
}

IndivisibilityReport indivisibility_from_curve(const std::vector<CurvePoint>& curve, const IndivisibilityOptions& opts) {
  if (curve.size() < 3) throw DomainError("indivisibility measure needs at least 3 grid points");
  IndivisibilityReport rep;
  rep.curve = curve;
  rep.rising_segments = rising_segments(curve, opts.deadband);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double step = curve[i + 1].value - curve[i].value;
    if (step <= opts.deadband) continue;
    total += opts.integrate_derivative ? step
                                       : 0.5 * (curve[i].value + curve[i + 1].value) * (curve[i + 1].t - curve[i].t);
  }
  rep.n_raw = total;
  rep.n_normalized = total / (1.0 + total);
  return rep;
}

namespace {

void check_sampling(const DynamicalMap& m, const std::vector<double>& t_grid, double min_points) {
  const auto omega = m.oscillation();
  if (!omega || *omega == 0.0 || t_grid.size() < 2) return;
  const double step = (t_grid.back() - t_grid.front()) / static_cast<double>(t_grid.size() - 1);
  const double period = std::numbers::pi / std::abs(*omega);
  if (period / step < min_points)
    throw DomainError("time grid too coarse for the oscillation of " + m.label());
}

}  // namespace

IndivisibilityReport cp_indivisibility_measure(const DynamicalMap& map, const DynamicalMap& reference,
                                               const std::vector<double>& t_grid, NoiseClass noise,
                                               const RobustnessOptions& robustness, const IndivisibilityOptions& opts,
                                               unsigned workers) {
  if (t_grid.size() < 3) throw DomainError("indivisibility measure needs at least 3 grid points");
  check_sampling(map, t_grid, opts.min_points_per_period);
  check_sampling(reference, t_grid, opts.min_points_per_period);

  SweepOptions so;
  so.generic = noise == NoiseClass::generic;
  so.cd = !so.generic;
  so.robustness = robustness;
  so.workers = workers;
  std::vector<CurvePoint> curve;
  for (const auto& rec : sweep(reference, map, t_grid, so)) curve.push_back({rec.t, so.generic ? rec.r_generic : rec.r_cd});

  IndivisibilityReport rep = indivisibility_from_curve(curve, opts);
  rep.reference = reference.label();
  return rep;
}

}  // namespace qcompat
