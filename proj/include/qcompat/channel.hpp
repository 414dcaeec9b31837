#pragma once

// Quantum channels in the Choi picture, POVMs, and the closed-form qubit
// dynamical-map families.

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcompat/linalg.hpp"

namespace qcompat {

inline constexpr double kChannelTol = 1e-9;

/// CPTP map stored as its unnormalized Choi matrix
///   C = sum_ij |i><j| (x) L(|i><j|),   subsystem order in (x) out.
/// Construction validates complete positivity and trace preservation.
class Channel {
 public:
  Channel(std::size_t din, std::size_t dout, ComplexMatrix choi, double tol = kChannelTol);

  static Channel identity(std::size_t d);
  /// rho -> Tr(rho) eta for every input.
  static Channel completely_depolarizing(const ComplexMatrix& eta, std::size_t din);
  static Channel from_kraus(std::span<const ComplexMatrix> kraus);

  std::size_t din() const { return din_; }
  std::size_t dout() const { return dout_; }
  const ComplexMatrix& choi() const { return choi_; }
  SubsystemShape shape() const { return SubsystemShape{din_, dout_}; }

 private:
  std::size_t din_;
  std::size_t dout_;
  ComplexMatrix choi_;
};

/// L(rho) = Tr_in[(rho^T (x) 1) C].
ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho);
/// Heisenberg-picture action: Tr[rho L*(E)] = Tr[L(rho) E].
ComplexMatrix dual_apply(const Channel& ch, const ComplexMatrix& effect);
/// Choi matrix of after o before.
Channel compose(const Channel& after, const Channel& before);
/// (1 (x) L) on a bipartite operator whose second factor is the channel input.
ComplexMatrix apply_second(const Channel& ch, const ComplexMatrix& bipartite, std::size_t first_dim);
/// (C1 + r C2)/(1 + r).
Channel mix(const Channel& base, const Channel& noise, double r);

/// rho -> w rho + (1 - w) 1/2; completely positive for -1/3 <= w <= 1.
Channel depolarizing_choi(double w);
/// Amplitude damping with decay probability w in [0, 1]: |1><1| -> w|0><0| + (1-w)|1><1|.
Channel amplitude_damping_choi(double w);
/// Population factor A(t) = (1 + e^{-2t})/2 of the eternal map.
double eternal_population(double t);
/// Coherence factor B(t) = exp(-int_0^t (1 - tanh x) dx) = e^{-t} cosh t.
double eternal_coherence(double t);
Channel eternal_choi(double t);

enum class Family {
  identity,
  depolarizing,              // w(t) = e^{-lambda t}
  depolarizing_oscillating,  // w(t) = e^{-lambda t} cos^2(omega t)
  amplitude_damping,         // w(t) = 1 - e^{-alpha t} cos^2(omega t)
  eternal,
  constant,                  // user-supplied channel, same for every t
};

/// Named time-parametrized family t -> Channel.
class DynamicalMap {
 public:
  static DynamicalMap identity(std::size_t d = 2);
  static DynamicalMap depolarizing(double lambda);
  static DynamicalMap depolarizing_oscillating(double lambda, double omega);
  static DynamicalMap amplitude_damping(double alpha, double omega);
  static DynamicalMap eternal();
  static DynamicalMap constant(Channel channel, std::string label = "custom");

  Family family() const { return family_; }
  double lambda() const { return lambda_; }
  double omega() const { return omega_; }
  double alpha() const { return alpha_; }
  std::size_t dim() const;
  const std::string& label() const { return label_; }
  /// Angular frequency of the cos^2 modulation, if the family has one.
  std::optional<double> oscillation() const;
  /// Closed-form w(t) of the depolarizing and amplitude-damping families.
  std::optional<double> shrink(double t) const;

 private:
  explicit DynamicalMap(Family f) : family_(f) {}

  Family family_;
  double lambda_ = 0.0;
  double omega_ = 0.0;
  double alpha_ = 0.0;
  std::size_t dim_ = 2;
  std::optional<Channel> fixed_;
  std::string label_;

  friend Channel evaluate(const DynamicalMap& map, double t);
};

Channel evaluate(const DynamicalMap& map, double t);

/// Parameters for the family-name parser; unset values take the defaults
/// lambda = 0.5, omega = 5 pi, alpha = 0.5.
struct FamilyParams {
  std::optional<double> lambda;
  std::optional<double> omega;
  std::optional<double> alpha;
};

/// Accepts identity, depolarizing, depolarizing-indiv, amplitude-damping,
/// eternal (underscores also accepted). Throws DomainError otherwise.
DynamicalMap parse_family(std::string_view name, const FamilyParams& params = {});

/// Set of PSD effects summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> effects, double tol = 1e-10);

  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  std::size_t outcomes() const { return effects_.size(); }
  std::size_t dim() const { return effects_.front().rows(); }

  /// Two-outcome projective measurement {|psi><psi|, 1 - |psi><psi|}.
  static Povm projective(std::span<const complex> psi);
  static Povm computational_basis(std::size_t d);
  static Povm trivial(std::size_t d);

 private:
  std::vector<ComplexMatrix> effects_;
};

/// Pushes every effect through the dual map.
Povm dual_apply(const Channel& ch, const Povm& m);

/// Random CPTP map: Ginibre Choi matrix normalized on the input marginal.
Channel random_channel(std::mt19937_64& rng, std::size_t din, std::size_t dout);
/// Haar-random unit vector.
std::vector<complex> random_state_vector(std::mt19937_64& rng, std::size_t d);
/// Random full-rank density matrix (Ginibre).
ComplexMatrix random_density(std::mt19937_64& rng, std::size_t d);

/// {"din", "dout", "choi_re": [[...]], "choi_im": [[...]]}
Channel channel_from_json(std::string_view text);
std::string channel_to_json(const Channel& ch);
Channel load_channel(const std::string& path);

}  // namespace qcompat
