#include "qcompat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace qcompat {

namespace {

void check_choi(std::size_t din, std::size_t dout, const ComplexMatrix& choi, double tol) {
  if (din == 0 || dout == 0) throw DimensionError("channel dimensions must be positive");
  if (choi.rows() != din * dout || choi.cols() != din * dout)
    throw DimensionError("Choi matrix must be (din*dout) x (din*dout)");
  if (!choi.hermitian(tol)) throw DomainError("Choi matrix is not Hermitian");
  if (min_eigenvalue(choi) < -tol) throw DomainError("Choi matrix is not positive semidefinite (map not CP)");
  const ComplexMatrix marginal = partial_trace(choi, SubsystemShape{din, dout}, {0});
  if (max_abs_diff(marginal, ComplexMatrix::identity(din)) > tol)
    throw DomainError("Choi matrix input marginal is not the identity (map not TP)");
}

ComplexMatrix unit(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix e(d, d);
  e(i, j) = 1.0;
  return e;
}

template <class Map>
ComplexMatrix choi_of(std::size_t din, Map&& map) {
  ComplexMatrix probe = map(unit(din, 0, 0));
  const std::size_t dout = probe.rows();
  ComplexMatrix c(din * dout, din * dout);
  for (std::size_t i = 0; i < din; ++i)
    for (std::size_t j = 0; j < din; ++j) {
      const ComplexMatrix out = (i == 0 && j == 0) ? probe : map(unit(din, i, j));
      for (std::size_t a = 0; a < dout; ++a)
        for (std::size_t b = 0; b < dout; ++b) c(i * dout + a, j * dout + b) = out(a, b);
    }
  return c;
}

}  // namespace

Channel::Channel(std::size_t din, std::size_t dout, ComplexMatrix choi, double tol)
    : din_(din), dout_(dout), choi_(std::move(choi)) {
  check_choi(din_, dout_, choi_, tol);
  choi_ = choi_.hermitian_part();
}

Channel Channel::identity(std::size_t d) {
  ComplexMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) c(i * d + i, j * d + j) = 1.0;
  return Channel(d, d, std::move(c));
}

Channel Channel::completely_depolarizing(const ComplexMatrix& eta, std::size_t din) {
  return Channel(din, eta.rows(), kron(ComplexMatrix::identity(din), eta));
}

Channel Channel::from_kraus(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("from_kraus: no Kraus operators");
  const std::size_t din = kraus.front().cols();
  const std::size_t dout = kraus.front().rows();
  for (const auto& k : kraus)
    if (k.cols() != din || k.rows() != dout) throw DimensionError("from_kraus: inconsistent Kraus shapes");
  auto c = choi_of(din, [&](const ComplexMatrix& x) {
    ComplexMatrix y(dout, dout);
    for (const auto& k : kraus) y += k * x * k.adjoint();
    return y;
  });
  return Channel(din, dout, std::move(c));
}

ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho) {
  const std::size_t din = ch.din(), dout = ch.dout();
  if (rho.rows() != din || rho.cols() != din) throw DimensionError("apply: state dimension does not match channel input");
  const ComplexMatrix& c = ch.choi();
  ComplexMatrix out(dout, dout);
  for (std::size_t i = 0; i < din; ++i)
    for (std::size_t j = 0; j < din; ++j) {
      const complex rij = rho(i, j);
      if (rij == complex(0.0)) continue;
      for (std::size_t a = 0; a < dout; ++a)
        for (std::size_t b = 0; b < dout; ++b) out(a, b) += rij * c(i * dout + a, j * dout + b);
    }
  return out;
}

ComplexMatrix dual_apply(const Channel& ch, const ComplexMatrix& effect) {
  const std::size_t din = ch.din(), dout = ch.dout();
  if (effect.rows() != dout || effect.cols() != dout)
    throw DimensionError("dual_apply: effect dimension does not match channel output");
  const ComplexMatrix& c = ch.choi();
  // L*(E)_{ji} = Tr[L(|i><j|) E]
  ComplexMatrix out(din, din);
  for (std::size_t i = 0; i < din; ++i)
    for (std::size_t j = 0; j < din; ++j) {
      complex s = 0.0;
      for (std::size_t a = 0; a < dout; ++a)
        for (std::size_t b = 0; b < dout; ++b) s += c(i * dout + a, j * dout + b) * effect(b, a);
      out(j, i) = s;
    }
  return out;
}

Channel compose(const Channel& after, const Channel& before) {
  if (after.din() != before.dout()) throw DimensionError("compose: intermediate dimensions differ");
  auto c = choi_of(before.din(), [&](const ComplexMatrix& x) { return apply(after, apply(before, x)); });
  return Channel(before.din(), after.dout(), std::move(c));
}

ComplexMatrix apply_second(const Channel& ch, const ComplexMatrix& bipartite, std::size_t first_dim) {
  const std::size_t din = ch.din(), dout = ch.dout();
  if (bipartite.rows() != first_dim * din || bipartite.cols() != first_dim * din)
    throw DimensionError("apply_second: operator dimension does not match first_dim * din");
  ComplexMatrix out(first_dim * dout, first_dim * dout);
  for (std::size_t a = 0; a < first_dim; ++a)
    for (std::size_t b = 0; b < first_dim; ++b) {
      ComplexMatrix block(din, din);
      for (std::size_t i = 0; i < din; ++i)
        for (std::size_t j = 0; j < din; ++j) block(i, j) = bipartite(a * din + i, b * din + j);
      const ComplexMatrix mapped = apply(ch, block);
      for (std::size_t i = 0; i < dout; ++i)
        for (std::size_t j = 0; j < dout; ++j) out(a * dout + i, b * dout + j) = mapped(i, j);
    }
  return out;
}

Channel mix(const Channel& base, const Channel& noise, double r) {
  if (base.din() != noise.din() || base.dout() != noise.dout()) throw DimensionError("mix: channel shapes differ");
  if (r < 0) throw DomainError("mix: weight must be non-negative");
  return Channel(base.din(), base.dout(), (base.choi() + r * noise.choi()) * (1.0 / (1.0 + r)));
}

Channel depolarizing_choi(double w) {
  if (!(w >= -1.0 / 3.0 - 1e-15 && w <= 1.0 + 1e-15))
    throw DomainError("depolarizing_choi: w outside the CP range [-1/3, 1]");
  ComplexMatrix c = ComplexMatrix::diagonal({(1 + w) / 2, (1 - w) / 2, (1 - w) / 2, (1 + w) / 2});
  c(0, 3) = w;
  c(3, 0) = w;
  return Channel(2, 2, std::move(c));
}

Channel amplitude_damping_choi(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("amplitude_damping_choi: w outside [0, 1]");
  const double coh = std::sqrt(1.0 - w);
  ComplexMatrix c = ComplexMatrix::diagonal({1.0, 0.0, w, 1.0 - w});
  c(0, 3) = coh;
  c(3, 0) = coh;
  return Channel(2, 2, std::move(c));
}

double eternal_population(double t) { return 0.5 * (1.0 + std::exp(-2.0 * t)); }

double eternal_coherence(double t) {
  // int_0^t (1 - tanh x) dx = t - ln cosh t
  return std::exp(-t) * std::cosh(t);
}

Channel eternal_choi(double t) {
  if (!(t >= 0.0)) throw DomainError("eternal_choi: t must be non-negative");
  const double a = eternal_population(t);
  const double b = eternal_coherence(t);
  ComplexMatrix c = ComplexMatrix::diagonal({a, 1.0 - a, 1.0 - a, a});
  c(0, 3) = b;
  c(3, 0) = b;
  return Channel(2, 2, std::move(c));
}

DynamicalMap DynamicalMap::identity(std::size_t d) {
  DynamicalMap m(Family::identity);
  m.dim_ = d;
  m.label_ = "identity";
  return m;
}

DynamicalMap DynamicalMap::depolarizing(double lambda) {
  DynamicalMap m(Family::depolarizing);
  m.lambda_ = lambda;
  m.label_ = "depolarizing";
  return m;
}

DynamicalMap DynamicalMap::depolarizing_oscillating(double lambda, double omega) {
  DynamicalMap m(Family::depolarizing_oscillating);
  m.lambda_ = lambda;
  m.omega_ = omega;
  m.label_ = "depolarizing-indiv";
  return m;
}

DynamicalMap DynamicalMap::amplitude_damping(double alpha, double omega) {
  DynamicalMap m(Family::amplitude_damping);
  m.alpha_ = alpha;
  m.omega_ = omega;
  m.label_ = "amplitude-damping";
  return m;
}

DynamicalMap DynamicalMap::eternal() {
  DynamicalMap m(Family::eternal);
  m.label_ = "eternal";
  return m;
}

DynamicalMap DynamicalMap::constant(Channel channel, std::string label) {
  if (channel.din() != channel.dout()) throw DimensionError("constant map needs din == dout");
  DynamicalMap m(Family::constant);
  m.dim_ = channel.din();
  m.fixed_ = std::move(channel);
  m.label_ = std::move(label);
  return m;
}

std::size_t DynamicalMap::dim() const { return dim_; }

std::optional<double> DynamicalMap::oscillation() const {
  if (family_ == Family::depolarizing_oscillating || family_ == Family::amplitude_damping) return omega_;
  return std::nullopt;
}

std::optional<double> DynamicalMap::shrink(double t) const {
  switch (family_) {
    case Family::depolarizing:
      return std::exp(-lambda_ * t);
    case Family::depolarizing_oscillating: {
      const double c = std::cos(omega_ * t);
      return std::exp(-lambda_ * t) * c * c;
    }
    case Family::amplitude_damping: {
      const double c = std::cos(omega_ * t);
      return 1.0 - std::exp(-alpha_ * t) * c * c;
    }
    default:
      return std::nullopt;
  }
}

Channel evaluate(const DynamicalMap& map, double t) {
  if (!(t >= 0.0)) throw DomainError("evaluate: t must be non-negative");
  switch (map.family_) {
    case Family::identity:
      return Channel::identity(map.dim_);
    case Family::depolarizing:
    case Family::depolarizing_oscillating:
      return depolarizing_choi(*map.shrink(t));
    case Family::amplitude_damping:
      return amplitude_damping_choi(std::clamp(*map.shrink(t), 0.0, 1.0));
    case Family::eternal:
      return eternal_choi(t);
    case Family::constant:
      return *map.fixed_;
  }
  throw DomainError("evaluate: unknown dynamical-map family");
}

DynamicalMap parse_family(std::string_view name, const FamilyParams& params) {
  std::string key(name);
  for (char& ch : key)
    if (ch == '_') ch = '-';
  const double lambda = params.lambda.value_or(0.5);
  const double omega = params.omega.value_or(5.0 * std::numbers::pi);
  const double alpha = params.alpha.value_or(0.5);
  if (key == "identity") return DynamicalMap::identity();
  if (key == "depolarizing" || key == "depolarizing-div") return DynamicalMap::depolarizing(lambda);
  if (key == "depolarizing-indiv") return DynamicalMap::depolarizing_oscillating(lambda, omega);
  if (key == "amplitude-damping") return DynamicalMap::amplitude_damping(alpha, omega);
  if (key == "eternal") return DynamicalMap::eternal();
  throw DomainError("unknown dynamical-map family '" + std::string(name) + "'");
}

Povm::Povm(std::vector<ComplexMatrix> effects, double tol) : effects_(std::move(effects)) {
  if (effects_.empty()) throw DimensionError("POVM needs at least one effect");
  const std::size_t d = effects_.front().rows();
  ComplexMatrix sum(d, d);
  for (auto& e : effects_) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("POVM effects have inconsistent dimensions");
    if (!e.hermitian(tol)) throw DomainError("POVM effect is not Hermitian");
    e = e.hermitian_part();
    if (min_eigenvalue(e) < -tol) throw DomainError("POVM effect is not positive semidefinite");
    sum += e;
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > tol) throw DomainError("POVM effects do not sum to identity");
}

Povm Povm::projective(std::span<const complex> psi) {
  const ComplexMatrix p = ComplexMatrix::outer(psi);
  return Povm({p, ComplexMatrix::identity(psi.size()) - p});
}

Povm Povm::computational_basis(std::size_t d) {
  std::vector<ComplexMatrix> effects;
  for (std::size_t i = 0; i < d; ++i) effects.push_back(unit(d, i, i));
  return Povm(std::move(effects));
}

Povm Povm::trivial(std::size_t d) { return Povm({ComplexMatrix::identity(d)}); }

Povm dual_apply(const Channel& ch, const Povm& m) {
  std::vector<ComplexMatrix> effects;
  effects.reserve(m.outcomes());
  for (const auto& e : m.effects()) effects.push_back(dual_apply(ch, e).hermitian_part());
  return Povm(std::move(effects), 1e-9);
}

Channel random_channel(std::mt19937_64& rng, std::size_t din, std::size_t dout) {
  std::normal_distribution<double> g;
  const std::size_t n = din * dout;
  ComplexMatrix gin(n, n);
  for (auto& z : gin.entries()) z = complex(g(rng), g(rng));
  const ComplexMatrix p = (gin * gin.adjoint()).hermitian_part();
  const ComplexMatrix marginal = partial_trace(p, SubsystemShape{din, dout}, {0}).hermitian_part();
  const ComplexMatrix inv_sqrt = hermitian_function(marginal, [](double l) { return 1.0 / std::sqrt(l); });
  const ComplexMatrix s = kron(inv_sqrt, ComplexMatrix::identity(dout));
  return Channel(din, dout, (s * p * s).hermitian_part());
}

std::vector<complex> random_state_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<complex> v(d);
  double norm = 0.0;
  for (auto& z : v) {
    z = complex(g(rng), g(rng));
    norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  for (auto& z : v) z /= norm;
  return v;
}

ComplexMatrix random_density(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  ComplexMatrix gin(d, d);
  for (auto& z : gin.entries()) z = complex(g(rng), g(rng));
  ComplexMatrix rho = (gin * gin.adjoint()).hermitian_part();
  return rho * (1.0 / rho.trace().real());
}

Channel channel_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("channel JSON: ") + e.what());
  }
  try {
    const auto din = j.at("din").get<std::size_t>();
    const auto dout = j.at("dout").get<std::size_t>();
    const auto re = j.at("choi_re").get<std::vector<std::vector<double>>>();
    const std::size_t n = din * dout;
    std::vector<std::vector<double>> im = j.contains("choi_im")
                                              ? j.at("choi_im").get<std::vector<std::vector<double>>>()
                                              : std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0));
    if (re.size() != n || im.size() != n) throw DimensionError("channel JSON: choi arrays must have din*dout rows");
    ComplexMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (re[i].size() != n || im[i].size() != n)
        throw DimensionError("channel JSON: choi arrays must have din*dout columns");
      for (std::size_t k = 0; k < n; ++k) c(i, k) = complex(re[i][k], im[i][k]);
    }
    return Channel(din, dout, std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("channel JSON: ") + e.what());
  }
}

std::string channel_to_json(const Channel& ch) {
  const std::size_t n = ch.choi().rows();
  std::vector<std::vector<double>> re(n, std::vector<double>(n)), im(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      re[i][k] = ch.choi()(i, k).real();
      im[i][k] = ch.choi()(i, k).imag();
    }
  nlohmann::json j{{"din", ch.din()}, {"dout", ch.dout()}, {"choi_re", re}, {"choi_im", im}};
  return j.dump();
}

Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open channel file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return channel_from_json(buf.str());
}

}  // namespace qcompat
