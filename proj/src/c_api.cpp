#include "qcompat/qcompat.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcompat/channel.hpp"
#include "qcompat/figures.hpp"
#include "qcompat/robustness.hpp"
#include "qcompat/validation.hpp"
#include "qcompat/witness.hpp"

using namespace qcompat;

struct qc_channel {
  Channel value;
};

struct qc_map {
  DynamicalMap value;
};

struct qc_sweep {
  std::vector<SweepRecord> records;
  bool teleport;
};

struct qc_indivisibility {
  IndivisibilityReport value;
};

namespace {

thread_local std::string last_error;

qc_status fail(qc_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Maps exceptions escaping the C++ core to status codes.
template <class Fn>
qc_status guard(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const ParseError& e) {
    return fail(QC_ERR_PARSE, e.what());
  } catch (const DimensionError& e) {
    return fail(QC_ERR_DIMENSION, e.what());
  } catch (const DomainError& e) {
    return fail(QC_ERR_DOMAIN, e.what());
  } catch (const IoError& e) {
    return fail(QC_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QC_ERR_INTERNAL, "unknown error");
  }
}

#define QC_REQUIRE(p)                                                   \
  do {                                                                  \
    if (!(p)) return fail(QC_ERR_NULL, "null argument: " #p);           \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

FamilyParams to_params(const qc_family_params* p) {
  FamilyParams out;
  if (!p) return out;
  if (p->has_lambda) out.lambda = p->lambda;
  if (p->has_omega) out.omega = p->omega;
  if (p->has_alpha) out.alpha = p->alpha;
  return out;
}

NoiseClass to_noise(qc_noise n) {
  switch (n) {
    case QC_NOISE_GENERIC:
      return NoiseClass::generic;
    case QC_NOISE_CD:
      return NoiseClass::completely_depolarizing;
  }
  throw DomainError("unknown noise class");
}

RobustnessOptions to_options(const qc_robustness_options* o) {
  qc_robustness_options d;
  qc_robustness_options_default(&d);
  if (!o) o = &d;
  RobustnessOptions out;
  out.dr = o->dr;
  out.refine = o->refine != 0;
  out.scan = o->linear_scan ? GridScan::linear : GridScan::bisection;
  if (o->max_iterations <= 0) throw DomainError("max_iterations must be positive");
  out.solver.max_iterations = o->max_iterations;
  if (!(out.dr > 0.0)) throw DomainError("dr must be positive");
  return out;
}

SweepOptions to_sweep_options(const qc_sweep_options* o) {
  qc_sweep_options d;
  qc_sweep_options_default(&d);
  if (!o) o = &d;
  SweepOptions out;
  out.generic = o->generic != 0;
  out.cd = o->cd != 0;
  out.workers = o->workers == 0 ? 1 : o->workers;
  out.robustness = to_options(&o->robustness);
  return out;
}

void fill_result(const RobustnessResult& r, qc_robustness_result* out) {
  out->r_star = r.r_star;
  out->q_at_r_star = r.q_at_r_star;
  out->probes = r.search_trace.size();
  out->refined = r.method == SearchMethod::grid_plus_bisection;
  out->indeterminate = r.indeterminate;
}

std::vector<ComplexMatrix> effects_from(size_t dim, size_t count, const double* re, const double* im) {
  std::vector<ComplexMatrix> out;
  for (size_t k = 0; k < count; ++k) {
    ComplexMatrix e(dim, dim);
    for (size_t i = 0; i < dim * dim; ++i)
      e(i / dim, i % dim) = complex(re[k * dim * dim + i], im ? im[k * dim * dim + i] : 0.0);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

extern "C" {

const char* qc_version(void) { return "1.0.0"; }

const char* qc_last_error(void) { return last_error.c_str(); }

const char* qc_status_name(qc_status s) {
  switch (s) {
    case QC_OK:
      return "ok";
    case QC_ERR_NULL:
      return "null argument";
    case QC_ERR_DIMENSION:
      return "dimension error";
    case QC_ERR_DOMAIN:
      return "domain error";
    case QC_ERR_IO:
      return "I/O error";
    case QC_ERR_PARSE:
      return "parse error";
    case QC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void qc_string_free(char* s) { delete[] s; }

qc_status qc_channel_from_choi(size_t din, size_t dout, const double* re, const double* im, qc_channel** out) {
  QC_REQUIRE(re);
  QC_REQUIRE(out);
  return guard([&] {
    const size_t n = din * dout;
    ComplexMatrix c(n, n);
    for (size_t i = 0; i < n * n; ++i) c(i / n, i % n) = complex(re[i], im ? im[i] : 0.0);
    *out = new qc_channel{Channel(din, dout, std::move(c))};
    return QC_OK;
  });
}

qc_status qc_channel_from_json(const char* text, qc_channel** out) {
  QC_REQUIRE(text);
  QC_REQUIRE(out);
  return guard([&] {
    *out = new qc_channel{channel_from_json(text)};
    return QC_OK;
  });
}

qc_status qc_channel_load(const char* path, qc_channel** out) {
  QC_REQUIRE(path);
  QC_REQUIRE(out);
  return guard([&] {
    *out = new qc_channel{load_channel(path)};
    return QC_OK;
  });
}

qc_status qc_channel_identity(size_t d, qc_channel** out) {
  QC_REQUIRE(out);
  return guard([&] {
    if (d == 0) throw DimensionError("dimension must be positive");
    *out = new qc_channel{Channel::identity(d)};
    return QC_OK;
  });
}

qc_status qc_channel_to_json(const qc_channel* ch, char** out) {
  QC_REQUIRE(ch);
  QC_REQUIRE(out);
  return guard([&] {
    *out = dup_string(channel_to_json(ch->value));
    return QC_OK;
  });
}

qc_status qc_channel_dims(const qc_channel* ch, size_t* din, size_t* dout) {
  QC_REQUIRE(ch);
  if (din) *din = ch->value.din();
  if (dout) *dout = ch->value.dout();
  return QC_OK;
}

qc_status qc_channel_choi(const qc_channel* ch, double* re, double* im) {
  QC_REQUIRE(ch);
  QC_REQUIRE(re);
  const auto& c = ch->value.choi();
  for (size_t i = 0; i < c.rows(); ++i)
    for (size_t j = 0; j < c.cols(); ++j) {
      re[i * c.cols() + j] = c(i, j).real();
      if (im) im[i * c.cols() + j] = c(i, j).imag();
    }
  return QC_OK;
}

void qc_channel_free(qc_channel* ch) { delete ch; }

qc_status qc_map_from_family(const char* name, const qc_family_params* params, qc_map** out) {
  QC_REQUIRE(name);
  QC_REQUIRE(out);
  return guard([&] {
    *out = new qc_map{parse_family(name, to_params(params))};
    return QC_OK;
  });
}

qc_status qc_map_constant(const qc_channel* ch, const char* label, qc_map** out) {
  QC_REQUIRE(ch);
  QC_REQUIRE(out);
  return guard([&] {
    *out = new qc_map{DynamicalMap::constant(ch->value, label ? label : "custom")};
    return QC_OK;
  });
}

qc_status qc_map_evaluate(const qc_map* map, double t, qc_channel** out) {
  QC_REQUIRE(map);
  QC_REQUIRE(out);
  return guard([&] {
    *out = new qc_channel{evaluate(map->value, t)};
    return QC_OK;
  });
}

const char* qc_map_label(const qc_map* map) { return map ? map->value.label().c_str() : ""; }

void qc_map_free(qc_map* map) { delete map; }

void qc_robustness_options_default(qc_robustness_options* opts) {
  if (!opts) return;
  const RobustnessOptions d;
  opts->dr = d.dr;
  opts->refine = d.refine;
  opts->linear_scan = d.scan == GridScan::linear;
  opts->max_iterations = d.solver.max_iterations;
}

qc_status qc_robustness(const qc_channel* ch1, const qc_channel* ch2, qc_noise noise,
                        const qc_robustness_options* opts, qc_robustness_result* out) {
  QC_REQUIRE(ch1);
  QC_REQUIRE(ch2);
  QC_REQUIRE(out);
  return guard([&] {
    fill_result(robustness(ch1->value, ch2->value, to_noise(noise), to_options(opts)), out);
    return QC_OK;
  });
}

qc_status qc_feasibility_q(const qc_channel* ch1, const qc_channel* ch2, double r, qc_noise noise,
                           int max_iterations, double* q, int* converged) {
  QC_REQUIRE(ch1);
  QC_REQUIRE(ch2);
  QC_REQUIRE(q);
  return guard([&] {
    SdpSettings s;
    if (max_iterations > 0) s.max_iterations = max_iterations;
    const auto f = feasibility_q(ch1->value, ch2->value, r, to_noise(noise), s);
    *q = f.q;
    if (converged) *converged = f.status == SdpStatus::optimal;
    return QC_OK;
  });
}

qc_status qc_feasibility_problem_json(const qc_channel* ch1, const qc_channel* ch2, double r, qc_noise noise,
                                      char** out) {
  QC_REQUIRE(ch1);
  QC_REQUIRE(ch2);
  QC_REQUIRE(out);
  return guard([&] {
    *out = dup_string(feasibility_problem(ch1->value, ch2->value, r, to_noise(noise)).to_json());
    return QC_OK;
  });
}

qc_status qc_measurement_robustness(size_t dim, size_t count1, const double* re1, const double* im1, size_t count2,
                                    const double* re2, const double* im2, qc_noise noise,
                                    const qc_robustness_options* opts, qc_robustness_result* out) {
  QC_REQUIRE(re1);
  QC_REQUIRE(re2);
  QC_REQUIRE(out);
  return guard([&] {
    if (dim == 0 || count1 == 0 || count2 == 0) throw DimensionError("POVMs need a positive dimension and outcome count");
    const Povm m1(effects_from(dim, count1, re1, im1));
    const Povm m2(effects_from(dim, count2, re2, im2));
    fill_result(measurement_robustness(m1, m2, to_noise(noise), to_options(opts)), out);
    return QC_OK;
  });
}

void qc_sweep_options_default(qc_sweep_options* opts) {
  if (!opts) return;
  opts->generic = 1;
  opts->cd = 1;
  opts->teleport = 0;
  opts->workers = 1;
  qc_robustness_options_default(&opts->robustness);
}

qc_status qc_sweep_run(const qc_map* map1, const qc_map* map2, double t_min, double t_max, double t_step,
                       const qc_sweep_options* opts, qc_sweep** out) {
  QC_REQUIRE(map1);
  QC_REQUIRE(map2);
  QC_REQUIRE(out);
  return guard([&] {
    const FigureSpec fig{0, map1->value, map2->value, opts && opts->teleport, "custom"};
    auto records = run_figure(fig, time_grid(t_min, t_max, t_step), to_sweep_options(opts));
    *out = new qc_sweep{std::move(records), fig.teleport_columns};
    return QC_OK;
  });
}

qc_status qc_figure_run(int id, const qc_family_params* params, double t_min, double t_max, double t_step,
                        const qc_sweep_options* opts, qc_sweep** out) {
  QC_REQUIRE(out);
  return guard([&] {
    const FigureSpec fig = figure_spec(id, to_params(params));
    auto records = run_figure(fig, time_grid(t_min, t_max, t_step), to_sweep_options(opts));
    *out = new qc_sweep{std::move(records), fig.teleport_columns};
    return QC_OK;
  });
}

const char* qc_figure_description(int id) {
  static const std::vector<std::string> descriptions = [] {
    std::vector<std::string> out;
    for (int i = 1; i <= kFigureCount; ++i) out.push_back(figure_spec(i).description);
    return out;
  }();
  if (id < 1 || id > kFigureCount) return nullptr;
  return descriptions[static_cast<size_t>(id - 1)].c_str();
}

size_t qc_sweep_size(const qc_sweep* sw) { return sw ? sw->records.size() : 0; }

int qc_sweep_has_teleport(const qc_sweep* sw) { return sw && sw->teleport; }

qc_status qc_sweep_record_at(const qc_sweep* sw, size_t i, qc_sweep_record* out) {
  QC_REQUIRE(sw);
  QC_REQUIRE(out);
  if (i >= sw->records.size()) return fail(QC_ERR_DOMAIN, "sweep record index out of range");
  const auto& r = sw->records[i];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  *out = {r.t, r.r_generic, r.r_cd, r.trace_distance, nan, nan, r.indeterminate};
  for (const auto& [name, value] : r.extras) {
    if (name == "n_value") out->n_value = value;
    if (name == "f_max") out->f_max = value;
  }
  return QC_OK;
}

void qc_sweep_free(qc_sweep* sw) { delete sw; }

qc_status qc_teleport_fidelity(const qc_map* map, double t, double* n_value, double* f_max) {
  QC_REQUIRE(map);
  return guard([&] {
    const auto r = teleport_fidelity(map->value, t);
    if (n_value) *n_value = r.n_value;
    if (f_max) *f_max = r.f_max;
    return QC_OK;
  });
}

void qc_indivisibility_options_default(qc_indivisibility_options* opts) {
  if (!opts) return;
  const IndivisibilityOptions d;
  opts->noise = QC_NOISE_GENERIC;
  opts->deadband = d.deadband;
  opts->integrate_derivative = d.integrate_derivative;
  opts->workers = 1;
  qc_robustness_options_default(&opts->robustness);
}

qc_status qc_indivisibility_run(const qc_map* map, const qc_map* reference, double t_min, double t_max,
                                double t_step, const qc_indivisibility_options* opts, qc_indivisibility** out) {
  QC_REQUIRE(map);
  QC_REQUIRE(reference);
  QC_REQUIRE(out);
  return guard([&] {
    qc_indivisibility_options d;
    qc_indivisibility_options_default(&d);
    if (!opts) opts = &d;
    IndivisibilityOptions io;
    io.deadband = opts->deadband;
    io.integrate_derivative = opts->integrate_derivative != 0;
    if (!(io.deadband >= 0.0)) throw DomainError("deadband must be non-negative");
    *out = new qc_indivisibility{cp_indivisibility_measure(map->value, reference->value,
                                                           time_grid(t_min, t_max, t_step), to_noise(opts->noise),
                                                           to_options(&opts->robustness), io,
                                                           opts->workers == 0 ? 1 : opts->workers)};
    return QC_OK;
  });
}

qc_status qc_indivisibility_values(const qc_indivisibility* rep, double* n_raw, double* n_normalized) {
  QC_REQUIRE(rep);
  if (n_raw) *n_raw = rep->value.n_raw;
  if (n_normalized) *n_normalized = rep->value.n_normalized;
  return QC_OK;
}

size_t qc_indivisibility_segment_count(const qc_indivisibility* rep) {
  return rep ? rep->value.rising_segments.size() : 0;
}

qc_status qc_indivisibility_segment(const qc_indivisibility* rep, size_t i, double* t_start, double* t_end) {
  QC_REQUIRE(rep);
  if (i >= rep->value.rising_segments.size()) return fail(QC_ERR_DOMAIN, "segment index out of range");
  if (t_start) *t_start = rep->value.rising_segments[i].first;
  if (t_end) *t_end = rep->value.rising_segments[i].second;
  return QC_OK;
}

size_t qc_indivisibility_curve_size(const qc_indivisibility* rep) { return rep ? rep->value.curve.size() : 0; }

qc_status qc_indivisibility_curve_point(const qc_indivisibility* rep, size_t i, double* t, double* r) {
  QC_REQUIRE(rep);
  if (i >= rep->value.curve.size()) return fail(QC_ERR_DOMAIN, "curve index out of range");
  if (t) *t = rep->value.curve[i].t;
  if (r) *r = rep->value.curve[i].value;
  return QC_OK;
}

void qc_indivisibility_free(qc_indivisibility* rep) { delete rep; }

size_t qc_check_count(void) { return check_names().size(); }

const char* qc_check_name(size_t i) { return i < check_names().size() ? check_names()[i].c_str() : nullptr; }

const char* qc_default_golden_path(void) {
  static const std::string path = default_golden_path();
  return path.c_str();
}

qc_status qc_validate(const char* golden_path, const char* only, unsigned workers, qc_check_callback cb, void* user,
                      int* all_passed) {
  return guard([&] {
    ValidationOptions opts;
    if (golden_path) opts.golden_path = golden_path;
    if (only) {
      std::stringstream ss(only);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) opts.only.push_back(item);
    }
    opts.workers = workers == 0 ? 1 : workers;
    bool ok = true;
    validate(opts, [&](const CheckOutcome& c) {
      ok = ok && c.passed;
      if (cb) cb(c.name.c_str(), c.passed, c.detail.c_str(), c.seconds, user);
    });
    if (all_passed) *all_passed = ok;
    return QC_OK;
  });
}

}  // extern "C"
