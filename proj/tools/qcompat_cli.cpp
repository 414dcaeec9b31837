// Command-line front end over the C interface of libqcompat.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcompat/qcompat.h"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;

struct Failure {
  int code;
  std::string message;
};

struct Common {
  std::optional<double> lambda, omega, alpha;
  double t_min = 0.0, t_max = 1.0, t_step = 0.01;
  double dr = 0.005;
  std::string noise = "both";
  bool refine = false;
  std::string scan = "bisection";
  std::string output = "-";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

void check(qc_status s) {
  if (s == QC_OK) return;
  const int code = (s == QC_ERR_IO || s == QC_ERR_PARSE) ? kExitIo : kExitUsage;
  throw Failure{code, std::string(qc_status_name(s)) + ": " + qc_last_error()};
}

qc_family_params family_params(const Common& c) {
  qc_family_params p{};
  if (c.lambda) p.lambda = *c.lambda, p.has_lambda = 1;
  if (c.omega) p.omega = *c.omega, p.has_omega = 1;
  if (c.alpha) p.alpha = *c.alpha, p.has_alpha = 1;
  return p;
}

int solver_iterations() {
  const char* env = std::getenv("SOLVER_MAX_ITERS");
  qc_robustness_options d;
  qc_robustness_options_default(&d);
  if (!env || !*env) return d.max_iterations;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0 || v > 1000000000L)
    throw Failure{kExitUsage, "SOLVER_MAX_ITERS must be a positive integer, got '" + std::string(env) + "'"};
  return static_cast<int>(v);
}

qc_robustness_options robustness_options(const Common& c) {
  qc_robustness_options o;
  qc_robustness_options_default(&o);
  o.dr = c.dr;
  o.refine = c.refine;
  o.linear_scan = c.scan == "linear";
  o.max_iterations = solver_iterations();
  return o;
}

qc_sweep_options sweep_options(const Common& c) {
  qc_sweep_options o;
  qc_sweep_options_default(&o);
  o.generic = c.noise != "cd";
  o.cd = c.noise != "generic";
  o.workers = c.workers;
  o.robustness = robustness_options(c);
  return o;
}

void validate_common(const Common& c) {
  if (!(c.t_step > 0.0)) throw Failure{kExitUsage, "--t-step must be positive"};
  if (!(c.t_min >= 0.0)) throw Failure{kExitUsage, "--t-min must be non-negative"};
  if (!(c.t_max >= c.t_min)) throw Failure{kExitUsage, "--t-max must not be below --t-min"};
  if (!(c.dr > 0.0)) throw Failure{kExitUsage, "--dr must be positive"};
  if (c.workers < 1) throw Failure{kExitUsage, "--workers must be at least 1"};
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitIo, "cannot open output file '" + path + "'"};
  out << text;
  if (!out) throw Failure{kExitIo, "write failed for '" + path + "'"};
}

// Writes the CSV and returns the exit status.
int write_sweep(qc_sweep* sw, const std::string& path) {
  const bool teleport = qc_sweep_has_teleport(sw);
  std::string csv = teleport ? "t,r_generic,r_cd,trace_distance,n_value,f_max\n" : "t,r_generic,r_cd,trace_distance\n";
  std::vector<double> bad;
  for (size_t i = 0; i < qc_sweep_size(sw); ++i) {
    qc_sweep_record r;
    check(qc_sweep_record_at(sw, i, &r));
    csv += num(r.t) + ',' + num(r.r_generic) + ',' + num(r.r_cd) + ',' + num(r.trace_distance);
    if (teleport) csv += ',' + num(r.n_value) + ',' + num(r.f_max);
    csv += '\n';
    if (r.indeterminate) bad.push_back(r.t);
  }
  qc_sweep_free(sw);
  emit(path, csv);
  if (bad.empty()) return 0;
  std::string ts;
  for (double t : bad) ts += ' ' + num(t);
  std::cerr << "error: solver did not converge at t =" << ts << " (raise SOLVER_MAX_ITERS)\n";
  return kExitIndeterminate;
}

struct MapHandle {
  qc_map* p = nullptr;
  MapHandle() = default;
  MapHandle(const MapHandle&) = delete;
  MapHandle& operator=(const MapHandle&) = delete;
  ~MapHandle() { qc_map_free(p); }
};

void make_map(const std::string& family, const std::string& choi, const Common& c, MapHandle& out) {
  if (!choi.empty()) {
    qc_channel* ch = nullptr;
    check(qc_channel_load(choi.c_str(), &ch));
    const qc_status s = qc_map_constant(ch, choi.c_str(), &out.p);
    qc_channel_free(ch);
    check(s);
    return;
  }
  const qc_family_params p = family_params(c);
  check(qc_map_from_family(family.c_str(), &p, &out.p));
}

void add_common(CLI::App* app, Common& c, bool noise_both = true) {
  app->add_option("--lambda", c.lambda, "decay rate of the depolarizing families (default 0.5)");
  app->add_option("--omega", c.omega, "angular frequency of the oscillating families (default 5 pi)");
  app->add_option("--alpha", c.alpha, "decay rate of amplitude damping (default 0.5)");
  app->add_option("--t-min", c.t_min, "first time point")->capture_default_str();
  app->add_option("--t-max", c.t_max, "last time point")->capture_default_str();
  app->add_option("--t-step", c.t_step, "time step")->capture_default_str();
  app->add_option("--dr", c.dr, "robustness grid step")->capture_default_str();
  if (noise_both)
    app->add_option("--noise", c.noise, "noise class")
        ->check(CLI::IsMember({"generic", "cd", "both"}))
        ->capture_default_str();
  else {
    c.noise = "generic";
    app->add_option("--noise", c.noise, "noise class")->check(CLI::IsMember({"generic", "cd"}))->capture_default_str();
  }
  app->add_flag("--refine", c.refine, "bisect each bracketing grid cell down to width 1e-5");
  app->add_option("--scan", c.scan, "grid visiting order")
      ->check(CLI::IsMember({"bisection", "linear"}))
      ->capture_default_str();
  app->add_option("-o,--output", c.output, "output file, - for stdout")->capture_default_str();
  app->add_option("--workers", c.workers, "parallel sweep workers")->check(CLI::PositiveNumber);
}

void print_check(const char* name, int passed, const char* detail, double seconds, void*) {
  std::printf("%-18s %s %7.1fs  %s\n", name, passed ? "PASS" : "FAIL", seconds, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incompatibility robustness of quantum channels along dynamical maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qc_version());

  Common sweep_c;
  std::string family, family2, choi, choi2;
  bool teleport = false;
  auto* sweep = app.add_subcommand("sweep", "robustness of a map pair over a time grid, as CSV");
  sweep->add_option("--family", family, "first dynamical map")->required();
  sweep->add_option("--family2", family2, "second dynamical map (default: same as --family)");
  sweep->add_option("--choi", choi, "JSON channel used as a constant first map")->check(CLI::ExistingFile);
  sweep->add_option("--choi2", choi2, "JSON channel used as a constant second map")->check(CLI::ExistingFile);
  sweep->add_flag("--teleport", teleport, "add n_value and f_max of the second map");
  add_common(sweep, sweep_c);

  Common fig_c;
  int fig_id = 0;
  auto* figure = app.add_subcommand("figure", "CSV series of one of the seven reference plots");
  figure->add_option("--id", fig_id, "figure number")->required()->check(CLI::Range(1, 7));
  add_common(figure, fig_c);

  Common meas_c;
  std::string meas_family, reference = "identity", curve_path;
  double deadband = 2e-3;
  bool derivative = false;
  auto* measure = app.add_subcommand("measure", "CP-indivisibility measure against a reference map");
  measure->add_option("--family", meas_family, "dynamical map")->required();
  measure->add_option("--reference", reference, "reference map")->capture_default_str();
  measure->add_option("--deadband", deadband, "minimum increment that opens a rising segment")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  measure->add_flag("--integrate-derivative", derivative, "sum the increments instead of integrating r(t)");
  measure->add_option("--curve", curve_path, "also write the robustness curve as CSV");
  add_common(measure, meas_c, false);

  Common tel_c;
  std::string tel_family = "depolarizing-indiv";
  auto* tele = app.add_subcommand("teleport", "teleportation fidelity bound along a map, as CSV");
  tele->add_option("--family", tel_family, "dynamical map")->capture_default_str();
  add_common(tele, tel_c);

  std::string golden;
  std::vector<std::string> only;
  unsigned val_workers = std::max(1u, std::thread::hardware_concurrency());
  auto* validate = app.add_subcommand("validate", "run the acceptance checks");
  validate->add_option("--golden", golden, "golden JSON file (default: the shipped one)");
  validate->add_option("--only", only, "run only these checks")->delimiter(',');
  validate->add_option("--workers", val_workers, "parallel sweep workers")->check(CLI::PositiveNumber);
  validate->add_flag_callback(
      "--list",
      [] {
        for (size_t i = 0; i < qc_check_count(); ++i) std::printf("%s\n", qc_check_name(i));
        std::exit(0);
      },
      "list check names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sweep) {
      validate_common(sweep_c);
      MapHandle m1, m2;
      make_map(family, choi, sweep_c, m1);
      make_map(family2.empty() ? family : family2, choi2, sweep_c, m2);
      qc_sweep_options o = sweep_options(sweep_c);
      o.teleport = teleport;
      qc_sweep* sw = nullptr;
      check(qc_sweep_run(m1.p, m2.p, sweep_c.t_min, sweep_c.t_max, sweep_c.t_step, &o, &sw));
      return write_sweep(sw, sweep_c.output);
    }
    if (*figure) {
      validate_common(fig_c);
      const qc_family_params p = family_params(fig_c);
      const qc_sweep_options o = sweep_options(fig_c);
      qc_sweep* sw = nullptr;
      check(qc_figure_run(fig_id, &p, fig_c.t_min, fig_c.t_max, fig_c.t_step, &o, &sw));
      return write_sweep(sw, fig_c.output);
    }
    if (*measure) {
      validate_common(meas_c);
      MapHandle m, ref;
      make_map(meas_family, "", meas_c, m);
      make_map(reference, "", meas_c, ref);
      qc_indivisibility_options o;
      qc_indivisibility_options_default(&o);
      o.noise = meas_c.noise == "cd" ? QC_NOISE_CD : QC_NOISE_GENERIC;
      o.deadband = deadband;
      o.integrate_derivative = derivative;
      o.workers = meas_c.workers;
      o.robustness = robustness_options(meas_c);
      qc_indivisibility* rep = nullptr;
      check(qc_indivisibility_run(m.p, ref.p, meas_c.t_min, meas_c.t_max, meas_c.t_step, &o, &rep));
      double n_raw = 0.0, n_norm = 0.0;
      qc_indivisibility_values(rep, &n_raw, &n_norm);
      nlohmann::json j;
      j["family"] = qc_map_label(m.p);
      j["reference"] = qc_map_label(ref.p);
      j["noise"] = meas_c.noise;
      j["integrand"] = derivative ? "increment" : "robustness";
      j["n_raw"] = n_raw;
      j["n_normalized"] = n_norm;
      j["rising_segments"] = nlohmann::json::array();
      for (size_t i = 0; i < qc_indivisibility_segment_count(rep); ++i) {
        double a = 0.0, b = 0.0;
        qc_indivisibility_segment(rep, i, &a, &b);
        j["rising_segments"].push_back({a, b});
      }
      if (!curve_path.empty()) {
        std::string csv = "t,r\n";
        for (size_t i = 0; i < qc_indivisibility_curve_size(rep); ++i) {
          double t = 0.0, r = 0.0;
          qc_indivisibility_curve_point(rep, i, &t, &r);
          csv += num(t) + ',' + num(r) + '\n';
        }
        emit(curve_path, csv);
      }
      qc_indivisibility_free(rep);
      emit(meas_c.output, j.dump(2) + "\n");
      return 0;
    }
    if (*tele) {
      validate_common(tel_c);
      MapHandle m;
      make_map(tel_family, "", tel_c, m);
      const double n_steps = std::floor((tel_c.t_max - tel_c.t_min) / tel_c.t_step + 1e-9);
      std::string csv = "t,n_value,f_max\n";
      for (long i = 0; i <= static_cast<long>(n_steps); ++i) {
        const double t = tel_c.t_min + static_cast<double>(i) * tel_c.t_step;
        double n = 0.0, f = 0.0;
        check(qc_teleport_fidelity(m.p, t, &n, &f));
        csv += num(t) + ',' + num(n) + ',' + num(f) + '\n';
      }
      emit(tel_c.output, csv);
      return 0;
    }
    if (*validate) {
      std::string joined;
      for (const auto& name : only) joined += (joined.empty() ? "" : ",") + name;
      int all = 0;
      check(qc_validate(golden.empty() ? nullptr : golden.c_str(), only.empty() ? nullptr : joined.c_str(),
                        val_workers, print_check, nullptr, &all));
      std::printf("%s\n", all ? "all checks passed" : "some checks FAILED");
      return all ? 0 : 1;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return kExitUsage;
}
