#ifndef QCOMPAT_QCOMPAT_H
#define QCOMPAT_QCOMPAT_H

/* C interface to libqcompat: channel incompatibility robustness, sweeps
 * along dynamical maps, witnesses, and the validation suite.
 *
 * Every function returning qc_status leaves a message for qc_last_error()
 * (per thread) when it fails. Handles are opaque and owned by the caller. */

#include <stddef.h>

#if defined(_WIN32)
#define QC_API __declspec(dllexport)
#else
#define QC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  QC_OK = 0,
  QC_ERR_NULL = 1,      /* required pointer argument was NULL */
  QC_ERR_DIMENSION = 2, /* shape mismatch */
  QC_ERR_DOMAIN = 3,    /* argument outside its valid range, unknown name */
  QC_ERR_IO = 4,        /* file could not be read */
  QC_ERR_PARSE = 5,     /* malformed JSON */
  QC_ERR_INTERNAL = 6
} qc_status;

typedef enum { QC_NOISE_GENERIC = 0, QC_NOISE_CD = 1 } qc_noise;

typedef struct qc_channel qc_channel;
typedef struct qc_map qc_map;
typedef struct qc_sweep qc_sweep;
typedef struct qc_indivisibility qc_indivisibility;

QC_API const char* qc_version(void);
QC_API const char* qc_last_error(void);
QC_API const char* qc_status_name(qc_status s);
/* Frees strings returned through char** out-parameters. */
QC_API void qc_string_free(char* s);

/* ---- channels ---- */

/* Row-major real and imaginary parts of the (din*dout)^2 Choi matrix. */
QC_API qc_status qc_channel_from_choi(size_t din, size_t dout, const double* re, const double* im, qc_channel** out);
QC_API qc_status qc_channel_from_json(const char* text, qc_channel** out);
QC_API qc_status qc_channel_load(const char* path, qc_channel** out);
QC_API qc_status qc_channel_identity(size_t d, qc_channel** out);
QC_API qc_status qc_channel_to_json(const qc_channel* ch, char** out);
QC_API qc_status qc_channel_dims(const qc_channel* ch, size_t* din, size_t* dout);
/* Copies the Choi matrix into caller buffers of (din*dout)^2 doubles. */
QC_API qc_status qc_channel_choi(const qc_channel* ch, double* re, double* im);
QC_API void qc_channel_free(qc_channel* ch);

/* ---- dynamical maps ---- */

typedef struct {
  double lambda;
  double omega;
  double alpha;
  int has_lambda;
  int has_omega;
  int has_alpha;
} qc_family_params;

/* identity, depolarizing, depolarizing-indiv, amplitude-damping, eternal.
 * params may be NULL for the defaults lambda = 0.5, omega = 5 pi, alpha = 0.5. */
QC_API qc_status qc_map_from_family(const char* name, const qc_family_params* params, qc_map** out);
/* The same channel at every t. */
QC_API qc_status qc_map_constant(const qc_channel* ch, const char* label, qc_map** out);
QC_API qc_status qc_map_evaluate(const qc_map* map, double t, qc_channel** out);
QC_API const char* qc_map_label(const qc_map* map);
QC_API void qc_map_free(qc_map* map);

/* ---- robustness ---- */

typedef struct {
  double dr;          /* grid step, default 0.005 */
  int refine;         /* bisect the bracketing grid cell to 1e-5 */
  int linear_scan;    /* visit grid points in order instead of by bisection */
  int max_iterations; /* solver cap per probe, default 100000 */
} qc_robustness_options;

QC_API void qc_robustness_options_default(qc_robustness_options* opts);

typedef struct {
  double r_star;
  double q_at_r_star;
  size_t probes;
  int refined;
  int indeterminate;
} qc_robustness_result;

QC_API qc_status qc_robustness(const qc_channel* ch1, const qc_channel* ch2, qc_noise noise,
                        const qc_robustness_options* opts, qc_robustness_result* out);
/* converged is 0 when the solver stopped without meeting its tolerances. */
QC_API qc_status qc_feasibility_q(const qc_channel* ch1, const qc_channel* ch2, double r, qc_noise noise,
                           int max_iterations, double* q, int* converged);
/* Self-describing JSON of the feasibility SDP at mixing weight r. */
QC_API qc_status qc_feasibility_problem_json(const qc_channel* ch1, const qc_channel* ch2, double r, qc_noise noise,
                                      char** out);

/* POVMs given as count x dim x dim effects, row-major, real and imaginary parts.
 * QC_NOISE_CD selects trivial noise POVMs {p_i 1}. */
QC_API qc_status qc_measurement_robustness(size_t dim, size_t count1, const double* re1, const double* im1, size_t count2,
                                    const double* re2, const double* im2, qc_noise noise,
                                    const qc_robustness_options* opts, qc_robustness_result* out);

/* ---- sweeps ---- */

typedef struct {
  int generic;
  int cd;
  int teleport; /* add n_value and f_max of map2 */
  unsigned workers;
  qc_robustness_options robustness;
} qc_sweep_options;

QC_API void qc_sweep_options_default(qc_sweep_options* opts);

typedef struct {
  double t;
  double r_generic; /* NaN when not requested */
  double r_cd;
  double trace_distance;
  double n_value; /* NaN unless teleport columns were requested */
  double f_max;
  int indeterminate;
} qc_sweep_record;

QC_API qc_status qc_sweep_run(const qc_map* map1, const qc_map* map2, double t_min, double t_max, double t_step,
                       const qc_sweep_options* opts, qc_sweep** out);
/* Figure ids 1..7; opts->teleport is ignored, the figure decides. */
QC_API qc_status qc_figure_run(int id, const qc_family_params* params, double t_min, double t_max, double t_step,
                        const qc_sweep_options* opts, qc_sweep** out);
QC_API const char* qc_figure_description(int id);
QC_API size_t qc_sweep_size(const qc_sweep* sw);
QC_API int qc_sweep_has_teleport(const qc_sweep* sw);
QC_API qc_status qc_sweep_record_at(const qc_sweep* sw, size_t i, qc_sweep_record* out);
QC_API void qc_sweep_free(qc_sweep* sw);

/* ---- witnesses ---- */

QC_API qc_status qc_teleport_fidelity(const qc_map* map, double t, double* n_value, double* f_max);

typedef struct {
  qc_noise noise;
  double deadband;          /* default 2e-3 */
  int integrate_derivative; /* sum increments instead of integrating r(t) */
  unsigned workers;
  qc_robustness_options robustness;
} qc_indivisibility_options;

QC_API void qc_indivisibility_options_default(qc_indivisibility_options* opts);

QC_API qc_status qc_indivisibility_run(const qc_map* map, const qc_map* reference, double t_min, double t_max,
                                double t_step, const qc_indivisibility_options* opts, qc_indivisibility** out);
QC_API qc_status qc_indivisibility_values(const qc_indivisibility* rep, double* n_raw, double* n_normalized);
QC_API size_t qc_indivisibility_segment_count(const qc_indivisibility* rep);
QC_API qc_status qc_indivisibility_segment(const qc_indivisibility* rep, size_t i, double* t_start, double* t_end);
QC_API size_t qc_indivisibility_curve_size(const qc_indivisibility* rep);
QC_API qc_status qc_indivisibility_curve_point(const qc_indivisibility* rep, size_t i, double* t, double* r);
QC_API void qc_indivisibility_free(qc_indivisibility* rep);

/* ---- validation ---- */

QC_API size_t qc_check_count(void);
QC_API const char* qc_check_name(size_t i);
QC_API const char* qc_default_golden_path(void);

typedef void (*qc_check_callback)(const char* name, int passed, const char* detail, double seconds, void* user);

/* only: comma-separated check names or NULL for all; golden_path NULL for
 * the shipped file. all_passed is set when every selected check passed. */
QC_API qc_status qc_validate(const char* golden_path, const char* only, unsigned workers, qc_check_callback cb, void* user,
                      int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
