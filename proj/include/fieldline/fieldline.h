#ifndef FIELDLINE_H
#define FIELDLINE_H

/* C interface of the fieldline library.

   Objects are opaque handles created by fl_*_create / fl_*_compute style calls and
   released with the matching fl_*_free (passing NULL is allowed). Every fallible call
   returns an fl_status; on failure the message is available from fl_last_error() in the
   calling thread until the next failing call in that thread. Handles are immutable after
   creation and may be shared between threads. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(FIELDLINE_BUILDING)
#    define FL_API __declspec(dllexport)
#  else
#    define FL_API __declspec(dllimport)
#  endif
#else
#  define FL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
    FL_OK = 0,
    FL_ERR_CONFIG = 2,    /* invalid or unknown configuration value */
    FL_ERR_NUMERIC = 3,   /* non-convergence, non-finite result, degenerate turning point */
    FL_ERR_INVARIANT = 4, /* conserved-quantity breach */
    FL_ERR_DOMAIN = 5,    /* evaluation outside the domain (singularity, forbidden start) */
    FL_ERR_USAGE = 6,     /* NULL handle, index out of range, inconsistent arguments */
    FL_ERR_IO = 7,
    FL_ERR_INTERNAL = 9
} fl_status;

FL_API const char* fl_last_error(void);
FL_API const char* fl_status_name(fl_status status);
FL_API const char* fl_version(void);

/* ---------------------------------------------------------------- profiles */

typedef struct fl_profile fl_profile;

typedef enum fl_axis { FL_AXIS_Y = 0, FL_AXIS_X = 1, FL_AXIS_RADIAL = 2 } fl_axis;

typedef enum fl_builtin {
    FL_UNIFORM = 0,     /* f = 1 */
    FL_ZERO_FIELD = 1,  /* f = 1/u */
    FL_EXP_DECAY = 2,   /* f = (1 - e^-u)/u on the y axis */
    FL_RADIAL_EXP = 3,  /* same shape on the radial axis */
    FL_RATIONAL_AB = 4  /* f = (u-a)(u-b)/u^2 on the radial axis */
} fl_builtin;

typedef double (*fl_scalar_fn)(double u, void* user);

FL_API fl_status fl_profile_builtin(fl_builtin kind, double b0, double a, double b, fl_profile** out);
/* by configuration name: "uniform", "zero_field", "exp_decay", "radial_exp", "rational_ab" */
FL_API fl_status fl_profile_by_name(const char* name, double b0, double a, double b, fl_profile** out);
/* f tabulated at increasing u, monotone-cubic interpolated */
FL_API fl_status fl_profile_table(const double* u, const double* f, size_t n, fl_axis axis, double b0,
                                  fl_profile** out);
/* same, from a CSV file with header "u,f" */
FL_API fl_status fl_profile_table_csv(const char* path, fl_axis axis, double b0, fl_profile** out);
/* inverse problem: f(u) = (integral_anchor^u shape + c)/u for a field shape B(u)/b0 given as a callback.
   The callback must stay valid for the lifetime of the profile. */
FL_API fl_status fl_profile_from_field(fl_scalar_fn shape, void* user, double c, fl_axis axis, double b0,
                                       double anchor, fl_profile** out);
/* inverse problem from tabulated field values B(u) (monotone-cubic interpolated, divided by b0) */
FL_API fl_status fl_profile_from_field_table(const double* u, const double* field, size_t n, double c,
                                             fl_axis axis, double b0, double anchor, fl_profile** out);
/* same, from a CSV file with header "u,B" */
FL_API fl_status fl_profile_from_field_csv(const char* path, double c, fl_axis axis, double b0, double anchor,
                                           fl_profile** out);
FL_API fl_status fl_profile_with_axis(const fl_profile* profile, fl_axis axis, fl_profile** out);
FL_API fl_status fl_profile_with_scale(const fl_profile* profile, double b0, fl_profile** out);
FL_API void fl_profile_free(fl_profile* profile);

FL_API fl_status fl_profile_info(const fl_profile* profile, fl_axis* axis, double* b0);
/* the returned string lives as long as the profile */
FL_API const char* fl_profile_label(const fl_profile* profile);
/* f, f' and B = b0 (u f)' at u; any output pointer may be NULL */
FL_API fl_status fl_profile_eval(const fl_profile* profile, double u, double* f, double* f_prime, double* field);
/* CSV u,f,f_prime,B on a uniform grid */
FL_API fl_status fl_field_write_csv(const fl_profile* profile, double u_min, double u_max, size_t points,
                                    const char* path);

/* ------------------------------------------------------ particles, constants */

typedef struct fl_particle {
    double q, m;
    double x0, y0;
    double vx0, vy0;
} fl_particle;

typedef struct fl_constants {
    double k1, k2, k3;
} fl_constants;

FL_API fl_status fl_derive_constants(const fl_profile* profile, const fl_particle* particle, fl_constants* out);
/* initial data reproducing the constants; the profile must carry b0 = k2 m / q.
   u0 may be NULL (closed-form origin for the exponential field, else the turning point nearest 0). */
FL_API fl_status fl_particle_from_constants(const fl_profile* profile, const fl_constants* constants, double q,
                                            double m, int sign, const double* u0, fl_particle* out);
/* g(u) = k3 - (k1 + kappa u f(u))^2 */
FL_API fl_status fl_radicand(const fl_profile* profile, const fl_constants* constants, double u, double* out);

/* ------------------------------------------------------------- trajectories */

typedef struct fl_trajectory fl_trajectory;

typedef enum fl_method { FL_METHOD_QUADRATURE = 0, FL_METHOD_CLOSED_FORM = 1, FL_METHOD_ODE = 2 } fl_method;

typedef struct fl_solver_settings {
    double quadrature_tol;   /* absolute tolerance of the quadrature pieces */
    size_t nodes_per_leg;    /* interpolation nodes per monotone leg */
    double ode_dt_initial;
    double ode_rel_tol;
    double ode_abs_tol;
    size_t ode_max_steps;
} fl_solver_settings;

FL_API void fl_solver_settings_default(fl_solver_settings* settings);

typedef struct fl_sample {
    double t, x, y, vx, vy;
    double energy_residual, momentum_residual;
} fl_sample;

typedef struct fl_orbit {
    int bounded;
    double lower, upper; /* turning points of the gauge coordinate */
    double period;
} fl_orbit;

typedef struct fl_deviation {
    double max_position;
    double rms_position;
    double max_energy_residual_diff;
    double time_of_max;
    size_t samples;
} fl_deviation;

/* n_samples uniform times in [0, t_end]; settings may be NULL for defaults. When the ODE
   integration fails part way, *out still receives the partial trajectory and the status is
   FL_ERR_NUMERIC. */
FL_API fl_status fl_trajectory_compute(const fl_profile* profile, const fl_particle* particle, fl_method method,
                                       double t_end, size_t n_samples, const fl_solver_settings* settings,
                                       fl_trajectory** out);
FL_API void fl_trajectory_free(fl_trajectory* trajectory);

FL_API size_t fl_trajectory_size(const fl_trajectory* trajectory);
FL_API fl_status fl_trajectory_sample(const fl_trajectory* trajectory, size_t index, fl_sample* out);
FL_API fl_status fl_trajectory_constants(const fl_trajectory* trajectory, fl_constants* out);
FL_API fl_status fl_trajectory_orbit(const fl_trajectory* trajectory, fl_orbit* out);
FL_API fl_status fl_trajectory_max_residuals(const fl_trajectory* trajectory, double* energy, double* momentum);
/* FL_ERR_INVARIANT when either residual exceeds its bound (momentum bound scaled by sqrt(k3)) */
FL_API fl_status fl_trajectory_check_invariants(const fl_trajectory* trajectory, double energy_tol,
                                                double momentum_tol);
FL_API fl_status fl_trajectory_write_csv(const fl_trajectory* trajectory, const char* path);
FL_API fl_status fl_trajectory_write_json(const fl_trajectory* trajectory, const char* path);
/* position deviation of b from a on a's time grid */
FL_API fl_status fl_trajectory_compare(const fl_trajectory* a, const fl_trajectory* b, fl_deviation* out);

/* period of a coordinate (0..3 = x, y, vx, vy) from upward crossings of `level` in the dense
   ODE solution on [0, t_end]; NaN with fewer than two crossings */
FL_API fl_status fl_oracle_period(const fl_profile* profile, const fl_particle* particle, double t_end,
                                  const fl_solver_settings* settings, int component, double level,
                                  double* period);

/* raw closed forms (no fitting to initial data) */
FL_API fl_status fl_closed_form_uniform(const fl_constants* constants, double t, double* x, double* y);
FL_API fl_status fl_closed_form_exponential(const fl_constants* constants, double t, int sign, double* x,
                                            double* y);

typedef struct fl_exp_constants {
    double alpha2, beta, l, m_aux;
    int valid;
} fl_exp_constants;

FL_API fl_status fl_exp_constants_from(const fl_constants* constants, fl_exp_constants* out);

/* --------------------------------------------------------------------- SUSY */

typedef struct fl_susy fl_susy;

typedef enum fl_spin { FL_SPIN_LOWER = 0, FL_SPIN_UPPER = 1 } fl_spin;
typedef enum fl_verdict { FL_NORMALIZABLE = 0, FL_NOT_NORMALIZABLE = 1, FL_INCONCLUSIVE = 2 } fl_verdict;
typedef enum fl_convention { FL_HALF_INTEGER = 0, FL_INTEGER = 1 } fl_convention;

typedef struct fl_susy_params {
    int m;              /* angular quantum number */
    fl_spin spin;
    double hbar;
    double mass;
    double ladder_base; /* smallest radius of the normalizability ladder */
} fl_susy_params;

FL_API void fl_susy_params_default(fl_susy_params* params);

typedef struct fl_susy_report {
    fl_verdict verdict;
    double log_norm;          /* log of the integral of psi_0^2 (NaN unless it converged) */
    double tail_slope;
    double origin_log_slope;
    int out_of_factorization_regime;
    int closed_form_action;
    int published_claim;      /* 1 unbroken, 0 broken, -1 none */
    int published_claim_agrees; /* 1, 0, or -1 without a claim or without a decisive verdict */
} fl_susy_report;

/* zero mode and normalizability verdict for a radial profile */
FL_API fl_status fl_susy_analyze(const fl_profile* radial, const fl_susy_params* params, fl_susy** out);
FL_API void fl_susy_free(fl_susy* susy);

FL_API fl_status fl_susy_get_report(const fl_susy* susy, fl_susy_report* out);
FL_API fl_status fl_susy_action(const fl_susy* susy, double r, double* out);
FL_API fl_status fl_susy_log_psi(const fl_susy* susy, double r, double* out);
FL_API fl_status fl_susy_superpotential(const fl_susy* susy, double r, double* out);
FL_API fl_status fl_susy_effective_potential(const fl_susy* susy, double r, double* out);
/* SWKB integral I(E) */
FL_API fl_status fl_susy_swkb_integral(const fl_susy* susy, double energy, double* out);
/* levels n = 0..n_max; energies and residuals must hold n_max + 1 values (residuals may be NULL) */
FL_API fl_status fl_susy_levels(const fl_susy* susy, int n_max, fl_convention convention, double* energies,
                                double* residuals);
FL_API fl_status fl_susy_write_zero_mode_csv(const fl_susy* susy, double r_min, double r_max, size_t points,
                                             const char* path);
FL_API fl_status fl_susy_write_verdict_json(const fl_susy* susy, const char* path);
FL_API fl_status fl_susy_write_spectrum_csv(const fl_susy* susy, int n_max, fl_convention convention,
                                            const char* path);

#ifdef __cplusplus
}
#endif

#endif
