#ifndef FREDHOLM_FREDHOLM_H
#define FREDHOLM_FREDHOLM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FH_BUILDING_LIBRARY)
#define FH_API __declspec(dllexport)
#else
#define FH_API __declspec(dllimport)
#endif
#else
#define FH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum fh_status {
  FH_OK = 0,
  FH_ERR_IO = 1,
  FH_ERR_VALIDATION = 2,
  FH_ERR_UNSOLVABLE = 3,
  FH_ERR_DIVERGENCE = 4,
  FH_ERR_INTERNAL = 5
} fh_status;

typedef struct fh_problem fh_problem;
typedef struct fh_spectral fh_spectral;

FH_API const char* fh_version(void);

/* Message and error kind of the last failure on the calling thread. */
FH_API const char* fh_last_error(void);
FH_API const char* fh_last_error_kind(void);

/* Strings returned through char** are owned by the caller. */
FH_API void fh_string_free(char* s);

FH_API fh_status fh_problem_load(const char* path, fh_problem** out);
FH_API fh_status fh_problem_parse(const char* json_text, fh_problem** out);
FH_API void fh_problem_free(fh_problem* problem);
FH_API int fh_problem_dim(const fh_problem* problem);
FH_API int fh_problem_is_steklov(const fh_problem* problem);
FH_API int fh_problem_has_nonlinearity(const fh_problem* problem);

/* Structural checks; *report receives a JSON document, *passed 0 or 1.
   Returns FH_ERR_VALIDATION when a check fails. */
FH_API fh_status fh_validate(const fh_problem* problem, char** report, int* passed);

FH_API fh_status fh_spectral_compute(const fh_problem* problem, double lambda, fh_spectral** out);
FH_API void fh_spectral_free(fh_spectral* spectral);
FH_API int fh_spectral_size(const fh_spectral* spectral);
FH_API double fh_spectral_tau(const fh_spectral* spectral);
/* k is 1-based. */
FH_API fh_status fh_spectral_mu(const fh_spectral* spectral, int k, double* mu);
FH_API fh_status fh_spectral_vector(const fh_spectral* spectral, int k, double* buffer, size_t length);

/* CSV with header lambda,k,mu; with_oracle appends an oracle column (Steklov
   problems with constant coefficients only). */
FH_API fh_status fh_eigencurves(const fh_problem* problem, double lambda_min, double lambda_max, int points, int k,
                                int with_oracle, char** csv);

/* k-th eigenvalue of the characteristic equation of a constant-coefficient
   Steklov problem. */
FH_API fh_status fh_oracle(const fh_problem* problem, double lambda, int k, double* mu);

/* Functionals are descriptors: "1,0,0", "interior:f0", "boundary:gL,gR".
   vhat may be NULL. tol <= 0 selects the default resonance tolerance.
   On failure *json (when non-NULL) holds an error document. */
FH_API fh_status fh_solve_linear(const fh_problem* problem, double lambda, double mu, const char* ell,
                                 const char* vhat, double tol, char** json);

typedef enum fh_method { FH_METHOD_AUTO = 0, FH_METHOD_PICARD = 1, FH_METHOD_NEWTON = 2 } fh_method;

typedef struct fh_nonlinear_options {
  double lambda;
  double mu;
  const double* eps;    /* eps values; resonant runs trace the branch over all of them */
  size_t n_eps;
  fh_method method;
  int resonant;
  const double* u_init; /* optional start of length dim, NULL for zero */
  double tol;           /* resonance tolerance, <= 0 for the default */
} fh_nonlinear_options;

FH_API fh_status fh_solve_nonlinear(const fh_problem* problem, const fh_nonlinear_options* options, char** json);

/* suite: spectrum | bounds | nonlinear | nemytskii | all. tol <= 0 keeps the
   built-in tolerances. *table receives the per-property table. */
FH_API fh_status fh_verify(const fh_problem* problem, const char* suite, uint64_t seed, double tol, char** table,
                           int* passed);

#ifdef __cplusplus
}
#endif

#endif
