/* Stable C interface to the hamalg core. All handles are opaque; every call
 * returns a status code and, on failure, leaves a message retrievable with
 * hamalg_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with hamalg_string_free(). */
#ifndef HAMALG_H
#define HAMALG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HAMALG_API __declspec(dllexport)
#else
#define HAMALG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hamalg_status {
  HAMALG_OK = 0,
  HAMALG_E_USAGE = 1,
  HAMALG_E_PARSE = 2,
  HAMALG_E_DOMAIN = 3,           /* precondition: not a symbol, caustic, unbound name */
  HAMALG_E_DIVERGENT = 4,        /* divergent constant where a number is required */
  HAMALG_E_CLOSURE = 5,          /* bracket left the symbol class */
  HAMALG_E_DERIVATIVE_BOUND = 6,
  HAMALG_E_INTERNAL = 7
} hamalg_status;

typedef enum hamalg_field { HAMALG_PHI = 0, HAMALG_PI = 1 } hamalg_field;
typedef enum hamalg_ordering { HAMALG_NORMAL = 0, HAMALG_WEYL = 1 } hamalg_ordering;
typedef enum hamalg_style { HAMALG_STYLE_COMPACT = 0, HAMALG_STYLE_CANONICAL = 1 } hamalg_style;
typedef enum hamalg_fault { HAMALG_FAULT_NONE = 0, HAMALG_FAULT_CANONICALIZER_SIGN = 1 } hamalg_fault;

typedef struct hamalg_session hamalg_session;
/* A classical symbol (int) or an operator expression (qint). */
typedef struct hamalg_expr hamalg_expr;

HAMALG_API const char* hamalg_version(void);
HAMALG_API const char* hamalg_last_error(void);
HAMALG_API void hamalg_string_free(char* s);

/* functions: comma-separated declared names, NULL for "f,g,j".
 * max_order <= 0 keeps the default bound (8). */
HAMALG_API hamalg_status hamalg_session_new(int dimension, const char* functions, int max_order,
                                            hamalg_fault fault, hamalg_session** out);
HAMALG_API void hamalg_session_free(hamalg_session* s);

/* Parse and canonicalize. */
HAMALG_API hamalg_status hamalg_parse(const hamalg_session* s, const char* src, hamalg_expr** out);
HAMALG_API void hamalg_expr_free(hamalg_expr* e);
HAMALG_API int hamalg_expr_is_operator(const hamalg_expr* e);
HAMALG_API int hamalg_expr_is_zero(const hamalg_expr* e);
HAMALG_API int hamalg_expr_is_divergent(const hamalg_expr* e);

HAMALG_API hamalg_status hamalg_format(const hamalg_session* s, const hamalg_expr* e,
                                       hamalg_style style, char** out);
/* JSON AST, one object per term, fixed key order. indent < 0 gives one line. */
HAMALG_API hamalg_status hamalg_to_json(const hamalg_session* s, const hamalg_expr* e, int indent,
                                        char** out);

/* Classical operations (symbols only). */
HAMALG_API hamalg_status hamalg_vderiv(const hamalg_session* s, const hamalg_expr* e,
                                       hamalg_field field, hamalg_expr** out);
HAMALG_API hamalg_status hamalg_bracket(const hamalg_session* s, const hamalg_expr* a,
                                        const hamalg_expr* b, hamalg_expr** out);
/* Number of homogeneous components by pi-degree; component k has grade
 * grades[k]. Pass NULL arrays to query the count. */
HAMALG_API hamalg_status hamalg_grade(const hamalg_session* s, const hamalg_expr* e, size_t cap,
                                      int* grades, hamalg_expr** parts, size_t* count);
/* Symbols or operators; both arguments of the same kind. */
HAMALG_API hamalg_status hamalg_multiply(const hamalg_session* s, const hamalg_expr* a,
                                         const hamalg_expr* b, hamalg_expr** out);
HAMALG_API hamalg_status hamalg_equals(const hamalg_session* s, const hamalg_expr* a,
                                       const hamalg_expr* b, int* equal);
/* Symbol report: is_symbol plus a text explanation when it is not. */
HAMALG_API hamalg_status hamalg_check_symbol(const hamalg_session* s, const hamalg_expr* e,
                                             int* is_symbol, char** why);

/* Quantum layer. A symbol argument to commutator is quantized with `ordering`. */
HAMALG_API hamalg_status hamalg_quantize(const hamalg_session* s, const hamalg_expr* e,
                                         hamalg_ordering ordering, hamalg_expr** out);
HAMALG_API hamalg_status hamalg_commutator(const hamalg_session* s, const hamalg_expr* a,
                                           const hamalg_expr* b, hamalg_ordering ordering,
                                           hamalg_expr** out);
HAMALG_API hamalg_status hamalg_classical_limit(const hamalg_session* s, const hamalg_expr* e,
                                                hamalg_expr** out);

/* Reports: `text` and `json` may each be NULL when not wanted. */
HAMALG_API hamalg_status hamalg_correspondence(const hamalg_session* s, const hamalg_expr* a,
                                               const hamalg_expr* b, hamalg_ordering ordering,
                                               int* passed, char** text, char** json);
HAMALG_API hamalg_status hamalg_residual_identity(const hamalg_session* s, const char* f,
                                                  const char* g, char** text, char** json);
HAMALG_API hamalg_status hamalg_check_algebra(const hamalg_session* s, uint64_t seed, int samples,
                                              int max_grade, int max_deriv, int* passed,
                                              char** text, char** json);

/* Lattice oracle. Ns has n_count resolutions. csv gets columns N,dx,error. */
HAMALG_API hamalg_status hamalg_lattice_verify(const hamalg_session* s, const hamalg_expr* a,
                                               const hamalg_expr* b, const int* Ns, size_t n_count,
                                               double L, int stencil, uint64_t seed, int states,
                                               int* exact, double* order, double* finest_error,
                                               char** csv, char** json);
HAMALG_API hamalg_status hamalg_kg_flow(int N, double L, int stencil, double m, double t,
                                        double* defect, double* energy_drift, char** json);

/* Quasiclassics with one or more degrees of freedom; S0 and a0 are
 * polynomials in q (q1..qn), a0 may be NULL for 1. preset (oscillator, free,
 * quartic) fills H, S0, a0 and T when the other arguments are NULL. */
HAMALG_API hamalg_status hamalg_qc_characteristics(const char* preset, const char* H, int dof,
                                                   const char* S0, const char* a0,
                                                   const double* q0, double T, double dt,
                                                   char** csv);
HAMALG_API hamalg_status hamalg_qc_transport(const char* preset, const char* H, const char* S0,
                                             const char* a0, double T, int grid, double* residual,
                                             char** json);
HAMALG_API hamalg_status hamalg_qc_wkb(const char* preset, const char* H, const char* S0,
                                       const char* a0, double T, const double* hs, size_t h_count,
                                       int grid, double* exponent, char** csv, char** json);

/* Acceptance suite. quick != 0 selects the reduced profile. */
HAMALG_API hamalg_status hamalg_suite(int quick, uint64_t seed, hamalg_fault fault, int* passed,
                                      char** text, char** json);

#ifdef __cplusplus
}
#endif

#endif /* HAMALG_H */
