/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef BASKETMM_H
#define BASKETMM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum BmStatus {
  BM_STATUS_OK = 0,
  BM_STATUS_NULL_POINTER = 1,
  BM_STATUS_INVALID_ARGUMENT = 2,
  BM_STATUS_INVALID_BASKET = 3,
  BM_STATUS_NOT_POSITIVE_SEMIDEFINITE = 4,
  BM_STATUS_DEGENERATE_BASKET = 5,
  BM_STATUS_DOMAIN_ERROR = 6,
  BM_STATUS_NO_ROOT = 7,
  BM_STATUS_NUMERICAL_FAILURE = 8,
  BM_STATUS_UNKNOWN_LAW = 9,
  BM_STATUS_CASE_BOUNDARY = 10,
  BM_STATUS_PANIC = 11,
} BmStatus;

// Pricing method codes reported in `BmPrice`.
typedef enum BmMethod {
  BM_METHOD_CLOSED_FORM_LOGNORMAL = 0,
  BM_METHOD_MIXTURE_QUADRATURE = 1,
  BM_METHOD_NORMAL_FALLBACK = 2,
  BM_METHOD_DETERMINISTIC = 3,
  BM_METHOD_BLACK_SCHOLES = 4,
} BmMethod;

// Opaque basket handle.
typedef struct BmBasket BmBasket;

// Opaque mixing-law handle.
typedef struct BmLaw BmLaw;

// Mean, standard deviation, skewness and raw moments of the basket.
typedef struct BmMoments {
  double mu;
  double sigma;
  double eta;
  double m1;
  double m2;
  double m3;
} BmMoments;

// Closed-form price. `case_index` is 1..4 for the pricing branch
// (`c=+1,K<=tau`, `c=+1,K>tau`, `c=-1,K>=-tau`, `c=-1,K<-tau`) or 0 when
// no branch applies.
typedef struct BmPrice {
  double price;
  enum BmMethod method;
  int32_t case_index;
  // Quadrature error estimate, or 0 when no quadrature was run.
  double quad_error;
} BmPrice;

typedef struct BmMcResult {
  double mean;
  double std_error;
  uint64_t paths;
} BmMcResult;

// Sensitivities to (mean, stdev, skewness) of the log-normal approximant price.
typedef struct BmGreeks {
  double dp_dmu;
  double dp_dsigma;
  double dp_deta;
  double dx_deta;
  int32_t case_index;
} BmGreeks;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a basket of `n` assets. `correlation` is `n * n`, row-major.
//
// # Safety
// Array arguments must point to `n` (or `n * n`) readable doubles and
// `out` to writable storage for one pointer.
enum BmStatus bm_basket_new(size_t n,
                            const double *weights,
                            const double *spots,
                            const double *vols,
                            const double *correlation,
                            double rate,
                            double horizon,
                            double strike,
                            struct BmBasket **out);

// Releases a basket; null is ignored.
//
// # Safety
// `basket` must come from `bm_basket_new` and not be used afterwards.
void bm_basket_free(struct BmBasket *basket);

// Replaces the strike of an existing basket.
//
// # Safety
// `basket` must be a live handle.
enum BmStatus bm_basket_set_strike(struct BmBasket *basket, double strike);

// Looks up `exp1`, `gamma22`, `ig12` or `pointmass`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum BmStatus bm_law_builtin(const char *name, struct BmLaw **out);

// Releases a law; null is ignored.
//
// # Safety
// `law` must come from `bm_law_builtin` and not be used afterwards.
void bm_law_free(struct BmLaw *law);

// Basket moments; `law` may be null for the log-normal model.
//
// # Safety
// `basket` must be live, `law` null or live, `out` writable.
enum BmStatus bm_moments(const struct BmBasket *basket,
                         const struct BmLaw *law,
                         struct BmMoments *out);

// Closed-form call price; `law` may be null for the log-normal model.
//
// # Safety
// `basket` must be live, `law` null or live, `out` writable.
enum BmStatus bm_price(const struct BmBasket *basket, const struct BmLaw *law, struct BmPrice *out);

// Monte-Carlo call price with `paths` paths; `law` may be null.
//
// # Safety
// `basket` must be live, `law` null or live, `out` writable.
enum BmStatus bm_mc_price(const struct BmBasket *basket,
                          const struct BmLaw *law,
                          uint64_t paths,
                          uint64_t seed,
                          struct BmMcResult *out);

// Analytic Greeks of the log-normal approximant at the basket's strike.
//
// # Safety
// `basket` must be live and `out` writable.
enum BmStatus bm_greeks_lognormal(const struct BmBasket *basket, struct BmGreeks *out);

// Real root `x >= 1` of `x^3 + 3x^2 - 4 - eta^2 = 0`.
double bm_solve_cubic_skew(double eta);

// Message for the last failed call on this thread ("" after a success).
// The pointer stays valid until the next call into this library on the
// same thread.
const char *bm_last_error_message(void);

// Static name of a status code.
const char *bm_status_name(enum BmStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASKETMM_H */
