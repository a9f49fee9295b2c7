#ifndef POLYKAN_H
#define POLYKAN_H

/* This file is generated by cbindgen from polykan-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum PkStatus {
  PK_STATUS_OK = 0,
  // A pointer was null or an argument violated a precondition.
  PK_STATUS_INVALID_ARGUMENT = 1,
  // Malformed JSON or a schema violation.
  PK_STATUS_PARSE = 2,
  // An evaluation point left the model domain under the `error` policy.
  PK_STATUS_DOMAIN = 3,
  // Incompatible shapes (input vectors, network pairs).
  PK_STATUS_SHAPE_MISMATCH = 4,
  // A panic or other internal failure; see `pk_last_error`.
  PK_STATUS_INTERNAL = 5,
} PkStatus;

// Opaque handle to a loaded network.
typedef struct PkNetwork PkNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version string; static storage, do not free.
const char *pk_version(void);

// Message for the most recent failure on this thread; borrowed until the
// next failing call, do not free.
const char *pk_last_error(void);

// Frees a string returned through a `char**` out-parameter.
//
// # Safety
// `ptr` must be null or a pointer previously returned by this library, not
// freed before.
void pk_string_free(char *ptr);

// Parses a `polykan/1` JSON document into a network handle.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` must be a valid
// pointer.
enum PkStatus pk_network_from_json(const char *json, struct PkNetwork **out);

// Serializes a network to its JSON document; free the result with
// [`pk_string_free`].
//
// # Safety
// `net` must be a live handle; `out` must be a valid pointer.
enum PkStatus pk_network_to_json(const struct PkNetwork *net, char **out);

// Releases a network handle.
//
// # Safety
// `net` must be null or a live handle; it is invalid afterwards.
void pk_network_free(struct PkNetwork *net);

// Input dimension, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
uintptr_t pk_network_input_dim(const struct PkNetwork *net);

// Output dimension, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
uintptr_t pk_network_output_dim(const struct PkNetwork *net);

// Number of layers, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
uintptr_t pk_network_depth(const struct PkNetwork *net);

// Total knot count across all splines, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
uintptr_t pk_network_knot_total(const struct PkNetwork *net);

// Evaluates the network: reads `n` inputs from `xs`, writes `m` outputs to
// `ys`. `n` and `m` must match the network shape exactly.
//
// # Safety
// `xs` must point to `n` readable doubles and `ys` to `m` writable ones.
enum PkStatus pk_network_forward(const struct PkNetwork *net,
                                 const double *xs,
                                 uintptr_t n,
                                 double *ys,
                                 uintptr_t m);

// Compresses the network under a global sup-norm budget `eps` (uniform
// layer budgets, default least-squares fits). On success `out_net` holds a
// new handle and, when `out_report_json` is non-null, it receives the
// `polykan-report/1` document.
//
// # Safety
// `net` must be a live handle; `out_net` must be valid;
// `out_report_json` may be null.
enum PkStatus pk_network_compress(const struct PkNetwork *net,
                                  double eps,
                                  struct PkNetwork **out_net,
                                  char **out_report_json);

// Upper bound on the network's linear region count, written as a decimal
// string (it overflows fixed-width integers quickly); free with
// [`pk_string_free`].
//
// # Safety
// `net` must be a live handle; `out` must be a valid pointer.
enum PkStatus pk_network_region_bound(const struct PkNetwork *net, char **out);

// Sampled sup-norm gap between two networks over their shared input box
// (`points_per_dim` grid resolution, `halton_points` low-discrepancy
// samples).
//
// # Safety
// `a` and `b` must be live handles; `out_gap` must be a valid pointer.
enum PkStatus pk_verify_equivalence(const struct PkNetwork *a,
                                    const struct PkNetwork *b,
                                    uintptr_t points_per_dim,
                                    uintptr_t halton_points,
                                    double *out_gap);

// Generates a synthetic model. `arch` points to `arch_len` layer sizes;
// `target` is one of `random`, `sin`, `exp`, `gauss`, `ramp`.
//
// # Safety
// `arch` must point to `arch_len` readable values; `target` must be a
// valid NUL-terminated string; `out` must be a valid pointer.
enum PkStatus pk_network_generate(const uintptr_t *arch,
                                  uintptr_t arch_len,
                                  uintptr_t degree,
                                  uintptr_t knots_per_spline,
                                  uint64_t seed,
                                  const char *target,
                                  struct PkNetwork **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYKAN_H */
