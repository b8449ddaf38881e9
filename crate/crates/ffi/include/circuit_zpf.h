#ifndef CIRCUIT_ZPF_H
#define CIRCUIT_ZPF_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZpfStatus {
  ZPF_STATUS_OK = 0,
  ZPF_STATUS_NULL_POINTER = 1,
  ZPF_STATUS_INVALID_ARGUMENT = 2,
  ZPF_STATUS_PARSE_ERROR = 3,
  // The raw integral diverges; use the renormalized energy.
  ZPF_STATUS_REQUIRES_RENORMALIZATION = 4,
  ZPF_STATUS_NUMERICAL_FAILURE = 5,
  ZPF_STATUS_PANIC = 6,
} ZpfStatus;

// Opaque network handle.
typedef struct ZpfNetwork ZpfNetwork;

typedef struct ZpfConfig {
  double rel_tol;
  double abs_tol;
  size_t max_panels;
  // Element size `l` (m) setting the validity cutoff `c/l`.
  double element_size;
  double max_tail_fraction;
} ZpfConfig;

typedef struct ZpfEnergyResult {
  double energy;
  double abs_error;
  double tail_fraction;
  double time_scale;
  double decay_exponent;
  bool renormalized;
  bool reference_energy_defined;
  bool validity_ok;
} ZpfEnergyResult;

typedef struct ZpfForceResult {
  double force;
  double capacitance;
  double tail_fraction;
  bool renormalized;
  bool validity_ok;
} ZpfForceResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Owned by the library.
const char *zpf_last_error(void);

// Library version as a static string.
const char *zpf_version(void);

// Default numerical settings.
struct ZpfConfig zpf_config_default(void);

// Parses netlist text into a new handle.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum ZpfStatus zpf_network_parse(const char *text, struct ZpfNetwork **out);

// Built-in circuit `"I"`, `"II"`, `"III"`, `"IV"` or `"parallel-rc"`;
// parameters the circuit does not use are ignored.
//
// # Safety
// `id` must be a nul-terminated string; `out` must be writable.
enum ZpfStatus zpf_network_builtin(const char *id,
                                   double r,
                                   double l,
                                   double c0,
                                   double c,
                                   struct ZpfNetwork **out);

// Releases a handle; null is ignored.
//
// # Safety
// `net` must come from this library and not be used afterwards.
void zpf_network_free(struct ZpfNetwork *net);

// Canonical netlist text; release with `zpf_string_free`.
//
// # Safety
// `net` must be a live handle; `out` must be writable.
enum ZpfStatus zpf_network_unparse(const struct ZpfNetwork *net, char **out);

// # Safety
// `s` must come from this library; null is ignored.
void zpf_string_free(char *s);

// Changes the value of a named element in place.
//
// # Safety
// `net` must be a live handle; `name` a nul-terminated string.
enum ZpfStatus zpf_network_set_value(struct ZpfNetwork *net, const char *name, double value);

// Port impedance `Z(ω)` (Ω).
//
// # Safety
// `net` must be a live handle; `re` and `im` writable.
enum ZpfStatus zpf_impedance(const struct ZpfNetwork *net, double omega, double *re, double *im);

// Zero-point energy of a capacitor `c` (F) across the port. `cfg` may be
// null for defaults.
//
// # Safety
// `net` must be a live handle; `out` writable; `cfg` null or valid.
enum ZpfStatus zpf_energy(const struct ZpfNetwork *net,
                          double c,
                          bool renormalize,
                          const struct ZpfConfig *cfg,
                          struct ZpfEnergyResult *out);

// Force (N) between parallel plates of area `area` (m²) at separation `y`
// (m); positive is repulsive.
//
// # Safety
// `net` must be a live handle; `out` writable; `cfg` null or valid.
enum ZpfStatus zpf_force_parallel_plate(const struct ZpfNetwork *net,
                                        double area,
                                        double y,
                                        const struct ZpfConfig *cfg,
                                        struct ZpfForceResult *out);

// Closed-form renormalized energy of a built-in circuit with probed
// capacitance `c`.
//
// # Safety
// `id` must be a nul-terminated string; `out` writable.
enum ZpfStatus zpf_closed_form(const char *id,
                               double r,
                               double l,
                               double c0,
                               double c,
                               double *out);

// Plasma-model Casimir force (N, negative = attractive).
//
// # Safety
// `out` must be writable.
enum ZpfStatus zpf_casimir_plasma(double area, double y, double lambda_p, double *out);

// Shift `δ` and width `γ` (rad/s) of the 0→1 transition of a transmon with
// `ω0` (rad/s), `√(E_C/8E_J) = ratio` and coupling `β`, across a parallel RC.
//
// # Safety
// `delta` and `gamma` must be writable.
enum ZpfStatus zpf_level_shift_parallel_rc(double omega0,
                                           double ratio,
                                           double beta,
                                           double r,
                                           double c,
                                           double *delta,
                                           double *gamma);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCUIT_ZPF_H */
