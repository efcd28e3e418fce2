/*
 * paqs C API.
 *
 * Every object is an opaque handle created by a paqs_*_create / compute
 * function and released with the matching paqs_*_free (NULL is accepted).
 * Fallible functions return a paqs_status; on failure the out-parameter is
 * left untouched and paqs_last_error() describes the problem.  The error
 * message is thread-local and valid until the next failing call on the same
 * thread.
 *
 * Units: positions in micrometers, Hamiltonian entries in 1/cm, propagation
 * distances in centimeters, delta-beta amplitude in 1/mm, z interval in mm,
 * angles in radians.
 */
#ifndef PAQS_PAQS_H
#define PAQS_PAQS_H

#include <stddef.h>
#include <stdint.h>

#if defined(PAQS_BUILDING_LIBRARY)
#define PAQS_API __attribute__((visibility("default")))
#else
#define PAQS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum paqs_status {
  PAQS_OK = 0,
  PAQS_ERR_INVALID_ARGUMENT = 1,
  PAQS_ERR_DOMAIN = 2,
  PAQS_ERR_FORMAT = 3,
  PAQS_ERR_IO = 4,
  PAQS_ERR_NUMERICAL = 5,
  PAQS_ERR_LIMIT = 6,
  PAQS_ERR_BUDGET = 7,
  PAQS_ERR_INTERNAL = 8
} paqs_status;

PAQS_API const char* paqs_version(void);
PAQS_API const char* paqs_last_error(void);
PAQS_API const char* paqs_status_name(paqs_status status);

typedef struct paqs_layout paqs_layout;
typedef struct paqs_hamiltonian paqs_hamiltonian;
typedef struct paqs_cmatrix paqs_cmatrix;
typedef struct paqs_rmatrix paqs_rmatrix;
typedef struct paqs_vector paqs_vector;
typedef struct paqs_series paqs_series;
typedef struct paqs_raster paqs_raster;
typedef struct paqs_profile paqs_profile;
typedef struct paqs_state paqs_state;
typedef struct paqs_distribution paqs_distribution;
typedef struct paqs_mesh paqs_mesh;
typedef struct paqs_bench_report paqs_bench_report;

/* ---- waveguide layouts ------------------------------------------------ */

/* Nodes get labels 1..n in array order; all nodes start stochastic. */
PAQS_API paqs_status paqs_layout_create(const double* x_um, const double* y_um, size_t n, paqs_layout** out);
PAQS_API paqs_status paqs_layout_rectangular(int nx, int ny, double dx_um, double dy_um, paqs_layout** out);
PAQS_API paqs_status paqs_layout_read_positions(const char* path, paqs_layout** out);
PAQS_API paqs_status paqs_layout_write_positions(const paqs_layout* layout, const char* path);
/* New layout with per-node stochastic flags (0/1), one per node in label order. */
PAQS_API paqs_status paqs_layout_with_stochastic(const paqs_layout* layout, const int* flags, size_t n,
                                                 paqs_layout** out);
PAQS_API size_t paqs_layout_size(const paqs_layout* layout);
PAQS_API paqs_status paqs_layout_node(const paqs_layout* layout, int label, double* x_um, double* y_um,
                                      int* stochastic);
PAQS_API double paqs_layout_default_sigma(const paqs_layout* layout);
PAQS_API void paqs_layout_free(paqs_layout* layout);

/* ---- Hamiltonian ------------------------------------------------------ */

typedef struct paqs_coupling_model {
  double amplitude_per_cm;
  double decay_length_um;
  double cutoff_um; /* couplings beyond this spacing are zero; INFINITY disables */
} paqs_coupling_model;

PAQS_API paqs_coupling_model paqs_coupling_default(void);
/* model may be NULL for the default fit. */
PAQS_API paqs_status paqs_coupling_coefficient(double distance_um, const paqs_coupling_model* model, double* out);
PAQS_API paqs_status paqs_hamiltonian_build(const paqs_layout* layout, const paqs_coupling_model* model,
                                            double beta_per_cm, paqs_hamiltonian** out);
PAQS_API paqs_status paqs_hamiltonian_from_matrix(const paqs_cmatrix* matrix, paqs_hamiltonian** out);
PAQS_API size_t paqs_hamiltonian_size(const paqs_hamiltonian* h);
PAQS_API paqs_status paqs_hamiltonian_entry(const paqs_hamiltonian* h, size_t row, size_t col, double* re, double* im);
PAQS_API paqs_status paqs_hamiltonian_write_csv(const paqs_hamiltonian* h, const char* path);
PAQS_API void paqs_hamiltonian_free(paqs_hamiltonian* h);

/* ---- complex matrices ------------------------------------------------- */

/* `interleaved` holds rows*cols (re, im) pairs in row-major order. */
PAQS_API paqs_status paqs_cmatrix_create(size_t rows, size_t cols, const double* interleaved, paqs_cmatrix** out);
PAQS_API size_t paqs_cmatrix_rows(const paqs_cmatrix* m);
PAQS_API size_t paqs_cmatrix_cols(const paqs_cmatrix* m);
PAQS_API paqs_status paqs_cmatrix_entry(const paqs_cmatrix* m, size_t row, size_t col, double* re, double* im);
/* Unitary CSV: M rows of 2M interleaved (re, im) cells. */
PAQS_API paqs_status paqs_cmatrix_read_unitary(const char* path, int modes, paqs_cmatrix** out);
PAQS_API paqs_status paqs_cmatrix_write_unitary(const paqs_cmatrix* m, const char* path);
PAQS_API void paqs_cmatrix_free(paqs_cmatrix* m);

PAQS_API size_t paqs_rmatrix_rows(const paqs_rmatrix* m);
PAQS_API size_t paqs_rmatrix_cols(const paqs_rmatrix* m);
PAQS_API double paqs_rmatrix_get(const paqs_rmatrix* m, size_t row, size_t col);
PAQS_API paqs_status paqs_rmatrix_write_csv(const paqs_rmatrix* m, const char* path);
PAQS_API void paqs_rmatrix_free(paqs_rmatrix* m);

/* ---- real vectors (probabilities, marginals) -------------------------- */

PAQS_API size_t paqs_vector_size(const paqs_vector* v);
PAQS_API const double* paqs_vector_data(const paqs_vector* v);
/* One value per line, no header (the results export). */
PAQS_API paqs_status paqs_vector_write_csv(const paqs_vector* v, const char* path);
PAQS_API void paqs_vector_free(paqs_vector* v);

/* ---- series (100 samples over a z range) ------------------------------ */

PAQS_API size_t paqs_series_items(const paqs_series* s);
PAQS_API size_t paqs_series_points(const paqs_series* s);
PAQS_API double paqs_series_z(const paqs_series* s, size_t point);
PAQS_API double paqs_series_value(const paqs_series* s, size_t item, size_t point);
PAQS_API const char* paqs_series_name(const paqs_series* s, size_t item);
PAQS_API paqs_status paqs_series_write_csv(const paqs_series* s, const char* path);
PAQS_API void paqs_series_free(paqs_series* s);

/* ---- single-photon walks ---------------------------------------------- */

PAQS_API paqs_status paqs_unitary_propagator(const paqs_hamiltonian* h, double z_cm, paqs_cmatrix** out);
PAQS_API paqs_status paqs_qw_evolve(const paqs_hamiltonian* h, int inject, double z_cm, paqs_vector** out);
PAQS_API paqs_status paqs_qw_series(const paqs_hamiltonian* h, int inject, double z0_cm, double z1_cm,
                                    const int* watch, size_t n_watch, paqs_series** out);

/* sigma_um <= 0 selects the default facula width for the layout. */
PAQS_API paqs_status paqs_facula_raster(const paqs_layout* layout, const paqs_vector* probs, int width, int height,
                                        double sigma_um, paqs_raster** out);
PAQS_API void paqs_raster_shape(const paqs_raster* r, int* width, int* height);
/* Row-major, row 0 at the top (largest y). */
PAQS_API const double* paqs_raster_data(const paqs_raster* r);
/* extent = {x_min, x_max, y_min, y_max} in micrometers. */
PAQS_API void paqs_raster_extent(const paqs_raster* r, double extent[4]);
PAQS_API double paqs_raster_sigma(const paqs_raster* r);
PAQS_API paqs_status paqs_raster_write_csv(const paqs_raster* r, const char* path);
PAQS_API void paqs_raster_free(paqs_raster* r);

/* ---- stochastic walks (delta-beta model) ------------------------------ */

typedef struct paqs_dbeta_config {
  double amplitude_per_mm; /* experimentally 0 .. ~1.2 */
  double z_interval_mm;
  int realizations;
  uint64_t seed;
  unsigned threads;     /* 0 or 1: serial */
  double time_budget_s; /* <= 0: unlimited */
} paqs_dbeta_config;

PAQS_API paqs_dbeta_config paqs_dbeta_default(void);
/* `flags_from` (nullable) supplies per-node stochastic flags; NULL: all nodes. */
PAQS_API paqs_status paqs_qsw_run(const paqs_hamiltonian* h, const paqs_layout* flags_from,
                                  const paqs_dbeta_config* cfg, int inject, double z_cm, paqs_vector** out);
PAQS_API paqs_status paqs_qsw_series(const paqs_hamiltonian* h, const paqs_layout* flags_from,
                                     const paqs_dbeta_config* cfg, int inject, double z0_cm, double z1_cm,
                                     const int* watch, size_t n_watch, paqs_series** out);
PAQS_API paqs_status paqs_profile_sample(const paqs_layout* layout, const paqs_dbeta_config* cfg, double z_max_cm,
                                         uint64_t realization, paqs_profile** out);
PAQS_API size_t paqs_profile_segments(const paqs_profile* p);
PAQS_API paqs_status paqs_profile_write_csv(const paqs_profile* p, const char* path);
PAQS_API void paqs_profile_free(paqs_profile* p);

/* ---- multi-particle states and distributions -------------------------- */

typedef enum paqs_statistics {
  PAQS_BOSONIC = 0,
  PAQS_FERMIONIC = 1,
  PAQS_DISTINGUISHABLE = 2
} paqs_statistics;

typedef enum paqs_distinguishable_formula {
  PAQS_DISTINGUISHABLE_PER_DET_AVERAGE = 0,
  PAQS_DISTINGUISHABLE_INDEPENDENT = 1
} paqs_distinguishable_formula;

typedef enum paqs_state_format { PAQS_STATE_AUTO = 0, PAQS_STATE_DENSE = 1, PAQS_STATE_SPARSE = 2 } paqs_state_format;

typedef struct paqs_multi_options {
  paqs_distinguishable_formula distinguishable;
  unsigned threads;
} paqs_multi_options;

PAQS_API paqs_status paqs_statistics_parse(const char* name, paqs_statistics* out);
PAQS_API paqs_status paqs_state_parse(const char* text, int modes, paqs_state** out);
PAQS_API paqs_status paqs_state_create(const int* occupations, size_t modes, paqs_state** out);
PAQS_API int paqs_state_modes(const paqs_state* s);
PAQS_API int paqs_state_photons(const paqs_state* s);
PAQS_API int paqs_state_occupation(const paqs_state* s, int mode);
/* Writes a NUL-terminated string into buf when it fits; *needed gets the
 * length including the terminator either way. */
PAQS_API paqs_status paqs_state_to_string(const paqs_state* s, paqs_state_format format, char* buf, size_t capacity,
                                       size_t* needed);
PAQS_API void paqs_state_free(paqs_state* s);

/* opts may be NULL for defaults. */
PAQS_API paqs_status paqs_transition_probability(const paqs_cmatrix* u, const paqs_state* in, const paqs_state* out_state,
                                                 paqs_statistics stats, const paqs_multi_options* opts, double* out);
PAQS_API paqs_status paqs_multi_distribution(const paqs_cmatrix* u, const paqs_state* in, paqs_statistics stats,
                                             const paqs_multi_options* opts, paqs_distribution** out);
PAQS_API paqs_status paqs_two_particle_correlation(const paqs_cmatrix* u, const paqs_state* in, paqs_statistics stats,
                                                   const paqs_state* fixed, const paqs_multi_options* opts,
                                                   paqs_rmatrix** out);
PAQS_API paqs_status paqs_single_photon_marginal(const paqs_distribution* d, paqs_vector** out);
PAQS_API paqs_status paqs_state_series(const paqs_hamiltonian* h, const paqs_state* in, paqs_statistics stats,
                                       const paqs_state* const* watch, size_t n_watch, double z0_cm, double z1_cm,
                                       const paqs_multi_options* opts, paqs_series** out);

PAQS_API size_t paqs_distribution_size(const paqs_distribution* d);
PAQS_API double paqs_distribution_probability(const paqs_distribution* d, size_t index);
PAQS_API paqs_status paqs_distribution_state(const paqs_distribution* d, size_t index, paqs_state** out);
PAQS_API double paqs_distribution_total(const paqs_distribution* d);
PAQS_API paqs_status paqs_distribution_write_csv(const paqs_distribution* d, const char* path);
PAQS_API void paqs_distribution_free(paqs_distribution* d);

/* ---- interferometer meshes -------------------------------------------- */

typedef enum paqs_mesh_style { PAQS_MESH_RECK = 0, PAQS_MESH_CLEMENTS = 1 } paqs_mesh_style;

PAQS_API paqs_status paqs_mesh_style_parse(const char* name, paqs_mesh_style* out);
PAQS_API paqs_status paqs_mesh_zero(paqs_mesh_style style, int modes, paqs_mesh** out);
PAQS_API paqs_status paqs_mesh_random(paqs_mesh_style style, int modes, uint64_t seed, paqs_mesh** out);
PAQS_API paqs_status paqs_mesh_read_parameters(paqs_mesh_style style, int modes, const char* path, paqs_mesh** out);
PAQS_API paqs_status paqs_mesh_write_parameters(const paqs_mesh* mesh, const char* path);
PAQS_API size_t paqs_mesh_splitters(const paqs_mesh* mesh);
PAQS_API paqs_status paqs_mesh_splitter(const paqs_mesh* mesh, int order, int* mode, double* theta, double* phi);
PAQS_API paqs_status paqs_mesh_set_splitter(paqs_mesh* mesh, int order, double theta, double phi);
PAQS_API paqs_status paqs_mesh_compose(const paqs_mesh* mesh, paqs_cmatrix** out);
PAQS_API void paqs_mesh_free(paqs_mesh* mesh);

/* Board positions; each array needs room for modes*(modes-1)/2 entries.
 * Any array may be NULL.  *count receives the number of splitters. */
PAQS_API paqs_status paqs_mesh_layout(paqs_mesh_style style, int modes, int* orders, int* channel_m, int* columns,
                                      double* rows, size_t capacity, size_t* count);

PAQS_API paqs_status paqs_check_unitary(const paqs_cmatrix* u, double tol, int* pass, double* max_deviation);
/* Bosonic distribution; fails with PAQS_ERR_NUMERICAL if u is not unitary within tol. */
PAQS_API paqs_status paqs_boson_sampling(const paqs_cmatrix* u, const paqs_state* in, double tol,
                                         const paqs_multi_options* opts, paqs_distribution** out);

/* ---- permanents ------------------------------------------------------- */

typedef enum paqs_permanent_algorithm {
  PAQS_PERM_NAIVE = 0,
  PAQS_PERM_RYSER = 1,
  PAQS_PERM_RYSER_GRAY = 2,
  PAQS_PERM_GLYNN = 3,
  PAQS_PERM_GLYNN_GRAY = 4,
  PAQS_PERM_DISPATCH = 5
} paqs_permanent_algorithm;

/* `route` (nullable) receives the kernel that actually ran. */
PAQS_API paqs_status paqs_permanent(const paqs_cmatrix* m, paqs_permanent_algorithm algo, double* re, double* im,
                                    paqs_permanent_algorithm* route);
PAQS_API paqs_status paqs_determinant(const paqs_cmatrix* m, double* re, double* im);
PAQS_API const char* paqs_permanent_algorithm_name(paqs_permanent_algorithm algo);

PAQS_API paqs_status paqs_bench_permanents(int n_min, int n_max, int trials, uint64_t seed, paqs_bench_report** out);
PAQS_API size_t paqs_bench_size(const paqs_bench_report* r);
PAQS_API paqs_status paqs_bench_entry(const paqs_bench_report* r, size_t index, paqs_permanent_algorithm* algo,
                                      int* n, double* median_ns, double* relative_error);
PAQS_API paqs_status paqs_bench_write_csv(const paqs_bench_report* r, const char* path);
PAQS_API void paqs_bench_free(paqs_bench_report* r);

#ifdef __cplusplus
}
#endif

#endif /* PAQS_PAQS_H */
