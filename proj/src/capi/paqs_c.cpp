#include "paqs/paqs.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "paqs/bench.hpp"
#include "paqs/error.hpp"
#include "paqs/fock.hpp"
#include "paqs/formats.hpp"
#include "paqs/lattice.hpp"
#include "paqs/mesh.hpp"
#include "paqs/permanent.hpp"
#include "paqs/propagator.hpp"
#include "paqs/stochastic.hpp"

struct paqs_layout {
  paqs::WaveguideLayout value;
};
struct paqs_hamiltonian {
  paqs::Hamiltonian value;
};
struct paqs_cmatrix {
  paqs::ComplexMatrix value;
};
struct paqs_rmatrix {
  paqs::RealMatrix value;
};
struct paqs_vector {
  std::vector<double> value;
};
struct paqs_series {
  paqs::ProbabilitySeries value;
};
struct paqs_raster {
  paqs::FaculaRaster value;
};
struct paqs_profile {
  paqs::DBetaProfile value;
};
struct paqs_state {
  paqs::FockConfiguration value;
};
struct paqs_distribution {
  paqs::OutputDistribution value;
};
struct paqs_mesh {
  paqs::MeshSpec value;
};
struct paqs_bench_report {
  paqs::BenchReport value;
};

namespace {

thread_local std::string g_last_error;

paqs_status status_of(paqs::ErrorKind kind) {
  switch (kind) {
    case paqs::ErrorKind::InvalidArgument: return PAQS_ERR_INVALID_ARGUMENT;
    case paqs::ErrorKind::Domain: return PAQS_ERR_DOMAIN;
    case paqs::ErrorKind::Format: return PAQS_ERR_FORMAT;
    case paqs::ErrorKind::Io: return PAQS_ERR_IO;
    case paqs::ErrorKind::Numerical: return PAQS_ERR_NUMERICAL;
    case paqs::ErrorKind::Limit: return PAQS_ERR_LIMIT;
    case paqs::ErrorKind::Budget: return PAQS_ERR_BUDGET;
  }
  return PAQS_ERR_INTERNAL;
}

template <class F>
paqs_status guarded(F&& body) {
  try {
    body();
    return PAQS_OK;
  } catch (const paqs::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PAQS_ERR_LIMIT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PAQS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PAQS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) paqs::fail(paqs::ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

paqs::CouplingModel model_of(const paqs_coupling_model* m) {
  if (m == nullptr) return {};
  return paqs::CouplingModel{m->amplitude_per_cm, m->decay_length_um, m->cutoff_um};
}

paqs::MultiParticleOptions options_of(const paqs_multi_options* o) {
  paqs::MultiParticleOptions opts;
  if (o == nullptr) return opts;
  switch (o->distinguishable) {
    case PAQS_DISTINGUISHABLE_PER_DET_AVERAGE: opts.distinguishable = paqs::DistinguishableFormula::PerDetAverage; break;
    case PAQS_DISTINGUISHABLE_INDEPENDENT: opts.distinguishable = paqs::DistinguishableFormula::IndependentPhotons; break;
    default: paqs::fail(paqs::ErrorKind::InvalidArgument, "unknown distinguishable formula");
  }
  opts.threads = o->threads == 0 ? 1 : o->threads;
  return opts;
}

paqs::ParticleStatistics stats_of(paqs_statistics s) {
  switch (s) {
    case PAQS_BOSONIC: return paqs::ParticleStatistics::Bosonic;
    case PAQS_FERMIONIC: return paqs::ParticleStatistics::Fermionic;
    case PAQS_DISTINGUISHABLE: return paqs::ParticleStatistics::Distinguishable;
  }
  paqs::fail(paqs::ErrorKind::InvalidArgument, "unknown particle statistics");
}

paqs::MeshStyle style_of(paqs_mesh_style s) {
  switch (s) {
    case PAQS_MESH_RECK: return paqs::MeshStyle::Reck;
    case PAQS_MESH_CLEMENTS: return paqs::MeshStyle::Clements;
  }
  paqs::fail(paqs::ErrorKind::InvalidArgument, "unknown mesh style");
}

paqs::PermanentAlgorithm algo_of(paqs_permanent_algorithm a) {
  switch (a) {
    case PAQS_PERM_NAIVE: return paqs::PermanentAlgorithm::Naive;
    case PAQS_PERM_RYSER: return paqs::PermanentAlgorithm::Ryser;
    case PAQS_PERM_RYSER_GRAY: return paqs::PermanentAlgorithm::RyserGray;
    case PAQS_PERM_GLYNN: return paqs::PermanentAlgorithm::Glynn;
    case PAQS_PERM_GLYNN_GRAY: return paqs::PermanentAlgorithm::GlynnGray;
    case PAQS_PERM_DISPATCH: return paqs::PermanentAlgorithm::Dispatch;
  }
  paqs::fail(paqs::ErrorKind::InvalidArgument, "unknown permanent algorithm");
}

paqs_permanent_algorithm algo_to_c(paqs::PermanentAlgorithm a) {
  switch (a) {
    case paqs::PermanentAlgorithm::Naive: return PAQS_PERM_NAIVE;
    case paqs::PermanentAlgorithm::Ryser: return PAQS_PERM_RYSER;
    case paqs::PermanentAlgorithm::RyserGray: return PAQS_PERM_RYSER_GRAY;
    case paqs::PermanentAlgorithm::Glynn: return PAQS_PERM_GLYNN;
    case paqs::PermanentAlgorithm::GlynnGray: return PAQS_PERM_GLYNN_GRAY;
    case paqs::PermanentAlgorithm::Dispatch: return PAQS_PERM_DISPATCH;
  }
  return PAQS_PERM_DISPATCH;
}

paqs::DBetaConfig dbeta_of(const paqs_dbeta_config* c, const paqs_layout* flags_from) {
  need(c, "config");
  paqs::DBetaConfig cfg;
  cfg.amplitude_per_mm = c->amplitude_per_mm;
  cfg.z_interval_mm = c->z_interval_mm;
  cfg.realizations = c->realizations;
  cfg.seed = c->seed;
  if (flags_from != nullptr) cfg.stochastic_flags = flags_from->value.stochastic_flags();
  return cfg;
}

paqs::EnsembleOptions ensemble_of(const paqs_dbeta_config* c) {
  paqs::EnsembleOptions opts;
  opts.threads = c->threads == 0 ? 1 : c->threads;
  if (c->time_budget_s > 0 && std::isfinite(c->time_budget_s)) {
    opts.deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(c->time_budget_s));
  }
  return opts;
}

std::vector<int> watch_of(const int* watch, std::size_t n) {
  if (n > 0) need(watch, "watch");
  return std::vector<int>(watch, watch + n);
}

void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    paqs::fail(paqs::ErrorKind::InvalidArgument,
               std::string(what) + " index " + std::to_string(i) + " out of range (size " + std::to_string(n) + ")");
  }
}

}  // namespace

extern "C" {

const char* paqs_version(void) { return PAQS_VERSION; }
const char* paqs_last_error(void) { return g_last_error.c_str(); }

const char* paqs_status_name(paqs_status status) {
  switch (status) {
    case PAQS_OK: return "ok";
    case PAQS_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case PAQS_ERR_DOMAIN: return "domain";
    case PAQS_ERR_FORMAT: return "format";
    case PAQS_ERR_IO: return "io";
    case PAQS_ERR_NUMERICAL: return "numerical";
    case PAQS_ERR_LIMIT: return "limit";
    case PAQS_ERR_BUDGET: return "budget";
    case PAQS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

/* layouts */

paqs_status paqs_layout_create(const double* x_um, const double* y_um, size_t n, paqs_layout** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) {
      need(x_um, "x_um");
      need(y_um, "y_um");
    }
    std::vector<paqs::Node> nodes;
    nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({static_cast<int>(i + 1), x_um[i], y_um[i]});
    *out = new paqs_layout{paqs::WaveguideLayout(std::move(nodes))};
  });
}

paqs_status paqs_layout_rectangular(int nx, int ny, double dx_um, double dy_um, paqs_layout** out) {
  return guarded([&] {
    need(out, "out");
    *out = new paqs_layout{paqs::rectangular_lattice(nx, ny, dx_um, dy_um)};
  });
}

paqs_status paqs_layout_read_positions(const char* path, paqs_layout** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new paqs_layout{paqs::formats::read_positions(path)};
  });
}

paqs_status paqs_layout_write_positions(const paqs_layout* layout, const char* path) {
  return guarded([&] {
    need(layout, "layout");
    need(path, "path");
    paqs::formats::write_positions(layout->value, path);
  });
}

paqs_status paqs_layout_with_stochastic(const paqs_layout* layout, const int* flags, size_t n, paqs_layout** out) {
  return guarded([&] {
    need(layout, "layout");
    need(out, "out");
    if (n > 0) need(flags, "flags");
    std::vector<bool> f;
    f.reserve(n);
    for (std::size_t i = 0; i < n; ++i) f.push_back(flags[i] != 0);
    *out = new paqs_layout{layout->value.with_stochastic_flags(std::move(f))};
  });
}

size_t paqs_layout_size(const paqs_layout* layout) { return layout ? layout->value.size() : 0; }

paqs_status paqs_layout_node(const paqs_layout* layout, int label, double* x_um, double* y_um, int* stochastic) {
  return guarded([&] {
    need(layout, "layout");
    const paqs::Node& node = layout->value.node(label);
    if (x_um) *x_um = node.x_um;
    if (y_um) *y_um = node.y_um;
    if (stochastic) *stochastic = layout->value.is_stochastic(label) ? 1 : 0;
  });
}

double paqs_layout_default_sigma(const paqs_layout* layout) {
  return layout ? paqs::default_facula_sigma(layout->value) : 0.0;
}

void paqs_layout_free(paqs_layout* layout) { delete layout; }

/* Hamiltonian */

paqs_coupling_model paqs_coupling_default(void) {
  paqs::CouplingModel m;
  return {m.amplitude_per_cm, m.decay_length_um, m.cutoff_um};
}

paqs_status paqs_coupling_coefficient(double distance_um, const paqs_coupling_model* model, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = paqs::coupling_coefficient(distance_um, model_of(model));
  });
}

paqs_status paqs_hamiltonian_build(const paqs_layout* layout, const paqs_coupling_model* model, double beta_per_cm,
                                   paqs_hamiltonian** out) {
  return guarded([&] {
    need(layout, "layout");
    need(out, "out");
    *out = new paqs_hamiltonian{paqs::build_hamiltonian(layout->value, model_of(model), beta_per_cm)};
  });
}

paqs_status paqs_hamiltonian_from_matrix(const paqs_cmatrix* matrix, paqs_hamiltonian** out) {
  return guarded([&] {
    need(matrix, "matrix");
    need(out, "out");
    *out = new paqs_hamiltonian{paqs::Hamiltonian(matrix->value)};
  });
}

size_t paqs_hamiltonian_size(const paqs_hamiltonian* h) { return h ? h->value.size() : 0; }

paqs_status paqs_hamiltonian_entry(const paqs_hamiltonian* h, size_t row, size_t col, double* re, double* im) {
  return guarded([&] {
    need(h, "hamiltonian");
    check_index(row, h->value.size(), "row");
    check_index(col, h->value.size(), "column");
    const paqs::Complex v = h->value.matrix()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

paqs_status paqs_hamiltonian_write_csv(const paqs_hamiltonian* h, const char* path) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::hamiltonian_csv(h->value));
  });
}

void paqs_hamiltonian_free(paqs_hamiltonian* h) { delete h; }

/* complex and real matrices */

paqs_status paqs_cmatrix_create(size_t rows, size_t cols, const double* interleaved, paqs_cmatrix** out) {
  return guarded([&] {
    need(out, "out");
    if (rows * cols > 0) need(interleaved, "data");
    paqs::ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double* p = interleaved + 2 * (i * cols + j);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = paqs::Complex(p[0], p[1]);
      }
    }
    *out = new paqs_cmatrix{std::move(m)};
  });
}

size_t paqs_cmatrix_rows(const paqs_cmatrix* m) { return m ? static_cast<size_t>(m->value.rows()) : 0; }
size_t paqs_cmatrix_cols(const paqs_cmatrix* m) { return m ? static_cast<size_t>(m->value.cols()) : 0; }

paqs_status paqs_cmatrix_entry(const paqs_cmatrix* m, size_t row, size_t col, double* re, double* im) {
  return guarded([&] {
    need(m, "matrix");
    check_index(row, static_cast<std::size_t>(m->value.rows()), "row");
    check_index(col, static_cast<std::size_t>(m->value.cols()), "column");
    const paqs::Complex v = m->value(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

paqs_status paqs_cmatrix_read_unitary(const char* path, int modes, paqs_cmatrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new paqs_cmatrix{paqs::formats::read_unitary(path, modes)};
  });
}

paqs_status paqs_cmatrix_write_unitary(const paqs_cmatrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    paqs::formats::write_unitary(m->value, path);
  });
}

void paqs_cmatrix_free(paqs_cmatrix* m) { delete m; }

size_t paqs_rmatrix_rows(const paqs_rmatrix* m) { return m ? static_cast<size_t>(m->value.rows()) : 0; }
size_t paqs_rmatrix_cols(const paqs_rmatrix* m) { return m ? static_cast<size_t>(m->value.cols()) : 0; }

double paqs_rmatrix_get(const paqs_rmatrix* m, size_t row, size_t col) {
  if (m == nullptr || row >= static_cast<size_t>(m->value.rows()) || col >= static_cast<size_t>(m->value.cols())) {
    return std::nan("");
  }
  return m->value(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

paqs_status paqs_rmatrix_write_csv(const paqs_rmatrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::real_matrix_csv(m->value));
  });
}

void paqs_rmatrix_free(paqs_rmatrix* m) { delete m; }

/* vectors */

size_t paqs_vector_size(const paqs_vector* v) { return v ? v->value.size() : 0; }
const double* paqs_vector_data(const paqs_vector* v) { return v ? v->value.data() : nullptr; }

paqs_status paqs_vector_write_csv(const paqs_vector* v, const char* path) {
  return guarded([&] {
    need(v, "vector");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::real_vector_csv(v->value));
  });
}

void paqs_vector_free(paqs_vector* v) { delete v; }

/* series */

size_t paqs_series_items(const paqs_series* s) { return s ? s->value.values.size() : 0; }
size_t paqs_series_points(const paqs_series* s) { return s ? s->value.z_cm.size() : 0; }

double paqs_series_z(const paqs_series* s, size_t point) {
  if (s == nullptr || point >= s->value.z_cm.size()) return std::nan("");
  return s->value.z_cm[point];
}

double paqs_series_value(const paqs_series* s, size_t item, size_t point) {
  if (s == nullptr || item >= s->value.values.size() || point >= s->value.values[item].size()) return std::nan("");
  return s->value.values[item][point];
}

const char* paqs_series_name(const paqs_series* s, size_t item) {
  if (s == nullptr || item >= s->value.names.size()) return nullptr;
  return s->value.names[item].c_str();
}

paqs_status paqs_series_write_csv(const paqs_series* s, const char* path) {
  return guarded([&] {
    need(s, "series");
    need(path, "path");
    paqs::formats::write_series(s->value, path);
  });
}

void paqs_series_free(paqs_series* s) { delete s; }

/* single-photon walks */

paqs_status paqs_unitary_propagator(const paqs_hamiltonian* h, double z_cm, paqs_cmatrix** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(out, "out");
    *out = new paqs_cmatrix{paqs::unitary_propagator(h->value, z_cm)};
  });
}

paqs_status paqs_qw_evolve(const paqs_hamiltonian* h, int inject, double z_cm, paqs_vector** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(out, "out");
    *out = new paqs_vector{paqs::evolve(h->value, inject, z_cm).probs};
  });
}

paqs_status paqs_qw_series(const paqs_hamiltonian* h, int inject, double z0_cm, double z1_cm, const int* watch,
                           size_t n_watch, paqs_series** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(out, "out");
    *out = new paqs_series{paqs::probability_series(h->value, inject, z0_cm, z1_cm, watch_of(watch, n_watch))};
  });
}

paqs_status paqs_facula_raster(const paqs_layout* layout, const paqs_vector* probs, int width, int height,
                               double sigma_um, paqs_raster** out) {
  return guarded([&] {
    need(layout, "layout");
    need(probs, "probs");
    need(out, "out");
    const double sigma = sigma_um > 0 ? sigma_um : paqs::default_facula_sigma(layout->value);
    *out = new paqs_raster{
        paqs::facula_raster(layout->value, paqs::ProbabilityDistribution{probs->value}, width, height, sigma)};
  });
}

void paqs_raster_shape(const paqs_raster* r, int* width, int* height) {
  if (width) *width = r ? r->value.width : 0;
  if (height) *height = r ? r->value.height : 0;
}

const double* paqs_raster_data(const paqs_raster* r) { return r ? r->value.grid.data() : nullptr; }

void paqs_raster_extent(const paqs_raster* r, double extent[4]) {
  if (r == nullptr || extent == nullptr) return;
  extent[0] = r->value.x_min;
  extent[1] = r->value.x_max;
  extent[2] = r->value.y_min;
  extent[3] = r->value.y_max;
}

double paqs_raster_sigma(const paqs_raster* r) { return r ? r->value.sigma_um : 0.0; }

paqs_status paqs_raster_write_csv(const paqs_raster* r, const char* path) {
  return guarded([&] {
    need(r, "raster");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::raster_csv(r->value));
  });
}

void paqs_raster_free(paqs_raster* r) { delete r; }

/* stochastic walks */

paqs_dbeta_config paqs_dbeta_default(void) {
  paqs::DBetaConfig c;
  return {c.amplitude_per_mm, c.z_interval_mm, c.realizations, c.seed, 1u, 0.0};
}

paqs_status paqs_qsw_run(const paqs_hamiltonian* h, const paqs_layout* flags_from, const paqs_dbeta_config* cfg,
                         int inject, double z_cm, paqs_vector** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(out, "out");
    const paqs::DBetaConfig c = dbeta_of(cfg, flags_from);
    *out = new paqs_vector{paqs::qsw_run(h->value, c, inject, z_cm, ensemble_of(cfg)).probs};
  });
}

paqs_status paqs_qsw_series(const paqs_hamiltonian* h, const paqs_layout* flags_from, const paqs_dbeta_config* cfg,
                            int inject, double z0_cm, double z1_cm, const int* watch, size_t n_watch,
                            paqs_series** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(out, "out");
    const paqs::DBetaConfig c = dbeta_of(cfg, flags_from);
    *out = new paqs_series{
        paqs::qsw_series(h->value, c, inject, z0_cm, z1_cm, watch_of(watch, n_watch), ensemble_of(cfg))};
  });
}

paqs_status paqs_profile_sample(const paqs_layout* layout, const paqs_dbeta_config* cfg, double z_max_cm,
                                uint64_t realization, paqs_profile** out) {
  return guarded([&] {
    need(layout, "layout");
    need(out, "out");
    const paqs::DBetaConfig c = dbeta_of(cfg, layout);
    *out = new paqs_profile{paqs::sample_dbeta_profile(c, layout->value.size(), z_max_cm, realization)};
  });
}

size_t paqs_profile_segments(const paqs_profile* p) { return p ? p->value.segments.size() : 0; }

paqs_status paqs_profile_write_csv(const paqs_profile* p, const char* path) {
  return guarded([&] {
    need(p, "profile");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::profile_csv(p->value));
  });
}

void paqs_profile_free(paqs_profile* p) { delete p; }

/* multi-particle */

paqs_status paqs_statistics_parse(const char* name, paqs_statistics* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    switch (paqs::particle_statistics_from_string(name)) {
      case paqs::ParticleStatistics::Bosonic: *out = PAQS_BOSONIC; break;
      case paqs::ParticleStatistics::Fermionic: *out = PAQS_FERMIONIC; break;
      case paqs::ParticleStatistics::Distinguishable: *out = PAQS_DISTINGUISHABLE; break;
    }
  });
}

paqs_status paqs_state_parse(const char* text, int modes, paqs_state** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new paqs_state{paqs::parse_state(text, modes)};
  });
}

paqs_status paqs_state_create(const int* occupations, size_t modes, paqs_state** out) {
  return guarded([&] {
    need(out, "out");
    if (modes > 0) need(occupations, "occupations");
    *out = new paqs_state{paqs::FockConfiguration(std::vector<int>(occupations, occupations + modes))};
  });
}

int paqs_state_modes(const paqs_state* s) { return s ? s->value.modes() : 0; }
int paqs_state_photons(const paqs_state* s) { return s ? s->value.photons() : 0; }

int paqs_state_occupation(const paqs_state* s, int mode) {
  if (s == nullptr || mode < 1 || mode > s->value.modes()) return -1;
  return s->value[mode - 1];
}

paqs_status paqs_state_to_string(const paqs_state* s, paqs_state_format format, char* buf, size_t capacity,
                              size_t* needed) {
  return guarded([&] {
    need(s, "state");
    paqs::StateFormat f = paqs::StateFormat::Auto;
    if (format == PAQS_STATE_DENSE) f = paqs::StateFormat::Dense;
    else if (format == PAQS_STATE_SPARSE) f = paqs::StateFormat::Sparse;
    else if (format != PAQS_STATE_AUTO) paqs::fail(paqs::ErrorKind::InvalidArgument, "unknown state format");
    const std::string text = paqs::format_state(s->value, f);
    if (needed) *needed = text.size() + 1;
    if (buf != nullptr && capacity > text.size()) std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

void paqs_state_free(paqs_state* s) { delete s; }

paqs_status paqs_transition_probability(const paqs_cmatrix* u, const paqs_state* in, const paqs_state* out_state,
                                        paqs_statistics stats, const paqs_multi_options* opts, double* out) {
  return guarded([&] {
    need(u, "unitary");
    need(in, "input state");
    need(out_state, "output state");
    need(out, "out");
    *out = paqs::transition_probability(u->value, in->value, out_state->value, stats_of(stats), options_of(opts));
  });
}

paqs_status paqs_multi_distribution(const paqs_cmatrix* u, const paqs_state* in, paqs_statistics stats,
                                    const paqs_multi_options* opts, paqs_distribution** out) {
  return guarded([&] {
    need(u, "unitary");
    need(in, "input state");
    need(out, "out");
    *out = new paqs_distribution{paqs::full_distribution(u->value, in->value, stats_of(stats), options_of(opts))};
  });
}

paqs_status paqs_two_particle_correlation(const paqs_cmatrix* u, const paqs_state* in, paqs_statistics stats,
                                          const paqs_state* fixed, const paqs_multi_options* opts,
                                          paqs_rmatrix** out) {
  return guarded([&] {
    need(u, "unitary");
    need(in, "input state");
    need(fixed, "fixed state");
    need(out, "out");
    *out = new paqs_rmatrix{
        paqs::two_particle_correlation(u->value, in->value, stats_of(stats), fixed->value, options_of(opts))};
  });
}

paqs_status paqs_single_photon_marginal(const paqs_distribution* d, paqs_vector** out) {
  return guarded([&] {
    need(d, "distribution");
    need(out, "out");
    *out = new paqs_vector{paqs::single_photon_marginal(d->value)};
  });
}

paqs_status paqs_state_series(const paqs_hamiltonian* h, const paqs_state* in, paqs_statistics stats,
                              const paqs_state* const* watch, size_t n_watch, double z0_cm, double z1_cm,
                              const paqs_multi_options* opts, paqs_series** out) {
  return guarded([&] {
    need(h, "hamiltonian");
    need(in, "input state");
    need(out, "out");
    if (n_watch > 0) need(watch, "watch");
    std::vector<paqs::FockConfiguration> w;
    w.reserve(n_watch);
    for (std::size_t i = 0; i < n_watch; ++i) {
      need(watch[i], "watch entry");
      w.push_back(watch[i]->value);
    }
    *out = new paqs_series{
        paqs::state_probability_series(h->value, in->value, stats_of(stats), w, z0_cm, z1_cm, options_of(opts))};
  });
}

size_t paqs_distribution_size(const paqs_distribution* d) { return d ? d->value.entries.size() : 0; }

double paqs_distribution_probability(const paqs_distribution* d, size_t index) {
  if (d == nullptr || index >= d->value.entries.size()) return std::nan("");
  return d->value.entries[index].second;
}

paqs_status paqs_distribution_state(const paqs_distribution* d, size_t index, paqs_state** out) {
  return guarded([&] {
    need(d, "distribution");
    need(out, "out");
    check_index(index, d->value.entries.size(), "distribution");
    *out = new paqs_state{d->value.entries[index].first};
  });
}

double paqs_distribution_total(const paqs_distribution* d) { return d ? d->value.total() : 0.0; }

paqs_status paqs_distribution_write_csv(const paqs_distribution* d, const char* path) {
  return guarded([&] {
    need(d, "distribution");
    need(path, "path");
    paqs::formats::write_distribution(d->value, path);
  });
}

void paqs_distribution_free(paqs_distribution* d) { delete d; }

/* meshes */

paqs_status paqs_mesh_style_parse(const char* name, paqs_mesh_style* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = paqs::mesh_style_from_string(name) == paqs::MeshStyle::Reck ? PAQS_MESH_RECK : PAQS_MESH_CLEMENTS;
  });
}

paqs_status paqs_mesh_zero(paqs_mesh_style style, int modes, paqs_mesh** out) {
  return guarded([&] {
    need(out, "out");
    *out = new paqs_mesh{paqs::MeshSpec::zero(style_of(style), modes)};
  });
}

paqs_status paqs_mesh_random(paqs_mesh_style style, int modes, uint64_t seed, paqs_mesh** out) {
  return guarded([&] {
    need(out, "out");
    *out = new paqs_mesh{paqs::random_parameters(style_of(style), modes, seed)};
  });
}

paqs_status paqs_mesh_read_parameters(paqs_mesh_style style, int modes, const char* path, paqs_mesh** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new paqs_mesh{
        paqs::MeshSpec::from_parameters(style_of(style), modes, paqs::formats::read_parameters(path))};
  });
}

paqs_status paqs_mesh_write_parameters(const paqs_mesh* mesh, const char* path) {
  return guarded([&] {
    need(mesh, "mesh");
    need(path, "path");
    paqs::formats::write_parameters(mesh->value.splitters, path);
  });
}

size_t paqs_mesh_splitters(const paqs_mesh* mesh) { return mesh ? mesh->value.splitters.size() : 0; }

paqs_status paqs_mesh_splitter(const paqs_mesh* mesh, int order, int* mode, double* theta, double* phi) {
  return guarded([&] {
    need(mesh, "mesh");
    const auto& bs = mesh->value.splitters;
    if (order < 1 || static_cast<std::size_t>(order) > bs.size()) {
      paqs::fail(paqs::ErrorKind::InvalidArgument, "splitter order " + std::to_string(order) + " out of range");
    }
    const paqs::BeamSplitterParam& p = bs[static_cast<std::size_t>(order - 1)];
    if (mode) *mode = p.mode;
    if (theta) *theta = p.theta;
    if (phi) *phi = p.phi;
  });
}

paqs_status paqs_mesh_set_splitter(paqs_mesh* mesh, int order, double theta, double phi) {
  return guarded([&] {
    need(mesh, "mesh");
    auto& bs = mesh->value.splitters;
    if (order < 1 || static_cast<std::size_t>(order) > bs.size()) {
      paqs::fail(paqs::ErrorKind::InvalidArgument, "splitter order " + std::to_string(order) + " out of range");
    }
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
      paqs::fail(paqs::ErrorKind::Domain, "splitter angles must be finite");
    }
    bs[static_cast<std::size_t>(order - 1)].theta = theta;
    bs[static_cast<std::size_t>(order - 1)].phi = phi;
  });
}

paqs_status paqs_mesh_compose(const paqs_mesh* mesh, paqs_cmatrix** out) {
  return guarded([&] {
    need(mesh, "mesh");
    need(out, "out");
    *out = new paqs_cmatrix{paqs::compose_mesh(mesh->value)};
  });
}

void paqs_mesh_free(paqs_mesh* mesh) { delete mesh; }

paqs_status paqs_mesh_layout(paqs_mesh_style style, int modes, int* orders, int* channel_m, int* columns,
                             double* rows, size_t capacity, size_t* count) {
  return guarded([&] {
    const std::vector<paqs::MeshSlot> slots = paqs::mesh_layout(style_of(style), modes);
    if (count) *count = slots.size();
    const bool writes = orders || channel_m || columns || rows;
    if (!writes) return;
    if (capacity < slots.size()) {
      paqs::fail(paqs::ErrorKind::InvalidArgument,
                 "layout needs capacity " + std::to_string(slots.size()) + ", got " + std::to_string(capacity));
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (orders) orders[i] = slots[i].order;
      if (channel_m) channel_m[i] = slots[i].mode;
      if (columns) columns[i] = slots[i].column;
      if (rows) rows[i] = slots[i].row;
    }
  });
}

paqs_status paqs_check_unitary(const paqs_cmatrix* u, double tol, int* pass, double* max_deviation) {
  return guarded([&] {
    need(u, "matrix");
    const paqs::UnitarityCheck c = paqs::check_unitary(u->value, tol > 0 ? tol : paqs::kDefaultUnitarityTolerance);
    if (pass) *pass = c.pass ? 1 : 0;
    if (max_deviation) *max_deviation = c.max_deviation;
  });
}

paqs_status paqs_boson_sampling(const paqs_cmatrix* u, const paqs_state* in, double tol,
                                const paqs_multi_options* opts, paqs_distribution** out) {
  return guarded([&] {
    need(u, "unitary");
    need(in, "input state");
    need(out, "out");
    *out = new paqs_distribution{paqs::boson_sampling_distribution(
        u->value, in->value, options_of(opts), tol > 0 ? tol : paqs::kDefaultUnitarityTolerance)};
  });
}

/* permanents */

paqs_status paqs_permanent(const paqs_cmatrix* m, paqs_permanent_algorithm algo, double* re, double* im,
                           paqs_permanent_algorithm* route) {
  return guarded([&] {
    need(m, "matrix");
    paqs::PermanentStats stats;
    const paqs::Complex v = paqs::permanent(m->value, algo_of(algo), &stats);
    if (re) *re = v.real();
    if (im) *im = v.imag();
    if (route) *route = algo_to_c(stats.route);
  });
}

paqs_status paqs_determinant(const paqs_cmatrix* m, double* re, double* im) {
  return guarded([&] {
    need(m, "matrix");
    const paqs::Complex v = paqs::determinant(m->value);
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

const char* paqs_permanent_algorithm_name(paqs_permanent_algorithm algo) {
  switch (algo) {
    case PAQS_PERM_NAIVE:
    case PAQS_PERM_RYSER:
    case PAQS_PERM_RYSER_GRAY:
    case PAQS_PERM_GLYNN:
    case PAQS_PERM_GLYNN_GRAY:
    case PAQS_PERM_DISPATCH: return paqs::to_string(algo_of(algo));
  }
  return "unknown";
}

paqs_status paqs_bench_permanents(int n_min, int n_max, int trials, uint64_t seed, paqs_bench_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = new paqs_bench_report{paqs::bench_permanents(n_min, n_max, trials, seed)};
  });
}

size_t paqs_bench_size(const paqs_bench_report* r) { return r ? r->value.entries.size() : 0; }

paqs_status paqs_bench_entry(const paqs_bench_report* r, size_t index, paqs_permanent_algorithm* algo, int* n,
                             double* median_ns, double* relative_error) {
  return guarded([&] {
    need(r, "report");
    check_index(index, r->value.entries.size(), "bench");
    const paqs::BenchEntry& e = r->value.entries[index];
    if (algo) *algo = algo_to_c(e.algorithm);
    if (n) *n = e.order;
    if (median_ns) *median_ns = e.median_ns;
    if (relative_error) *relative_error = e.relative_error;
  });
}

paqs_status paqs_bench_write_csv(const paqs_bench_report* r, const char* path) {
  return guarded([&] {
    need(r, "report");
    need(path, "path");
    paqs::formats::write_text(path, paqs::formats::bench_csv(r->value));
  });
}

void paqs_bench_free(paqs_bench_report* r) { delete r; }

}  // extern "C"
