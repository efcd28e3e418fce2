#include "paqs/gateway.hpp"

// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro that
// collides with Eigen's parameter names.
#include "paqs/error.hpp"
#include "paqs/fock.hpp"
#include "paqs/lattice.hpp"
#include "paqs/mesh.hpp"
#include "paqs/propagator.hpp"
#include "paqs/stochastic.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace paqs::gateway {

using json = nlohmann::ordered_json;

namespace {

// A request that does not match the published schema (HTTP 400).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A request that exceeds a configured size limit (HTTP 413).
struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Response reply(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error_reply(int status, const std::string& code, const std::string& message) {
  return reply(status, json{{"schema_version", kSchemaVersion}, {"error", {{"code", code}, {"message", message}}}});
}

// ---- schema helpers ----------------------------------------------------

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "." + key + " is required");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(where + " must be finite");
  return d;
}

long long as_integer(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9e15) return static_cast<long long>(d);
  }
  throw SchemaError(where + " must be an integer");
}

std::uint64_t as_seed(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long s = as_integer(v, where);
  if (s < 0) throw SchemaError(where + " must be non-negative");
  return static_cast<std::uint64_t>(s);
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + " must be a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw SchemaError(where + " must be a boolean");
  return v.get<bool>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  const json* v = optional_field(obj, key);
  return v ? as_number(*v, where + "." + key) : fallback;
}

// ---- encoders ------------------------------------------------------------

std::string base64(const unsigned char* data, std::size_t n) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (std::size_t i = 0; i < n; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < n ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < n ? data[i + 2] : 0;
    const std::uint32_t word = (b0 << 16) | (b1 << 8) | b2;
    out += kAlphabet[(word >> 18) & 63];
    out += kAlphabet[(word >> 12) & 63];
    out += i + 1 < n ? kAlphabet[(word >> 6) & 63] : '=';
    out += i + 2 < n ? kAlphabet[word & 63] : '=';
  }
  return out;
}

// Little-endian float64 payload; every supported host is little-endian but
// the bytes are assembled explicitly so the wire format never depends on it.
std::string encode_doubles(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &values[i], 8);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return base64(bytes.data(), bytes.size());
}

json matrix_json(const ComplexMatrix& u) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      r.push_back(u(i, j).real());
      c.push_back(u(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json real_matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json node_distribution_json(const ProbabilityDistribution& d) {
  json out = json::object();
  for (std::size_t i = 0; i < d.probs.size(); ++i) out["|" + std::to_string(i + 1) + ",1>"] = d.probs[i];
  return out;
}

json output_distribution_json(const OutputDistribution& d) {
  json out = json::object();
  for (const auto& [state, p] : d.entries) out[format_state(state)] = p;
  return out;
}

json series_json(const ProbabilitySeries& s) {
  json items = json::array();
  for (std::size_t i = 0; i < s.names.size(); ++i) items.push_back({{"name", s.names[i]}, {"values", s.values[i]}});
  return {{"z_cm", s.z_cm}, {"items", std::move(items)}};
}

// ---- request decoding --------------------------------------------------

ComplexMatrix parse_matrix(const json& v, const std::string& where, int max_side) {
  // Accepted: {"re": [[...]], "im": [[...]]} or [[[re, im], ...], ...].
  std::vector<std::vector<Complex>> rows;
  if (v.is_object()) {
    const json& re = field(v, "re", where);
    const json* im = optional_field(v, "im");
    if (!re.is_array()) throw SchemaError(where + ".re must be an array of rows");
    if (im && (!im->is_array() || im->size() != re.size())) throw SchemaError(where + ".im must match .re");
    for (std::size_t i = 0; i < re.size(); ++i) {
      if (!re[i].is_array()) throw SchemaError(where + ".re[" + std::to_string(i) + "] must be an array");
      if (im && (!(*im)[i].is_array() || (*im)[i].size() != re[i].size()))
        throw SchemaError(where + ".im[" + std::to_string(i) + "] must match .re");
      std::vector<Complex> row;
      for (std::size_t j = 0; j < re[i].size(); ++j) {
        const std::string at = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        row.emplace_back(as_number(re[i][j], where + ".re" + at), im ? as_number((*im)[i][j], where + ".im" + at) : 0.0);
      }
      rows.push_back(std::move(row));
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array()) throw SchemaError(where + "[" + std::to_string(i) + "] must be an array");
      std::vector<Complex> row;
      for (std::size_t j = 0; j < v[i].size(); ++j) {
        const json& c = v[i][j];
        const std::string at = where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (c.is_number()) row.emplace_back(as_number(c, at), 0.0);
        else if (c.is_array() && c.size() == 2) row.emplace_back(as_number(c[0], at), as_number(c[1], at));
        else throw SchemaError(at + " must be a number or a [re, im] pair");
      }
      rows.push_back(std::move(row));
    }
  } else {
    throw SchemaError(where + " must be a matrix");
  }
  const auto n = rows.size();
  if (n == 0) throw SchemaError(where + " must not be empty");
  if (static_cast<int>(n) > max_side) throw TooLarge(where + " exceeds " + std::to_string(max_side) + " modes");
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw SchemaError(where + " must be square");
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

WaveguideLayout parse_layout(const json& body, const Limits& limits) {
  const json& layout = field(body, "layout", "body");
  if (const json* lattice = optional_field(layout, "lattice")) {
    const long long nx = as_integer(field(*lattice, "nx", "layout.lattice"), "layout.lattice.nx");
    const long long ny = as_integer(field(*lattice, "ny", "layout.lattice"), "layout.lattice.ny");
    if (nx < 1 || ny < 1) throw SchemaError("layout.lattice.nx and ny must be positive");
    if (static_cast<unsigned long long>(nx) * static_cast<unsigned long long>(ny) > limits.max_nodes)
      throw TooLarge("layout has more than " + std::to_string(limits.max_nodes) + " nodes");
    return rectangular_lattice(static_cast<int>(nx), static_cast<int>(ny),
                               as_number(field(*lattice, "dx_um", "layout.lattice"), "layout.lattice.dx_um"),
                               as_number(field(*lattice, "dy_um", "layout.lattice"), "layout.lattice.dy_um"));
  }
  const json& nodes = field(layout, "nodes", "layout");
  if (!nodes.is_array() || nodes.empty()) throw SchemaError("layout.nodes must be a non-empty array");
  if (nodes.size() > limits.max_nodes)
    throw TooLarge("layout has more than " + std::to_string(limits.max_nodes) + " nodes");
  std::vector<Node> out;
  std::vector<bool> flags;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = "layout.nodes[" + std::to_string(i) + "]";
    out.push_back({static_cast<int>(i + 1), as_number(field(nodes[i], "x_um", at), at + ".x_um"),
                   as_number(field(nodes[i], "y_um", at), at + ".y_um")});
    const json* s = optional_field(nodes[i], "stochastic");
    flags.push_back(s ? as_bool(*s, at + ".stochastic") : true);
  }
  return WaveguideLayout(std::move(out), std::move(flags));
}

Hamiltonian parse_hamiltonian(const json& body, const WaveguideLayout& layout) {
  CouplingModel model;
  if (const json* c = optional_field(body, "coupling")) {
    model.amplitude_per_cm = number_or(*c, "amplitude_per_cm", model.amplitude_per_cm, "coupling");
    model.decay_length_um = number_or(*c, "decay_length_um", model.decay_length_um, "coupling");
    const auto it = c->find("cutoff_um");
    if (it != c->end()) {
      model.cutoff_um = it->is_null() ? CouplingModel::uncut().cutoff_um : as_number(*it, "coupling.cutoff_um");
    }
  }
  return build_hamiltonian(layout, model, number_or(body, "beta_per_cm", 0.0, "body"));
}

int parse_label(const json& body, const char* key, const WaveguideLayout& layout) {
  const long long v = as_integer(field(body, key, "body"), key);
  if (v < 1 || v > static_cast<long long>(layout.size()))
    fail(ErrorKind::InvalidArgument, std::string(key) + " " + std::to_string(v) + " is outside 1.." +
                                         std::to_string(layout.size()));
  return static_cast<int>(v);
}

std::pair<double, double> parse_z_range(const json& body, double z) {
  const json* r = optional_field(body, "z_range_cm");
  if (!r) return {0.0, z};
  if (!r->is_array() || r->size() != 2) throw SchemaError("z_range_cm must be [start, end]");
  return {as_number((*r)[0], "z_range_cm[0]"), as_number((*r)[1], "z_range_cm[1]")};
}

FockConfiguration parse_fock(const json& v, int modes, const std::string& where) {
  return parse_state(as_string(v, where), modes);
}

void check_photons(const FockConfiguration& s, const Limits& limits) {
  if (s.photons() > limits.max_photons)
    throw TooLarge("state has " + std::to_string(s.photons()) + " photons; the limit is " +
                   std::to_string(limits.max_photons));
}

void check_modes(int modes, const Limits& limits) {
  if (modes > limits.max_modes)
    throw TooLarge(std::to_string(modes) + " modes exceed the limit of " + std::to_string(limits.max_modes));
}

MultiParticleOptions parse_multi_options(const json& body) {
  MultiParticleOptions opts;
  if (const json* f = optional_field(body, "distinguishable_formula")) {
    const std::string name = as_string(*f, "distinguishable_formula");
    if (name == "per-det-average") opts.distinguishable = DistinguishableFormula::PerDetAverage;
    else if (name == "independent") opts.distinguishable = DistinguishableFormula::IndependentPhotons;
    else throw SchemaError("distinguishable_formula must be per-det-average or independent");
  }
  return opts;
}

std::chrono::steady_clock::time_point deadline_for(const Limits& limits) {
  if (!(limits.time_budget_s > 0) || !std::isfinite(limits.time_budget_s))
    return std::chrono::steady_clock::time_point::max();
  return std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                std::chrono::duration<double>(limits.time_budget_s));
}

json envelope(const json* seed) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["seed"] = seed ? *seed : json(nullptr);
  return out;
}

// ---- endpoints -----------------------------------------------------------

Response handle_qw(const json& body, const Limits& limits) {
  const WaveguideLayout layout = parse_layout(body, limits);
  const Hamiltonian h = parse_hamiltonian(body, layout);
  const int inject = parse_label(body, "inject", layout);
  const double z = as_number(field(body, "z_cm", "body"), "z_cm");

  int gx = kQuickResolution, gy = kQuickResolution;
  double sigma = default_facula_sigma(layout);
  if (const json* r = optional_field(body, "render")) {
    if (const json* res = optional_field(*r, "resolution")) {
      const std::string name = as_string(*res, "render.resolution");
      if (name == "full") gx = gy = kFullResolution;
      else if (name == "quick") gx = gy = kQuickResolution;
      else throw SchemaError("render.resolution must be full or quick");
    }
    if (const json* w = optional_field(*r, "width")) gx = static_cast<int>(as_integer(*w, "render.width"));
    if (const json* hh = optional_field(*r, "height")) gy = static_cast<int>(as_integer(*hh, "render.height"));
    sigma = number_or(*r, "sigma_um", sigma, "render");
  }
  if (gx > limits.max_raster_side || gy > limits.max_raster_side)
    throw TooLarge("raster side exceeds " + std::to_string(limits.max_raster_side));

  const ProbabilityDistribution dist = evolve(h, inject, z);
  const FaculaRaster raster = facula_raster(layout, dist, gx, gy, sigma);

  json out = envelope(optional_field(body, "seed"));
  out["distribution"] = node_distribution_json(dist);
  out["probabilities"] = dist.probs;
  out["raster"] = {{"width", raster.width},
                   {"height", raster.height},
                   {"extent_um", {raster.x_min, raster.x_max, raster.y_min, raster.y_max}},
                   {"sigma_um", raster.sigma_um},
                   {"encoding", "base64-float64-le"},
                   {"grid", encode_doubles(raster.grid)}};
  out["diagnostics"] = {{"total_probability", dist.total()}, {"nodes", layout.size()}};
  return reply(200, out);
}

Response handle_qsw(const json& body, const Limits& limits) {
  const WaveguideLayout layout = parse_layout(body, limits);
  const Hamiltonian h = parse_hamiltonian(body, layout);
  const int inject = parse_label(body, "inject", layout);
  const double z = as_number(field(body, "z_cm", "body"), "z_cm");

  const json& d = field(body, "dbeta", "body");
  DBetaConfig cfg;
  cfg.amplitude_per_mm = as_number(field(d, "amplitude_per_mm", "dbeta"), "dbeta.amplitude_per_mm");
  cfg.z_interval_mm = number_or(d, "z_interval_mm", cfg.z_interval_mm, "dbeta");
  if (const json* r = optional_field(d, "realizations")) {
    const long long n = as_integer(*r, "dbeta.realizations");
    if (n > limits.max_realizations)
      throw TooLarge("dbeta.realizations exceeds " + std::to_string(limits.max_realizations));
    cfg.realizations = static_cast<int>(n);
  }
  const json* seed = optional_field(d, "seed");
  if (!seed) seed = optional_field(body, "seed");
  if (seed) cfg.seed = as_seed(*seed, "seed");
  cfg.stochastic_flags = layout.stochastic_flags();

  std::vector<int> watch{inject};
  if (const json* w = optional_field(body, "watch")) {
    if (!w->is_array()) throw SchemaError("watch must be an array of node labels");
    watch.clear();
    for (std::size_t i = 0; i < w->size(); ++i) {
      const long long label = as_integer((*w)[i], "watch[" + std::to_string(i) + "]");
      if (label < 1 || label > static_cast<long long>(layout.size()))
        fail(ErrorKind::InvalidArgument, "watch label " + std::to_string(label) + " is outside the layout");
      watch.push_back(static_cast<int>(label));
    }
  }
  const auto [z0, z1] = parse_z_range(body, z);

  EnsembleOptions eopts;
  eopts.deadline = deadline_for(limits);
  const ProbabilityDistribution mean = qsw_run(h, cfg, inject, z, eopts);
  const ProbabilitySeries series = qsw_series(h, cfg, inject, z0, z1, watch, eopts);

  json out = envelope(seed);
  if (!seed) out["seed"] = cfg.seed;
  out["distribution"] = node_distribution_json(mean);
  out["probabilities"] = mean.probs;
  out["series"] = series_json(series);
  out["diagnostics"] = {{"total_probability", mean.total()},
                        {"segments", segment_count(z, cfg.z_interval_mm / kMillimetersPerCentimeter)},
                        {"realizations", cfg.realizations}};
  return reply(200, out);
}

Response handle_multiparticle(const json& body, const Limits& limits) {
  const WaveguideLayout layout = parse_layout(body, limits);
  const int modes = static_cast<int>(layout.size());
  check_modes(modes, limits);
  const Hamiltonian h = parse_hamiltonian(body, layout);
  const FockConfiguration s = parse_fock(field(body, "state", "body"), modes, "state");
  check_photons(s, limits);
  const ParticleStatistics stats = particle_statistics_from_string(
      as_string(field(body, "statistics", "body"), "statistics"));
  const double z = as_number(field(body, "z_cm", "body"), "z_cm");
  const MultiParticleOptions opts = parse_multi_options(body);

  std::vector<FockConfiguration> watch;
  if (const json* w = optional_field(body, "watch")) {
    if (!w->is_array()) throw SchemaError("watch must be an array of state strings");
    for (std::size_t i = 0; i < w->size(); ++i)
      watch.push_back(parse_fock((*w)[i], modes, "watch[" + std::to_string(i) + "]"));
  }
  if (watch.empty()) watch.push_back(s);
  const auto [z0, z1] = parse_z_range(body, z);

  const ComplexMatrix u = unitary_propagator(h, z);
  const OutputDistribution dist = full_distribution(u, s, stats, opts);

  json out = envelope(optional_field(body, "seed"));
  out["distribution"] = output_distribution_json(dist);
  out["marginal"] = single_photon_marginal(dist);
  if (s.photons() >= 2) {
    FockConfiguration fixed;
    if (const json* p = optional_field(body, "perspective")) {
      fixed = parse_fock(*p, modes, "perspective");
    } else {
      std::vector<int> occ(static_cast<std::size_t>(modes), 0);
      occ[0] = s.photons() - 2;
      fixed = FockConfiguration(std::move(occ));
    }
    out["perspective"] = format_state(fixed);
    out["correlation"] = real_matrix_json(two_particle_correlation(u, s, stats, fixed, opts));
  } else {
    out["perspective"] = nullptr;
    out["correlation"] = nullptr;
  }
  out["series"] = series_json(state_probability_series(h, s, stats, watch, z0, z1, opts));
  out["diagnostics"] = {{"total_probability", dist.total()}, {"configurations", dist.entries.size()}};
  return reply(200, out);
}

MeshStyle parse_style(const json& v) { return mesh_style_from_string(as_string(v, "style")); }

Response handle_bosonsampling(const json& body, const Limits& limits) {
  const json* mesh = optional_field(body, "mesh");
  const json* unitary = optional_field(body, "unitary");
  if ((mesh != nullptr) == (unitary != nullptr)) throw SchemaError("give exactly one of mesh or unitary");
  const double tol = number_or(body, "tolerance", kDefaultUnitarityTolerance, "body");

  ComplexMatrix u;
  std::optional<MeshSpec> spec;
  const json* seed = nullptr;
  if (mesh) {
    const MeshStyle style = parse_style(field(*mesh, "style", "mesh"));
    const long long modes = as_integer(field(*mesh, "modes", "mesh"), "mesh.modes");
    if (modes < 1) throw SchemaError("mesh.modes must be positive");
    check_modes(static_cast<int>(modes), limits);
    const json* params = optional_field(*mesh, "parameters");
    seed = optional_field(*mesh, "random_seed");
    if ((params != nullptr) == (seed != nullptr)) throw SchemaError("mesh needs exactly one of parameters or random_seed");
    if (seed) {
      spec = random_parameters(style, static_cast<int>(modes), as_seed(*seed, "mesh.random_seed"));
    } else {
      if (!params->is_array()) throw SchemaError("mesh.parameters must be an array");
      std::vector<BeamSplitterParam> ps;
      for (std::size_t i = 0; i < params->size(); ++i) {
        const std::string at = "mesh.parameters[" + std::to_string(i) + "]";
        BeamSplitterParam p;
        p.order = static_cast<int>(as_integer(field((*params)[i], "order", at), at + ".order"));
        p.theta = as_number(field((*params)[i], "theta", at), at + ".theta");
        p.phi = number_or((*params)[i], "phi", 0.0, at);
        ps.push_back(p);
      }
      spec = MeshSpec::from_parameters(style, static_cast<int>(modes), std::move(ps));
    }
    u = compose_mesh(*spec);
  } else {
    u = parse_matrix(*unitary, "unitary", limits.max_modes);
  }
  const int modes = static_cast<int>(u.rows());
  const FockConfiguration s = parse_fock(field(body, "state", "body"), modes, "state");
  check_photons(s, limits);

  const OutputDistribution dist = boson_sampling_distribution(u, s, {}, tol);
  json out = envelope(seed ? seed : optional_field(body, "seed"));
  out["distribution"] = output_distribution_json(dist);
  out["unitary"] = matrix_json(u);
  if (spec) {
    json ps = json::array();
    for (const auto& p : spec->splitters)
      ps.push_back({{"order", p.order}, {"mode", p.mode}, {"theta", p.theta}, {"phi", p.phi}});
    out["parameters"] = std::move(ps);
  }
  out["diagnostics"] = {{"total_probability", dist.total()},
                        {"unitarity_max_deviation", check_unitary(u, tol).max_deviation}};
  return reply(200, out);
}

Response handle_validate_unitary(const json& body, const Limits& limits) {
  const ComplexMatrix m = parse_matrix(field(body, "matrix", "body"), "matrix", limits.max_modes);
  const double tol = number_or(body, "tolerance", kDefaultUnitarityTolerance, "body");
  const UnitarityCheck c = check_unitary(m, tol);
  json out = envelope(optional_field(body, "seed"));
  out["pass"] = c.pass;
  out["max_deviation"] = c.max_deviation;
  out["tolerance"] = tol;
  return reply(200, out);
}

Response handle_mesh_layout(const std::map<std::string, std::string>& query, const Limits& limits) {
  const auto style_it = query.find("style");
  const auto modes_it = query.find("modes");
  if (style_it == query.end() || modes_it == query.end()) throw SchemaError("query needs style and modes");
  const MeshStyle style = mesh_style_from_string(style_it->second);
  int modes = 0;
  try {
    std::size_t used = 0;
    modes = std::stoi(modes_it->second, &used);
    if (used != modes_it->second.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw SchemaError("modes must be an integer");
  }
  if (modes < 1) throw SchemaError("modes must be positive");
  check_modes(modes, limits);
  json slots = json::array();
  for (const MeshSlot& s : mesh_layout(style, modes))
    slots.push_back({{"order", s.order}, {"mode", s.mode}, {"column", s.column}, {"row", s.row}});
  json out = envelope(nullptr);
  out["style"] = to_string(style);
  out["modes"] = modes;
  out["splitters"] = std::move(slots);
  return reply(200, out);
}

json schema_document(const Limits& limits) {
  json layout = {
      {"oneOf",
       {{{"nodes", "array of {x_um: number, y_um: number, stochastic?: boolean}; labels follow array order"}},
        {{"lattice", "{nx: integer, ny: integer, dx_um: number, dy_um: number}"}}}}};
  json common = {{"layout", layout},
                 {"coupling?", "{amplitude_per_cm?, decay_length_um?, cutoff_um?: number|null}"},
                 {"beta_per_cm?", "number"}};
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["limits"] = {{"max_modes", limits.max_modes},
                   {"max_photons", limits.max_photons},
                   {"max_nodes", limits.max_nodes},
                   {"max_raster_side", limits.max_raster_side},
                   {"time_budget_s", limits.time_budget_s}};
  doc["endpoints"] = {
      {"POST /api/v1/qw",
       {{"request", {{"common", common}, {"inject", "integer"}, {"z_cm", "number"},
                     {"render?", "{resolution?: full|quick, width?, height?, sigma_um?}"}, {"seed?", "integer"}}},
        {"response", "distribution (|label,1> -> p), probabilities, raster {width, height, extent_um, sigma_um, "
                     "encoding, grid}, diagnostics"}}},
      {"POST /api/v1/qsw",
       {{"request", {{"common", common}, {"inject", "integer"}, {"z_cm", "number"},
                     {"dbeta", "{amplitude_per_mm, z_interval_mm?, realizations?, seed?}"},
                     {"watch?", "array of labels"}, {"z_range_cm?", "[start, end]"}}},
        {"response", "distribution, probabilities, series {z_cm, items[{name, values}]}, diagnostics"}}},
      {"POST /api/v1/multiparticle",
       {{"request", {{"common", common}, {"state", "state string"},
                     {"statistics", "bosonic|fermionic|distinguishable"}, {"z_cm", "number"},
                     {"watch?", "array of state strings"}, {"perspective?", "state string with N-2 photons"},
                     {"z_range_cm?", "[start, end]"}, {"distinguishable_formula?", "per-det-average|independent"}}},
        {"response", "distribution, marginal, correlation, perspective, series, diagnostics"}}},
      {"POST /api/v1/bosonsampling",
       {{"request", {{"mesh?", "{style: reck|clements, modes, parameters?: [{order, theta, phi}], random_seed?}"},
                     {"unitary?", "{re: [[...]], im: [[...]]} or [[[re, im], ...]]"},
                     {"state", "state string"}, {"tolerance?", "number"}}},
        {"response", "distribution, unitary {re, im}, parameters?, diagnostics"}}},
      {"POST /api/v1/validate/unitary",
       {{"request", {{"matrix", "{re, im} or [[[re, im], ...]]"}, {"tolerance?", "number"}}},
        {"response", "pass, max_deviation, tolerance"}}},
      {"GET /api/v1/mesh/layout", {{"query", "style=reck|clements&modes=M"}, {"response", "splitters[{order, mode, column, row}]"}}},
      {"GET /api/v1/schema", {{"response", "this document"}}}};
  doc["errors"] = {{"400", "schema or format violation"},
                   {"413", "size limit exceeded"},
                   {"422", "domain, numerical, invalid-argument or budget violation"}};
  return doc;
}

using Handler = Response (*)(const json&, const Limits&);

Handler post_handler(const std::string& path) {
  if (path == "/api/v1/qw") return handle_qw;
  if (path == "/api/v1/qsw") return handle_qsw;
  if (path == "/api/v1/multiparticle") return handle_multiparticle;
  if (path == "/api/v1/bosonsampling") return handle_bosonsampling;
  if (path == "/api/v1/validate/unitary") return handle_validate_unitary;
  return nullptr;
}

}  // namespace

Response dispatch(const Request& request, const Limits& limits) {
  try {
    if (request.method == "GET" && request.path == "/api/v1/schema") return reply(200, schema_document(limits));
    if (request.method == "GET" && request.path == "/api/v1/mesh/layout")
      return handle_mesh_layout(request.query, limits);
    const Handler handler = post_handler(request.path);
    if (handler == nullptr) {
      if (request.path == "/api/v1/mesh/layout" || request.path == "/api/v1/schema")
        return error_reply(405, "method", "use GET for " + request.path);
      return error_reply(404, "not-found", "no endpoint " + request.path);
    }
    if (request.method != "POST") return error_reply(405, "method", "use POST for " + request.path);
    if (request.body.size() > limits.max_body_bytes) return error_reply(413, "limit", "request body too large");
    json body;
    try {
      body = json::parse(request.body);
    } catch (const json::parse_error& e) {
      return error_reply(400, "schema", std::string("malformed JSON: ") + e.what());
    }
    if (!body.is_object()) return error_reply(400, "schema", "request body must be a JSON object");
    return handler(body, limits);
  } catch (const SchemaError& e) {
    return error_reply(400, "schema", e.what());
  } catch (const TooLarge& e) {
    return error_reply(413, "limit", e.what());
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::Format: return error_reply(400, to_string(e.kind()), e.what());
      case ErrorKind::Limit: return error_reply(413, to_string(e.kind()), e.what());
      default: return error_reply(422, to_string(e.kind()), e.what());
    }
  } catch (const json::exception& e) {
    return error_reply(400, "schema", e.what());
  } catch (const std::bad_alloc&) {
    return error_reply(413, "limit", "request needs more memory than available");
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

namespace {

bool configure(httplib::Server& server, const ServerOptions& options) {
  const Limits limits = options.limits;
  const std::string origin = options.cors_origin;
  server.set_payload_max_length(limits.max_body_bytes);

  auto adapt = [limits](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    const Response out = dispatch(r, limits);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/api/v1/.*)", adapt);
  server.Post(R"(/api/v1/.*)", adapt);
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir)) {
    std::cerr << "paqs-gateway: static directory " << options.static_dir << " not found\n";
    return false;
  }
  return true;
}

}  // namespace

int serve(const ServerOptions& options) {
  httplib::Server server;
  if (!configure(server, options)) return 1;
  std::cerr << "paqs-gateway listening on " << options.host << ":" << options.port << "\n";
  return server.listen(options.host, options.port) ? 0 : 1;
}

struct BackgroundServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

BackgroundServer::BackgroundServer(const ServerOptions& options) : impl_(std::make_unique<Impl>()) {
  if (!configure(impl_->server, options)) fail(ErrorKind::Io, "static directory " + options.static_dir + " not found");
  impl_->port = options.port == 0 ? impl_->server.bind_to_any_port(options.host)
                                  : (impl_->server.bind_to_port(options.host, options.port) ? options.port : -1);
  if (impl_->port < 0) fail(ErrorKind::Io, "cannot bind " + options.host + ":" + std::to_string(options.port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

BackgroundServer::~BackgroundServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int BackgroundServer::port() const noexcept { return impl_->port; }

}  // namespace paqs::gateway
