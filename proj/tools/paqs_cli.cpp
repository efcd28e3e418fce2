// Command-line front end.  Talks to the engine exclusively through the C API.
#include <png.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paqs/paqs.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitContract = 4;
constexpr int kManifestSchema = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(paqs_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  paqs_status status;
};

void check(paqs_status s) {
  if (s != PAQS_OK) throw ApiError(s, paqs_last_error());
}

int exit_code_for(paqs_status s) {
  switch (s) {
    case PAQS_OK: return kExitOk;
    case PAQS_ERR_INVALID_ARGUMENT: return kExitUsage;
    case PAQS_ERR_FORMAT:
    case PAQS_ERR_IO: return kExitFormat;
    default: return kExitContract;
  }
}

template <auto Free>
struct Deleter {
  template <class T>
  void operator()(T* p) const {
    Free(p);
  }
};

using Layout = std::unique_ptr<paqs_layout, Deleter<paqs_layout_free>>;
using Hamiltonian = std::unique_ptr<paqs_hamiltonian, Deleter<paqs_hamiltonian_free>>;
using CMatrix = std::unique_ptr<paqs_cmatrix, Deleter<paqs_cmatrix_free>>;
using RMatrix = std::unique_ptr<paqs_rmatrix, Deleter<paqs_rmatrix_free>>;
using Vector = std::unique_ptr<paqs_vector, Deleter<paqs_vector_free>>;
using Series = std::unique_ptr<paqs_series, Deleter<paqs_series_free>>;
using Raster = std::unique_ptr<paqs_raster, Deleter<paqs_raster_free>>;
using Profile = std::unique_ptr<paqs_profile, Deleter<paqs_profile_free>>;
using State = std::unique_ptr<paqs_state, Deleter<paqs_state_free>>;
using Distribution = std::unique_ptr<paqs_distribution, Deleter<paqs_distribution_free>>;
using Mesh = std::unique_ptr<paqs_mesh, Deleter<paqs_mesh_free>>;
using Bench = std::unique_ptr<paqs_bench_report, Deleter<paqs_bench_free>>;

template <class Handle, class F>
Handle make(F&& f) {
  typename Handle::pointer raw = nullptr;
  check(f(&raw));
  return Handle(raw);
}

// ---------------------------------------------------------------------------
// Quantities with units

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number_prefix(const std::string& text, double& value, std::string& rest) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || !std::isfinite(value)) return false;
  rest = trim(std::string(ptr, last));
  return true;
}

// Returns centimeters.  A bare zero is accepted because it is unit-free.
double parse_length_cm(const std::string& raw, const std::string& flag) {
  const std::string text = trim(raw);
  double v = 0;
  std::string unit;
  if (!parse_number_prefix(text, v, unit)) throw UsageError(flag + ": cannot read a length from '" + raw + "'");
  if (unit.empty()) {
    if (v == 0.0) return 0.0;
    throw UsageError(flag + ": '" + raw + "' needs a unit suffix (um, mm or cm)");
  }
  if (unit == "um") return v / 1e4;
  if (unit == "mm") return v / 10.0;
  if (unit == "cm") return v;
  throw UsageError(flag + ": unknown length unit '" + unit + "' (use um, mm or cm)");
}

double parse_length_um(const std::string& raw, const std::string& flag) {
  return parse_length_cm(raw, flag) * 1e4;
}

// Inverse-length quantities (amplitudes, propagation constants).  Returns 1/mm.
double parse_inverse_length_per_mm(const std::string& raw, const std::string& flag) {
  const std::string text = trim(raw);
  double v = 0;
  std::string unit;
  if (!parse_number_prefix(text, v, unit)) throw UsageError(flag + ": cannot read a value from '" + raw + "'");
  if (unit.empty()) {
    if (v == 0.0) return 0.0;
    throw UsageError(flag + ": '" + raw + "' needs a unit suffix (/mm or /cm)");
  }
  if (unit == "/mm" || unit == "mm^-1") return v;
  if (unit == "/cm" || unit == "cm^-1") return v / 10.0;
  if (unit == "/um" || unit == "um^-1") return v * 1e3;
  throw UsageError(flag + ": unknown unit '" + unit + "' (use /mm or /cm)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int parse_int_strict(const std::string& raw, const std::string& flag) {
  const std::string text = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError(flag + ": '" + raw + "' is not an integer");
  return v;
}

std::vector<int> parse_label_list(const std::string& raw, const std::string& flag) {
  std::vector<int> out;
  for (const auto& part : split(raw, ',')) out.push_back(parse_int_strict(part, flag));
  return out;
}

std::pair<double, double> parse_z_range(const std::string& raw, const std::string& flag) {
  const auto dots = raw.find("..");
  if (dots == std::string::npos) throw UsageError(flag + ": expected 'start..end', e.g. 2mm..5mm");
  const double a = parse_length_cm(raw.substr(0, dots), flag);
  const double b = parse_length_cm(raw.substr(dots + 2), flag);
  if (b < a) throw UsageError(flag + ": end of range lies before its start");
  return {a, b};
}

std::pair<int, int> parse_resolution(const std::string& raw) {
  if (raw == "full") return {500, 500};
  if (raw == "quick") return {100, 100};
  const auto x = raw.find('x');
  if (x == std::string::npos) {
    const int n = parse_int_strict(raw, "--resolution");
    return {n, n};
  }
  return {parse_int_strict(raw.substr(0, x), "--resolution"), parse_int_strict(raw.substr(x + 1), "--resolution")};
}

// ---------------------------------------------------------------------------
// Output helpers

std::string state_text(const paqs_state* s, paqs_state_format fmt = PAQS_STATE_AUTO) {
  size_t needed = 0;
  check(paqs_state_to_string(s, fmt, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(paqs_state_to_string(s, fmt, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

struct Rgb {
  unsigned char r, g, b;
};

Rgb colormap(const std::string& name, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto byte = [](double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  if (name == "gray") return {byte(t), byte(t), byte(t)};
  // black -> red -> yellow -> white
  return {byte(3 * t), byte(3 * t - 1), byte(3 * t - 2)};
}

void write_png(const paqs_raster* raster, const fs::path& path, const std::string& cmap) {
  int w = 0, h = 0;
  paqs_raster_shape(raster, &w, &h);
  const double* grid = paqs_raster_data(raster);
  double peak = 0;
  for (int i = 0; i < w * h; ++i) peak = std::max(peak, grid[i]);

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw ApiError(PAQS_ERR_IO, "cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw ApiError(PAQS_ERR_IO, "libpng initialisation failed");
  }
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw ApiError(PAQS_ERR_IO, "failed writing " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb c = colormap(cmap, peak > 0 ? grid[y * w + x] / peak : 0.0);
      row[3 * x] = c.r;
      row[3 * x + 1] = c.g;
      row[3 * x + 2] = c.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

// ---------------------------------------------------------------------------
// Run context shared by subcommands

struct Run {
  std::string subcommand;
  std::vector<std::string> argv;  // arguments after the program name
  fs::path out_dir = "paqs-out";
  json inputs = json::object();
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> artifacts;

  fs::path file(const std::string& name) {
    artifacts.push_back(name);
    return out_dir / name;
  }

  void prepare_out_dir() {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ApiError(PAQS_ERR_IO, "cannot create output directory " + out_dir.string() + ": " + ec.message());
  }

  std::string input(const std::string& key, const std::string& path) {
    std::error_code ec;
    const fs::path resolved = fs::weakly_canonical(fs::absolute(path), ec);
    const std::string r = ec ? fs::absolute(path).string() : resolved.string();
    inputs[key] = r;
    return r;
  }

  void write_manifest() {
    json m;
    m["tool"] = "paqs";
    m["manifest_schema"] = kManifestSchema;
    m["versions"] = {{"paqs", paqs_version()}, {"library", paqs_version()}};
    m["subcommand"] = subcommand;
    m["argv"] = canonical_argv();
    m["inputs"] = inputs;
    m["parameters"] = parameters;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["output_dir"] = fs::absolute(out_dir).lexically_normal().string();
    artifacts.push_back("manifest.json");
    m["artifacts"] = artifacts;
    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    if (!f) throw ApiError(PAQS_ERR_IO, "cannot write manifest");
    f << m.dump(2) << '\n';
  }

  // argv with input paths and the output directory made absolute, so a
  // manifest can be replayed from any working directory.
  std::vector<std::string> canonical_argv() const {
    static const std::vector<std::pair<std::string, std::string>> path_flags = {
        {"--positions", "positions"}, {"--params", "params"}, {"--unitary", "unitary"}};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      const std::string& a = argv[i];
      auto replacement = [&](const std::string& flag) -> std::optional<std::string> {
        if (flag == "--out") return fs::absolute(out_dir).lexically_normal().string();
        for (const auto& [f, key] : path_flags)
          if (f == flag && inputs.contains(key)) return inputs[key].get<std::string>();
        return std::nullopt;
      };
      const auto eq = a.find('=');
      if (a.rfind("--", 0) == 0 && eq != std::string::npos) {
        const std::string flag = a.substr(0, eq);
        if (auto r = replacement(flag)) {
          out.push_back(flag + "=" + *r);
          continue;
        }
      } else if (i + 1 < argv.size()) {
        if (auto r = replacement(a)) {
          out.push_back(a);
          out.push_back(*r);
          ++i;
          continue;
        }
      }
      out.push_back(a);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Layout selection shared by qw, qsw and multi

struct LayoutOptions {
  std::string positions;
  std::string lattice;
  std::string cutoff;
  std::string beta;
  CLI::Option* positions_opt = nullptr;
  CLI::Option* lattice_opt = nullptr;

  void add(CLI::App* app) {
    positions_opt = app->add_option("--positions", positions, "Node coordinates CSV (label,x_um,y_um[,stochastic])");
    lattice_opt = app->add_option("--lattice", lattice, "Rectangular lattice nx,ny,dx,dy, e.g. 21,21,15um,15um");
    positions_opt->excludes(lattice_opt);
    lattice_opt->excludes(positions_opt);
    app->add_option("--cutoff", cutoff, "Coupling cutoff distance (default 50um; 'none' keeps every pair)");
    app->add_option("--beta", beta, "Uniform propagation constant, e.g. 0/cm (default 0)");
  }

  Layout load(Run& run) const {
    const bool has_pos = positions_opt->count() > 0;
    const bool has_lat = lattice_opt->count() > 0;
    if (has_pos == has_lat) throw UsageError("give exactly one of --positions or --lattice");
    if (has_pos) {
      const std::string path = run.input("positions", positions);
      return make<Layout>([&](paqs_layout** o) { return paqs_layout_read_positions(path.c_str(), o); });
    }
    const auto parts = split(lattice, ',');
    if (parts.size() != 4) throw UsageError("--lattice expects nx,ny,dx,dy");
    const int nx = parse_int_strict(parts[0], "--lattice");
    const int ny = parse_int_strict(parts[1], "--lattice");
    const double dx = parse_length_um(parts[2], "--lattice");
    const double dy = parse_length_um(parts[3], "--lattice");
    run.parameters["lattice"] = {{"nx", nx}, {"ny", ny}, {"dx_um", dx}, {"dy_um", dy}};
    return make<Layout>([&](paqs_layout** o) { return paqs_layout_rectangular(nx, ny, dx, dy, o); });
  }

  Hamiltonian hamiltonian(const paqs_layout* layout, Run& run) const {
    paqs_coupling_model model = paqs_coupling_default();
    if (!cutoff.empty()) {
      model.cutoff_um = cutoff == "none" ? INFINITY : parse_length_um(cutoff, "--cutoff");
    }
    const double beta_per_cm = beta.empty() ? 0.0 : parse_inverse_length_per_mm(beta, "--beta") * 10.0;
    run.parameters["coupling"] = {{"amplitude_per_cm", model.amplitude_per_cm},
                                  {"decay_length_um", model.decay_length_um},
                                  {"cutoff_um", std::isfinite(model.cutoff_um) ? json(model.cutoff_um) : json("none")}};
    run.parameters["beta_per_cm"] = beta_per_cm;
    return make<Hamiltonian>(
        [&](paqs_hamiltonian** o) { return paqs_hamiltonian_build(layout, &model, beta_per_cm, o); });
  }
};

void check_label(const paqs_layout* layout, int label, const std::string& flag) {
  const auto n = static_cast<int>(paqs_layout_size(layout));
  if (label < 1 || label > n)
    throw UsageError(flag + ": node " + std::to_string(label) + " is outside 1.." + std::to_string(n));
}

// ---------------------------------------------------------------------------
// qw

struct QwOptions {
  LayoutOptions layout;
  int inject = 0;
  std::string z;
  std::string sigma;
  std::string resolution = "full";
  std::string colormap = "heat";
};

void write_raster(const paqs_layout* layout, const paqs_vector* probs, const QwOptions& o, Run& run) {
  const auto [gx, gy] = parse_resolution(o.resolution);
  const double sigma = o.sigma.empty() ? 0.0 : parse_length_um(o.sigma, "--sigma");
  Raster raster = make<Raster>([&](paqs_raster** r) { return paqs_facula_raster(layout, probs, gx, gy, sigma, r); });
  run.parameters["raster"] = {{"width", gx}, {"height", gy}, {"sigma_um", paqs_raster_sigma(raster.get())},
                              {"colormap", o.colormap}};
  check(paqs_raster_write_csv(raster.get(), run.file("raster.csv").c_str()));
  write_png(raster.get(), run.file("raster.png"), o.colormap);
}

int cmd_qw(const QwOptions& o, Run& run) {
  Layout layout = o.layout.load(run);
  check_label(layout.get(), o.inject, "--inject");
  const double z = parse_length_cm(o.z, "--z");
  if (o.colormap != "heat" && o.colormap != "gray") throw UsageError("--colormap must be heat or gray");
  Hamiltonian h = o.layout.hamiltonian(layout.get(), run);
  run.parameters["inject"] = o.inject;
  run.parameters["z_cm"] = z;

  Vector probs = make<Vector>([&](paqs_vector** v) { return paqs_qw_evolve(h.get(), o.inject, z, v); });
  run.prepare_out_dir();
  check(paqs_vector_write_csv(probs.get(), run.file("results.csv").c_str()));
  check(paqs_hamiltonian_write_csv(h.get(), run.file("hamiltonian.csv").c_str()));
  check(paqs_layout_write_positions(layout.get(), run.file("positions.csv").c_str()));
  write_raster(layout.get(), probs.get(), o, run);
  run.write_manifest();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// qsw

struct QswOptions {
  LayoutOptions layout;
  int inject = 0;
  std::string z;
  std::string amplitude = "0";
  std::string z_interval = "0.1mm";
  int realizations = 1;
  std::uint64_t seed = 0;
  std::string watch;
  std::string z_range;
  std::string fixed;
  unsigned threads = 1;
  double time_budget = 0;
};

int cmd_qsw(const QswOptions& o, Run& run) {
  Layout layout = o.layout.load(run);
  check_label(layout.get(), o.inject, "--inject");
  const double z = parse_length_cm(o.z, "--z");
  const double amp = parse_inverse_length_per_mm(o.amplitude, "--amplitude");
  const double interval_mm = parse_length_cm(o.z_interval, "--z-interval") * 10.0;
  if (amp < 0) throw UsageError("--amplitude must be non-negative");

  if (!o.fixed.empty()) {
    const auto n = paqs_layout_size(layout.get());
    std::vector<int> flags(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      int s = 1;
      check(paqs_layout_node(layout.get(), static_cast<int>(i + 1), nullptr, nullptr, &s));
      flags[i] = s;
    }
    for (int label : parse_label_list(o.fixed, "--fixed")) {
      check_label(layout.get(), label, "--fixed");
      flags[static_cast<std::size_t>(label - 1)] = 0;
    }
    layout = make<Layout>(
        [&](paqs_layout** l) { return paqs_layout_with_stochastic(layout.get(), flags.data(), flags.size(), l); });
  }

  std::vector<int> watch = o.watch.empty() ? std::vector<int>{o.inject} : parse_label_list(o.watch, "--watch");
  for (int w : watch) check_label(layout.get(), w, "--watch");
  const auto [z0, z1] = o.z_range.empty() ? std::pair<double, double>{0.0, z} : parse_z_range(o.z_range, "--z-range");

  Hamiltonian h = o.layout.hamiltonian(layout.get(), run);
  paqs_dbeta_config cfg = paqs_dbeta_default();
  cfg.amplitude_per_mm = amp;
  cfg.z_interval_mm = interval_mm;
  cfg.realizations = o.realizations;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.time_budget_s = o.time_budget;

  run.seed = o.seed;
  run.parameters["inject"] = o.inject;
  run.parameters["z_cm"] = z;
  run.parameters["amplitude_per_mm"] = amp;
  run.parameters["z_interval_mm"] = interval_mm;
  run.parameters["realizations"] = o.realizations;
  run.parameters["watch"] = watch;
  run.parameters["z_range_cm"] = {z0, z1};

  Vector mean = make<Vector>(
      [&](paqs_vector** v) { return paqs_qsw_run(h.get(), layout.get(), &cfg, o.inject, z, v); });
  Series series = make<Series>([&](paqs_series** s) {
    return paqs_qsw_series(h.get(), layout.get(), &cfg, o.inject, z0, z1, watch.data(), watch.size(), s);
  });
  Profile profile = make<Profile>([&](paqs_profile** p) { return paqs_profile_sample(layout.get(), &cfg, z, 0, p); });

  run.prepare_out_dir();
  check(paqs_vector_write_csv(mean.get(), run.file("results.csv").c_str()));
  check(paqs_series_write_csv(series.get(), run.file("series.csv").c_str()));
  check(paqs_profile_write_csv(profile.get(), run.file("profile.csv").c_str()));
  check(paqs_hamiltonian_write_csv(h.get(), run.file("hamiltonian.csv").c_str()));
  check(paqs_layout_write_positions(layout.get(), run.file("positions.csv").c_str()));
  run.write_manifest();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// multi

struct MultiOptions {
  LayoutOptions layout;
  std::string state;
  std::string stats = "bosonic";
  std::string z;
  std::vector<std::string> watch;
  std::string perspective;
  std::string z_range;
  std::string formula = "per-det-average";
  unsigned threads = 1;
};

paqs_multi_options multi_options(const std::string& formula, unsigned threads) {
  paqs_multi_options opts{PAQS_DISTINGUISHABLE_PER_DET_AVERAGE, threads};
  if (formula == "independent") opts.distinguishable = PAQS_DISTINGUISHABLE_INDEPENDENT;
  else if (formula != "per-det-average")
    throw UsageError("--distinguishable-formula must be per-det-average or independent");
  return opts;
}

int cmd_multi(const MultiOptions& o, Run& run) {
  Layout layout = o.layout.load(run);
  const int modes = static_cast<int>(paqs_layout_size(layout.get()));
  paqs_statistics stats{};
  check(paqs_statistics_parse(o.stats.c_str(), &stats));
  const double z = parse_length_cm(o.z, "--z");
  const paqs_multi_options opts = multi_options(o.formula, o.threads);

  State input = make<State>([&](paqs_state** s) { return paqs_state_parse(o.state.c_str(), modes, s); });
  const int photons = paqs_state_photons(input.get());

  std::vector<State> watch;
  for (const auto& w : o.watch)
    watch.push_back(make<State>([&](paqs_state** s) { return paqs_state_parse(w.c_str(), modes, s); }));
  if (watch.empty()) watch.push_back(make<State>([&](paqs_state** s) { return paqs_state_parse(o.state.c_str(), modes, s); }));
  std::vector<const paqs_state*> watch_ptrs;
  for (const auto& w : watch) watch_ptrs.push_back(w.get());

  State fixed;
  if (photons >= 2) {
    if (o.perspective.empty()) {
      std::vector<int> occ(static_cast<std::size_t>(modes), 0);
      occ[0] = photons - 2;
      fixed = make<State>([&](paqs_state** s) { return paqs_state_create(occ.data(), occ.size(), s); });
    } else {
      fixed = make<State>([&](paqs_state** s) { return paqs_state_parse(o.perspective.c_str(), modes, s); });
    }
  } else if (!o.perspective.empty()) {
    throw UsageError("--perspective needs at least two photons in the input state");
  }
  const auto [z0, z1] = o.z_range.empty() ? std::pair<double, double>{0.0, z} : parse_z_range(o.z_range, "--z-range");

  Hamiltonian h = o.layout.hamiltonian(layout.get(), run);
  CMatrix u = make<CMatrix>([&](paqs_cmatrix** m) { return paqs_unitary_propagator(h.get(), z, m); });

  run.parameters["state"] = state_text(input.get());
  run.parameters["statistics"] = o.stats;
  run.parameters["distinguishable_formula"] = o.formula;
  run.parameters["z_cm"] = z;
  run.parameters["z_range_cm"] = {z0, z1};
  json w = json::array();
  for (const auto& s : watch) w.push_back(state_text(s.get()));
  run.parameters["watch"] = w;
  if (fixed) run.parameters["perspective"] = state_text(fixed.get());

  Distribution dist = make<Distribution>(
      [&](paqs_distribution** d) { return paqs_multi_distribution(u.get(), input.get(), stats, &opts, d); });
  Vector marginal = make<Vector>([&](paqs_vector** v) { return paqs_single_photon_marginal(dist.get(), v); });
  RMatrix corr;
  if (fixed) {
    corr = make<RMatrix>([&](paqs_rmatrix** m) {
      return paqs_two_particle_correlation(u.get(), input.get(), stats, fixed.get(), &opts, m);
    });
  }
  Series series = make<Series>([&](paqs_series** s) {
    return paqs_state_series(h.get(), input.get(), stats, watch_ptrs.data(), watch_ptrs.size(), z0, z1, &opts, s);
  });

  run.prepare_out_dir();
  check(paqs_distribution_write_csv(dist.get(), run.file("distribution.csv").c_str()));
  check(paqs_vector_write_csv(marginal.get(), run.file("marginal.csv").c_str()));
  if (corr) check(paqs_rmatrix_write_csv(corr.get(), run.file("correlation.csv").c_str()));
  check(paqs_series_write_csv(series.get(), run.file("series.csv").c_str()));
  check(paqs_cmatrix_write_unitary(u.get(), run.file("unitary.csv").c_str()));
  check(paqs_layout_write_positions(layout.get(), run.file("positions.csv").c_str()));
  run.write_manifest();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// boson

struct BosonOptions {
  std::string style = "reck";
  int modes = 0;
  std::string params;
  std::optional<std::uint64_t> random_seed;
  std::string unitary;
  std::string state;
  double tolerance = 1e-8;
  unsigned threads = 1;
  CLI::Option* modes_opt = nullptr;
};

int dense_mode_count(const std::string& state) {
  const std::string t = trim(state);
  if (t.size() < 2 || t.front() != '|' || t.back() != '>') return 0;
  const std::string inner = t.substr(1, t.size() - 2);
  if (inner.find_first_of(",;") != std::string::npos) return 0;
  return static_cast<int>(std::count_if(inner.begin(), inner.end(), [](char c) { return c != ' ' && c != '\t'; }));
}

int cmd_boson(const BosonOptions& o, Run& run) {
  const int sources = (!o.params.empty() ? 1 : 0) + (o.random_seed ? 1 : 0) + (!o.unitary.empty() ? 1 : 0);
  if (sources != 1) throw UsageError("give exactly one of --params, --random-seed or --unitary");
  paqs_mesh_style style{};
  check(paqs_mesh_style_parse(o.style.c_str(), &style));
  int modes = o.modes;
  if (o.modes_opt->count() == 0) {
    modes = dense_mode_count(o.state);
    if (modes == 0) throw UsageError("--modes is required when the state is not written in dense form");
  }
  if (modes < 1) throw UsageError("--modes must be at least 1");

  State input = make<State>([&](paqs_state** s) { return paqs_state_parse(o.state.c_str(), modes, s); });
  const paqs_multi_options opts{PAQS_DISTINGUISHABLE_PER_DET_AVERAGE, o.threads};

  run.parameters["style"] = o.style;
  run.parameters["modes"] = modes;
  run.parameters["state"] = state_text(input.get());
  run.parameters["tolerance"] = o.tolerance;

  Mesh mesh;
  CMatrix u;
  if (!o.unitary.empty()) {
    const std::string path = run.input("unitary", o.unitary);
    u = make<CMatrix>([&](paqs_cmatrix** m) { return paqs_cmatrix_read_unitary(path.c_str(), modes, m); });
    run.parameters["source"] = "unitary";
  } else {
    if (o.random_seed) {
      run.seed = *o.random_seed;
      run.parameters["source"] = "random";
      mesh = make<Mesh>([&](paqs_mesh** m) { return paqs_mesh_random(style, modes, *o.random_seed, m); });
    } else {
      const std::string path = run.input("params", o.params);
      run.parameters["source"] = "params";
      mesh = make<Mesh>([&](paqs_mesh** m) { return paqs_mesh_read_parameters(style, modes, path.c_str(), m); });
    }
    u = make<CMatrix>([&](paqs_cmatrix** m) { return paqs_mesh_compose(mesh.get(), m); });
  }

  int pass = 0;
  double deviation = 0;
  check(paqs_check_unitary(u.get(), o.tolerance, &pass, &deviation));
  run.parameters["unitarity_max_deviation"] = deviation;
  Distribution dist = make<Distribution>(
      [&](paqs_distribution** d) { return paqs_boson_sampling(u.get(), input.get(), o.tolerance, &opts, d); });

  run.prepare_out_dir();
  check(paqs_distribution_write_csv(dist.get(), run.file("distribution.csv").c_str()));
  check(paqs_cmatrix_write_unitary(u.get(), run.file("unitary.csv").c_str()));
  if (mesh) check(paqs_mesh_write_parameters(mesh.get(), run.file("parameters.csv").c_str()));
  run.write_manifest();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench-permanent

struct BenchOptions {
  std::string n_range = "2..16";
  int trials = 5;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchOptions& o, Run& run) {
  const auto dots = o.n_range.find("..");
  if (dots == std::string::npos) throw UsageError("--n-range expects lo..hi, e.g. 2..16");
  const int lo = parse_int_strict(o.n_range.substr(0, dots), "--n-range");
  const int hi = parse_int_strict(o.n_range.substr(dots + 2), "--n-range");
  run.seed = o.seed;
  run.parameters["n_min"] = lo;
  run.parameters["n_max"] = hi;
  run.parameters["trials"] = o.trials;
  Bench report = make<Bench>([&](paqs_bench_report** r) { return paqs_bench_permanents(lo, hi, o.trials, o.seed, r); });
  run.prepare_out_dir();
  check(paqs_bench_write_csv(report.get(), run.file("bench.csv").c_str()));
  run.write_manifest();
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_path, const std::string& out_override) {
  std::ifstream f(manifest_path);
  if (!f) throw ApiError(PAQS_ERR_IO, "cannot open manifest " + manifest_path);
  json m;
  try {
    m = json::parse(f);
  } catch (const json::exception& e) {
    throw ApiError(PAQS_ERR_FORMAT, manifest_path + ": " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw ApiError(PAQS_ERR_FORMAT, manifest_path + ": no argv array");
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw ApiError(PAQS_ERR_FORMAT, "a manifest cannot replay a replay");
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out" && i + 1 < args.size()) {
        args[i + 1] = out_override;
        replaced = true;
      } else if (args[i].rfind("--out=", 0) == 0) {
        args[i] = "--out=" + out_override;
        replaced = true;
      }
    }
    if (!replaced) {
      args.push_back("--out");
      args.push_back(out_override);
    }
  }
  return run_cli(args);
}

constexpr const char* kAmplitudeHelp =
    "Delta-beta amplitude A with unit, e.g. 1/mm or 10/cm. Offsets are drawn uniformly from [-A, A]. "
    "Experimentally useful values lie between 0 and about 1.2 mm^-1";

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"paqs: photonic analog quantum simulation"};
  app.set_version_flag("--version", std::string(paqs_version()));
  app.require_subcommand(1);

  Run run;
  run.argv = args;
  std::string out = "paqs-out";

  QwOptions qw;
  auto* qw_cmd = app.add_subcommand("qw", "Single-photon quantum walk");
  qw.layout.add(qw_cmd);
  qw_cmd->add_option("--inject", qw.inject, "Node label receiving the photon")->required();
  qw_cmd->add_option("--z", qw.z, "Propagation distance with unit, e.g. 5cm")->required();
  qw_cmd->add_option("--sigma", qw.sigma, "Facula width with unit (default 0.35 x minimum spacing)");
  qw_cmd->add_option("--resolution", qw.resolution, "Raster size: full (500), quick (100), N or WxH");
  qw_cmd->add_option("--colormap", qw.colormap, "PNG colour map: heat or gray");
  qw_cmd->add_option("--out", out, "Output directory");

  QswOptions qsw;
  auto* qsw_cmd = app.add_subcommand("qsw", "Quantum stochastic walk (delta-beta model)");
  qsw.layout.add(qsw_cmd);
  qsw_cmd->add_option("--inject", qsw.inject, "Node label receiving the photon")->required();
  qsw_cmd->add_option("--z", qsw.z, "Propagation distance with unit, e.g. 5mm")->required();
  qsw_cmd->add_option("--amplitude", qsw.amplitude, kAmplitudeHelp);
  qsw_cmd->add_option("--z-interval", qsw.z_interval, "Length of each constant-offset segment (default 0.1mm)");
  qsw_cmd->add_option("--realizations", qsw.realizations, "Ensemble size to average over");
  qsw_cmd->add_option("--seed", qsw.seed, "Random seed");
  qsw_cmd->add_option("--watch", qsw.watch, "Comma-separated node labels to track along z");
  qsw_cmd->add_option("--z-range", qsw.z_range, "Tracking range, e.g. 2mm..5mm (default 0..z)");
  qsw_cmd->add_option("--fixed", qsw.fixed, "Comma-separated node labels whose propagation constant stays fixed");
  qsw_cmd->add_option("--threads", qsw.threads, "Worker threads (results do not depend on this)");
  qsw_cmd->add_option("--time-budget", qsw.time_budget, "Abort after this many seconds (0: unlimited)");
  qsw_cmd->add_option("--out", out, "Output directory");

  MultiOptions multi;
  auto* multi_cmd = app.add_subcommand("multi", "Multi-photon walk with bosonic, fermionic or distinguishable statistics");
  multi.layout.add(multi_cmd);
  multi_cmd->add_option("--state", multi.state, "Input Fock state, dense |100010001> or sparse |1,1;5,1;9,1>")
      ->required();
  multi_cmd->add_option("--stats", multi.stats, "bosonic, fermionic or distinguishable");
  multi_cmd->add_option("--z", multi.z, "Propagation distance with unit")->required();
  multi_cmd->add_option("--watch", multi.watch, "Output state to track along z (repeatable)");
  multi_cmd->add_option("--perspective", multi.perspective,
                        "State of the N-2 photons held fixed in the correlation map (default: all on node 1)");
  multi_cmd->add_option("--z-range", multi.z_range, "Tracking range, e.g. 0mm..10mm (default 0..z)");
  multi_cmd->add_option("--distinguishable-formula", multi.formula, "per-det-average or independent");
  multi_cmd->add_option("--threads", multi.threads, "Worker threads");
  multi_cmd->add_option("--out", out, "Output directory");

  BosonOptions boson;
  auto* boson_cmd = app.add_subcommand("boson", "Boson sampling through a Reck or Clements mesh");
  boson_cmd->add_option("--style", boson.style, "reck or clements");
  boson.modes_opt = boson_cmd->add_option("--modes", boson.modes, "Number of modes M (inferred from a dense state)");
  boson_cmd->add_option("--params", boson.params, "Beam-splitter parameter CSV (order,theta_rad,phi_rad)");
  boson_cmd->add_option("--random-seed", boson.random_seed, "Draw random splitter parameters from this seed");
  boson_cmd->add_option("--unitary", boson.unitary, "Unitary CSV with interleaved real/imaginary columns");
  boson_cmd->add_option("--state", boson.state, "Input Fock state")->required();
  boson_cmd->add_option("--tolerance", boson.tolerance, "Unitarity tolerance on max |UU^dagger - I|");
  boson_cmd->add_option("--threads", boson.threads, "Worker threads");
  boson_cmd->add_option("--out", out, "Output directory");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench-permanent", "Time every permanent kernel over a range of orders");
  bench_cmd->add_option("--n-range", bench.n_range, "Matrix orders, e.g. 2..16");
  bench_cmd->add_option("--trials", bench.trials, "Timed trials per kernel and order");
  bench_cmd->add_option("--seed", bench.seed, "Random seed for the test matrices");
  bench_cmd->add_option("--out", out, "Output directory");

  std::string manifest_path;
  std::string replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest.json");
  replay_cmd->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  replay_cmd->add_option("--out", replay_out, "Write outputs here instead of the recorded directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  run.out_dir = out;
  if (replay_cmd->parsed()) return cmd_replay(manifest_path, replay_out);
  run.subcommand = app.get_subcommands().front()->get_name();
  if (qw_cmd->parsed()) return cmd_qw(qw, run);
  if (qsw_cmd->parsed()) return cmd_qsw(qsw, run);
  if (multi_cmd->parsed()) return cmd_multi(multi, run);
  if (boson_cmd->parsed()) return cmd_boson(boson, run);
  return cmd_bench(bench, run);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_cli(args);
  } catch (const UsageError& e) {
    std::cerr << "paqs: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "paqs: " << paqs_status_name(e.status) << " error: " << e.what() << "\n";
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "paqs: " << e.what() << "\n";
    return kExitContract;
  }
}
