#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "paqs/bench.hpp"
#include "paqs/fock.hpp"
#include "paqs/lattice.hpp"
#include "paqs/mesh.hpp"
#include "paqs/propagator.hpp"
#include "paqs/stochastic.hpp"

namespace paqs::formats {

/// Shortest decimal that parses back to the same binary64.  Integral values
/// keep a trailing ".0" so they still read as reals.
std::string format_double(double value);

/// Strict decimal parse; leading '+' allowed, trailing garbage is not.
bool try_parse_double(std::string_view text, double& out);
bool try_parse_int(std::string_view text, long long& out);

enum class Schema { Positions, Parameters, Unitary, Results, Series, Distribution };
const char* to_string(Schema schema) noexcept;

/// Comma-separated cells with RFC 4180 quoting.  `lines` holds the 1-based
/// source line of each row so diagnostics can point at the file.
struct CsvTable {
  std::string source;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
};

CsvTable parse_csv(std::string_view text, std::string source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);
std::string csv_row(const std::vector<std::string>& cells);
void write_text(const std::filesystem::path& path, const std::string& content);

// Positions: label, x (um), y (um) and an optional 0/1 stochastic column.
// A header row is detected when the first cell is not an integer.
WaveguideLayout parse_positions(const CsvTable& table);
WaveguideLayout read_positions(const std::filesystem::path& path);
std::string positions_csv(const WaveguideLayout& layout);
void write_positions(const WaveguideLayout& layout, const std::filesystem::path& path);

// Beam-splitter parameters: order, theta, phi (radians).  Orders must be a
// permutation of 1..K; `mode` is left 0 for MeshSpec::from_parameters.
std::vector<BeamSplitterParam> parse_parameters(const CsvTable& table);
std::vector<BeamSplitterParam> read_parameters(const std::filesystem::path& path);
std::string parameters_csv(const std::vector<BeamSplitterParam>& params);
void write_parameters(const std::vector<BeamSplitterParam>& params, const std::filesystem::path& path);

// Unitary: M rows of interleaved re, im pairs.  Unitarity is not checked.
ComplexMatrix parse_unitary(const CsvTable& table, int modes);
ComplexMatrix read_unitary(const std::filesystem::path& path, int modes);
std::string unitary_csv(const ComplexMatrix& u);
void write_unitary(const ComplexMatrix& u, const std::filesystem::path& path);

// Results: one probability per row, node-label order, no header.
std::string results_csv(const ProbabilityDistribution& dist);
void write_results(const ProbabilityDistribution& dist, const std::filesystem::path& path);
ProbabilityDistribution parse_results(const CsvTable& table);

// Distribution: "state,probability" header then one row per configuration.
std::string distribution_csv(const OutputDistribution& dist, StateFormat format = StateFormat::Auto);
void write_distribution(const OutputDistribution& dist, const std::filesystem::path& path);
OutputDistribution parse_distribution(const CsvTable& table, int modes);
OutputDistribution read_distribution(const std::filesystem::path& path, int modes);

// Series: "z_cm,<name>..." header then kSeriesPoints rows.
std::string series_csv(const ProbabilitySeries& series);
void write_series(const ProbabilitySeries& series, const std::filesystem::path& path);

// Plain numeric grids, no header.
std::string real_matrix_csv(const RealMatrix& m);
std::string real_vector_csv(const std::vector<double>& v);
std::string hamiltonian_csv(const Hamiltonian& h);  // real part; couplings are real
std::string raster_csv(const FaculaRaster& raster);
std::string profile_csv(const DBetaProfile& profile);  // segment, z_start_cm, offsets in 1/cm
std::string bench_csv(const BenchReport& report);

}  // namespace paqs::formats
