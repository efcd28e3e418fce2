#include "paqs/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "paqs/error.hpp"

namespace paqs::formats {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string out(buf, ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";  // 'n' covers inf/nan
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool try_parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool try_parse_int(std::string_view text, long long& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

const char* to_string(Schema schema) noexcept {
  switch (schema) {
    case Schema::Positions: return "positions";
    case Schema::Parameters: return "parameters";
    case Schema::Unitary: return "unitary";
    case Schema::Results: return "results";
    case Schema::Series: return "series";
    case Schema::Distribution: return "distribution";
  }
  return "unknown";
}

CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable table;
  table.source = std::move(source);
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, row_has_content = false;
  std::size_t line = 1, row_line = 1;
  auto end_row = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    const bool blank = !row_has_content && row.size() == 1 && trim(row.front()).empty();
    if (!blank) {
      table.rows.push_back(std::move(row));
      table.lines.push_back(row_line);
    }
    row.clear();
    row_has_content = false;
  };
  // Skip a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      row_has_content = true;
    } else if (c == '\n') {
      end_row();
      row_line = ++line;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw FormatError(table.source, row_line, 0, "unterminated quoted cell");
  if (!cell.empty() || !row.empty()) end_row();
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n\r") == std::string::npos) {
      out += c;
    } else {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
  }
  return out + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

namespace {

[[noreturn]] void bad(const CsvTable& t, std::size_t row, std::size_t col, Schema schema, const std::string& msg) {
  throw FormatError(t.source, row < t.lines.size() ? t.lines[row] : 0, col, std::string(to_string(schema)) + ": " + msg);
}

double cell_double(const CsvTable& t, std::size_t row, std::size_t col, Schema schema, bool finite = true) {
  double v = 0;
  if (!try_parse_double(t.rows[row][col], v)) bad(t, row, col + 1, schema, "'" + t.rows[row][col] + "' is not a number");
  if (finite && !std::isfinite(v)) bad(t, row, col + 1, schema, "value must be finite");
  return v;
}

long long cell_int(const CsvTable& t, std::size_t row, std::size_t col, Schema schema) {
  long long v = 0;
  if (!try_parse_int(t.rows[row][col], v)) bad(t, row, col + 1, schema, "'" + t.rows[row][col] + "' is not an integer");
  return v;
}

// First data row: skips a header whose first cell is not numeric.
std::size_t data_start(const CsvTable& t) {
  if (t.rows.empty()) return 0;
  double ignored;
  return try_parse_double(t.rows[0][0], ignored) ? 0 : 1;
}

void require_arity(const CsvTable& t, std::size_t row, std::size_t min_cols, std::size_t max_cols, Schema schema) {
  const auto n = t.rows[row].size();
  if (n < min_cols || n > max_cols)
    bad(t, row, 0, schema,
        "expected " + (min_cols == max_cols ? std::to_string(min_cols)
                                            : std::to_string(min_cols) + "-" + std::to_string(max_cols)) +
            " columns, found " + std::to_string(n));
}

template <typename Row>
std::string join_rows(const std::vector<Row>& rows) {
  std::string out;
  for (const auto& r : rows) out += csv_row(r);
  return out;
}

}  // namespace

WaveguideLayout parse_positions(const CsvTable& t) {
  const auto start = data_start(t);
  if (t.rows.size() <= start) throw FormatError(t.source, 0, 0, "positions: file contains no nodes");
  std::vector<Node> nodes;
  std::vector<bool> flags;
  std::vector<std::size_t> row_of_label;
  for (std::size_t r = start; r < t.rows.size(); ++r) {
    require_arity(t, r, 3, 4, Schema::Positions);
    const long long label = cell_int(t, r, 0, Schema::Positions);
    const std::size_t count = t.rows.size() - start;
    if (label < 1 || static_cast<std::size_t>(label) > count)
      bad(t, r, 1, Schema::Positions, "label " + std::to_string(label) + " outside 1.." + std::to_string(count));
    if (row_of_label.size() < count) row_of_label.assign(count, 0);
    if (row_of_label[static_cast<std::size_t>(label - 1)] != 0)
      bad(t, r, 1, Schema::Positions,
          "duplicate label " + std::to_string(label) + " (first seen on line " +
              std::to_string(t.lines[row_of_label[static_cast<std::size_t>(label - 1)] - 1]) + ")");
    row_of_label[static_cast<std::size_t>(label - 1)] = r + 1;
    nodes.push_back({static_cast<int>(label), cell_double(t, r, 1, Schema::Positions), cell_double(t, r, 2, Schema::Positions)});
    bool flag = true;
    if (t.rows[r].size() == 4) {
      const long long f = cell_int(t, r, 3, Schema::Positions);
      if (f != 0 && f != 1) bad(t, r, 4, Schema::Positions, "stochastic flag must be 0 or 1");
      flag = f == 1;
    }
    flags.push_back(flag);
  }
  try {
    return WaveguideLayout(std::move(nodes), std::move(flags));
  } catch (const Error& e) {
    throw FormatError(t.source, 0, 0, std::string("positions: ") + e.what());
  }
}

WaveguideLayout read_positions(const std::filesystem::path& path) { return parse_positions(read_csv(path)); }

std::string positions_csv(const WaveguideLayout& layout) {
  const auto& flags = layout.stochastic_flags();
  const bool with_flags = std::any_of(flags.begin(), flags.end(), [](bool b) { return !b; });
  std::vector<std::vector<std::string>> rows;
  rows.push_back(with_flags ? std::vector<std::string>{"label", "x_um", "y_um", "stochastic"}
                            : std::vector<std::string>{"label", "x_um", "y_um"});
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& n = layout.nodes()[i];
    std::vector<std::string> row{std::to_string(n.label), format_double(n.x_um), format_double(n.y_um)};
    if (with_flags) row.push_back(flags[i] ? "1" : "0");
    rows.push_back(std::move(row));
  }
  return join_rows(rows);
}

void write_positions(const WaveguideLayout& layout, const std::filesystem::path& path) {
  write_text(path, positions_csv(layout));
}

std::vector<BeamSplitterParam> parse_parameters(const CsvTable& t) {
  const auto start = data_start(t);
  if (t.rows.size() <= start) throw FormatError(t.source, 0, 0, "parameters: file contains no splitters");
  const std::size_t count = t.rows.size() - start;
  std::vector<BeamSplitterParam> params;
  std::set<long long> seen;
  for (std::size_t r = start; r < t.rows.size(); ++r) {
    require_arity(t, r, 3, 3, Schema::Parameters);
    const long long order = cell_int(t, r, 0, Schema::Parameters);
    if (order < 1 || static_cast<std::size_t>(order) > count)
      bad(t, r, 1, Schema::Parameters,
          "order " + std::to_string(order) + " outside 1.." + std::to_string(count) + " (orders must be a permutation)");
    if (!seen.insert(order).second) bad(t, r, 1, Schema::Parameters, "duplicate order " + std::to_string(order));
    params.push_back({static_cast<int>(order), 0, cell_double(t, r, 1, Schema::Parameters),
                      cell_double(t, r, 2, Schema::Parameters)});
  }
  std::sort(params.begin(), params.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
  return params;
}

std::vector<BeamSplitterParam> read_parameters(const std::filesystem::path& path) {
  return parse_parameters(read_csv(path));
}

std::string parameters_csv(const std::vector<BeamSplitterParam>& params) {
  std::vector<std::vector<std::string>> rows{{"order", "theta_rad", "phi_rad"}};
  for (const auto& p : params) rows.push_back({std::to_string(p.order), format_double(p.theta), format_double(p.phi)});
  return join_rows(rows);
}

void write_parameters(const std::vector<BeamSplitterParam>& params, const std::filesystem::path& path) {
  write_text(path, parameters_csv(params));
}

ComplexMatrix parse_unitary(const CsvTable& t, int modes) {
  require(modes >= 1, ErrorKind::InvalidArgument, "mode count must be at least 1");
  const auto start = data_start(t);
  const std::size_t rows = t.rows.size() - std::min(start, t.rows.size());
  if (rows != static_cast<std::size_t>(modes))
    throw FormatError(t.source, 0, 0,
                      "unitary: expected " + std::to_string(modes) + " rows, found " + std::to_string(rows));
  ComplexMatrix u(modes, modes);
  for (int i = 0; i < modes; ++i) {
    const std::size_t r = start + static_cast<std::size_t>(i);
    require_arity(t, r, static_cast<std::size_t>(2 * modes), static_cast<std::size_t>(2 * modes), Schema::Unitary);
    for (int j = 0; j < modes; ++j)
      u(i, j) = {cell_double(t, r, static_cast<std::size_t>(2 * j), Schema::Unitary),
                 cell_double(t, r, static_cast<std::size_t>(2 * j + 1), Schema::Unitary)};
  }
  return u;
}

ComplexMatrix read_unitary(const std::filesystem::path& path, int modes) { return parse_unitary(read_csv(path), modes); }

std::string unitary_csv(const ComplexMatrix& u) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      row.push_back(format_double(u(i, j).real()));
      row.push_back(format_double(u(i, j).imag()));
    }
    rows.push_back(std::move(row));
  }
  return join_rows(rows);
}

void write_unitary(const ComplexMatrix& u, const std::filesystem::path& path) { write_text(path, unitary_csv(u)); }

std::string results_csv(const ProbabilityDistribution& dist) {
  std::string out;
  for (double p : dist.probs) out += format_double(p) + "\n";
  return out;
}

void write_results(const ProbabilityDistribution& dist, const std::filesystem::path& path) {
  write_text(path, results_csv(dist));
}

ProbabilityDistribution parse_results(const CsvTable& t) {
  ProbabilityDistribution d;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    require_arity(t, r, 1, 1, Schema::Results);
    d.probs.push_back(cell_double(t, r, 0, Schema::Results));
  }
  return d;
}

std::string distribution_csv(const OutputDistribution& dist, StateFormat format) {
  std::vector<std::vector<std::string>> rows{{"state", "probability"}};
  for (const auto& [c, p] : dist.entries) rows.push_back({format_state(c, format), format_double(p)});
  return join_rows(rows);
}

void write_distribution(const OutputDistribution& dist, const std::filesystem::path& path) {
  write_text(path, distribution_csv(dist));
}

OutputDistribution parse_distribution(const CsvTable& t, int modes) {
  OutputDistribution d;
  const std::size_t start = !t.rows.empty() && t.rows[0].size() == 2 && t.rows[0][0] == "state" ? 1 : 0;
  for (std::size_t r = start; r < t.rows.size(); ++r) {
    require_arity(t, r, 2, 2, Schema::Distribution);
    FockConfiguration c;
    try {
      c = parse_state(t.rows[r][0], modes);
    } catch (const Error& e) {
      bad(t, r, 1, Schema::Distribution, e.what());
    }
    d.entries.emplace_back(std::move(c), cell_double(t, r, 1, Schema::Distribution));
  }
  return d;
}

OutputDistribution read_distribution(const std::filesystem::path& path, int modes) {
  return parse_distribution(read_csv(path), modes);
}

std::string series_csv(const ProbabilitySeries& series) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"z_cm"};
  header.insert(header.end(), series.names.begin(), series.names.end());
  rows.push_back(std::move(header));
  for (std::size_t k = 0; k < series.z_cm.size(); ++k) {
    std::vector<std::string> row{format_double(series.z_cm[k])};
    for (const auto& v : series.values) row.push_back(format_double(v[k]));
    rows.push_back(std::move(row));
  }
  return join_rows(rows);
}

void write_series(const ProbabilitySeries& series, const std::filesystem::path& path) {
  write_text(path, series_csv(series));
}

std::string real_matrix_csv(const RealMatrix& m) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  return join_rows(rows);
}

std::string real_vector_csv(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += format_double(x) + "\n";
  return out;
}

std::string hamiltonian_csv(const Hamiltonian& h) { return real_matrix_csv(h.matrix().real()); }

std::string raster_csv(const FaculaRaster& raster) {
  std::string out;
  for (int iy = 0; iy < raster.height; ++iy) {
    for (int ix = 0; ix < raster.width; ++ix) {
      if (ix) out += ',';
      out += format_double(raster.at(ix, iy));
    }
    out += '\n';
  }
  return out;
}

std::string profile_csv(const DBetaProfile& profile) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"segment", "z_start_cm"};
  const auto width = profile.segments.empty() ? 0 : profile.segments.front().size();
  for (Eigen::Index j = 0; j < width; ++j) header.push_back("node" + std::to_string(j + 1) + "_per_cm");
  rows.push_back(std::move(header));
  for (std::size_t k = 0; k < profile.segments.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), format_double(profile.segment_length_cm * static_cast<double>(k))};
    for (Eigen::Index j = 0; j < profile.segments[k].size(); ++j) row.push_back(format_double(profile.segments[k](j)));
    rows.push_back(std::move(row));
  }
  return join_rows(rows);
}

std::string bench_csv(const BenchReport& report) {
  std::vector<std::vector<std::string>> rows{{"algorithm", "n", "median_ns", "relative_error_vs_dispatcher"}};
  for (const auto& e : report.entries)
    rows.push_back({to_string(e.algorithm), std::to_string(e.order), format_double(e.median_ns),
                    format_double(e.relative_error)});
  return join_rows(rows);
}

}  // namespace paqs::formats
