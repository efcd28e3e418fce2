#include "paqs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "paqs/error.hpp"
#include "paqs/rng.hpp"

namespace paqs {

const char* to_string(MeshStyle style) noexcept { return style == MeshStyle::Reck ? "reck" : "clements"; }

MeshStyle mesh_style_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "reck") return MeshStyle::Reck;
  if (lower == "clements") return MeshStyle::Clements;
  fail(ErrorKind::InvalidArgument, "unknown decomposition style '" + name + "' (reck|clements)");
}

std::vector<MeshSlot> mesh_layout(MeshStyle style, int modes) {
  require(modes >= 2, ErrorKind::InvalidArgument, "a mesh needs at least 2 modes");
  std::vector<MeshSlot> slots;
  slots.reserve(static_cast<std::size_t>(modes * (modes - 1) / 2));
  int order = 1;
  if (style == MeshStyle::Reck) {
    for (int k = 1; k < modes; ++k)
      for (int m = k; m >= 1; --m) slots.push_back({order++, m, 2 * k - m - 1, m + 0.5});
  } else {
    for (int col = 0; col < modes; ++col)
      for (int m = (col % 2 == 0) ? 1 : 2; m < modes; m += 2) slots.push_back({order++, m, col, m + 0.5});
  }
  return slots;
}

MeshSpec MeshSpec::zero(MeshStyle style, int modes) {
  MeshSpec spec;
  spec.style = style;
  spec.modes = modes;
  for (const auto& slot : mesh_layout(style, modes)) spec.splitters.push_back({slot.order, slot.mode, 0.0, 0.0});
  spec.diagonal.assign(static_cast<std::size_t>(modes), Complex{1.0, 0.0});
  return spec;
}

MeshSpec MeshSpec::from_parameters(MeshStyle style, int modes, std::vector<BeamSplitterParam> params) {
  MeshSpec spec = zero(style, modes);
  require(params.size() == spec.splitters.size(), ErrorKind::InvalidArgument,
          "a " + std::string(to_string(style)) + " mesh on " + std::to_string(modes) + " modes needs " +
              std::to_string(spec.splitters.size()) + " splitters, got " + std::to_string(params.size()));
  std::sort(params.begin(), params.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].order == static_cast<int>(i) + 1, ErrorKind::InvalidArgument,
            "splitter orders must be a permutation of 1.." + std::to_string(params.size()));
    spec.splitters[i].theta = params[i].theta;
    spec.splitters[i].phi = params[i].phi;
  }
  spec.validate();
  return spec;
}

void MeshSpec::validate() const {
  require(modes >= 2, ErrorKind::InvalidArgument, "a mesh needs at least 2 modes");
  const auto expected = static_cast<std::size_t>(modes * (modes - 1) / 2);
  require(splitters.size() == expected, ErrorKind::InvalidArgument,
          "mesh needs " + std::to_string(expected) + " splitters, has " + std::to_string(splitters.size()));
  require(diagonal.size() == static_cast<std::size_t>(modes), ErrorKind::InvalidArgument,
          "diagonal phase vector must have one entry per mode");
  for (const auto& d : diagonal)
    require(std::abs(std::abs(d) - 1.0) <= 1e-12, ErrorKind::Domain, "diagonal phases must have unit modulus");
  for (std::size_t i = 0; i < splitters.size(); ++i) {
    const auto& p = splitters[i];
    require(p.order == static_cast<int>(i) + 1, ErrorKind::InvalidArgument, "splitters must be sorted by order 1..K");
    require(p.mode >= 1 && p.mode < modes, ErrorKind::InvalidArgument,
            "splitter " + std::to_string(p.order) + " acts on channels outside 1.." + std::to_string(modes));
    require(std::isfinite(p.theta) && std::isfinite(p.phi), ErrorKind::Domain,
            "splitter " + std::to_string(p.order) + " has non-finite angles");
  }
}

ComplexMatrix bs_transform(int modes, const BeamSplitterParam& p) {
  require(p.mode >= 1 && p.mode + 1 <= modes, ErrorKind::InvalidArgument,
          "beam splitter channels (" + std::to_string(p.mode) + "," + std::to_string(p.mode + 1) +
              ") are not adjacent modes within 1.." + std::to_string(modes));
  require(std::isfinite(p.theta) && std::isfinite(p.phi), ErrorKind::Domain, "beam splitter angles must be finite");
  ComplexMatrix t = ComplexMatrix::Identity(modes, modes);
  const Complex phase = std::polar(1.0, p.phi);
  const int a = p.mode - 1;
  t(a, a) = phase * std::cos(p.theta);
  t(a, a + 1) = -std::sin(p.theta);
  t(a + 1, a) = phase * std::sin(p.theta);
  t(a + 1, a + 1) = std::cos(p.theta);
  return t;
}

ComplexMatrix compose_mesh(const MeshSpec& spec) {
  spec.validate();
  ComplexMatrix u = ComplexMatrix::Identity(spec.modes, spec.modes);
  for (const auto& p : spec.splitters) {
    // Left-multiplying by the 2x2 block only touches rows m and m+1.
    const int a = p.mode - 1;
    const Complex phase = std::polar(1.0, p.phi);
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    for (int col = 0; col < spec.modes; ++col) {
      const Complex top = u(a, col), bottom = u(a + 1, col);
      u(a, col) = phase * c * top - s * bottom;
      u(a + 1, col) = phase * s * top + c * bottom;
    }
  }
  for (int row = 0; row < spec.modes; ++row) u.row(row) *= spec.diagonal[static_cast<std::size_t>(row)];
  return u;
}

UnitarityCheck check_unitary(const ComplexMatrix& u, double tol) {
  require(u.rows() >= 1 && u.rows() == u.cols(), ErrorKind::InvalidArgument,
          "unitarity check needs a square matrix, got " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()));
  require(u.allFinite(), ErrorKind::Domain, "matrix has non-finite entries");
  const ComplexMatrix defect = u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols());
  const double dev = defect.cwiseAbs().maxCoeff();
  return {dev <= tol, dev};
}

MeshSpec random_parameters(MeshStyle style, int modes, std::uint64_t seed) {
  MeshSpec spec = MeshSpec::zero(style, modes);
  CounterRng rng(seed, 0);
  for (auto& p : spec.splitters) {
    p.theta = rng.uniform(0.0, std::numbers::pi / 2);
    p.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return spec;
}

OutputDistribution boson_sampling_distribution(const MeshSpec& spec, const FockConfiguration& s,
                                               const MultiParticleOptions& opts) {
  return full_distribution(compose_mesh(spec), s, ParticleStatistics::Bosonic, opts);
}

OutputDistribution boson_sampling_distribution(const ComplexMatrix& u, const FockConfiguration& s,
                                               const MultiParticleOptions& opts, double tol) {
  const auto check = check_unitary(u, tol);
  if (!check.pass) {
    std::ostringstream msg;
    msg << "matrix is not unitary: max |UU^dagger - I| = " << check.max_deviation << " exceeds " << tol;
    fail(ErrorKind::Numerical, msg.str());
  }
  return full_distribution(u, s, ParticleStatistics::Bosonic, opts);
}

}  // namespace paqs
