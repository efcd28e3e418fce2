#include "paqs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "paqs/error.hpp"

namespace paqs {

WaveguideLayout::WaveguideLayout(std::vector<Node> nodes, std::vector<bool> stochastic)
    : nodes_(std::move(nodes)), stochastic_(std::move(stochastic)) {
  require(!nodes_.empty(), ErrorKind::InvalidArgument, "layout must contain at least one node");
  if (stochastic_.empty()) stochastic_.assign(nodes_.size(), true);
  require(stochastic_.size() == nodes_.size(), ErrorKind::InvalidArgument,
          "stochastic flag count does not match node count");

  // Sort flags along with the nodes.
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes_[a].label < nodes_[b].label; });
  std::vector<Node> sorted;
  std::vector<bool> flags;
  sorted.reserve(nodes_.size());
  for (auto i : order) {
    sorted.push_back(nodes_[i]);
    flags.push_back(stochastic_[i]);
  }
  nodes_ = std::move(sorted);
  stochastic_ = std::move(flags);

  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    require(n.label == static_cast<int>(i) + 1, ErrorKind::InvalidArgument,
            "node labels must be exactly 1..n without gaps or duplicates (problem at label " + std::to_string(n.label) + ")");
    require(std::isfinite(n.x_um) && std::isfinite(n.y_um), ErrorKind::InvalidArgument,
            "node " + std::to_string(n.label) + " has a non-finite coordinate");
    require(seen.emplace(n.x_um, n.y_um).second, ErrorKind::Domain,
            "node " + std::to_string(n.label) + " duplicates the coordinates of another node");
  }
}

const Node& WaveguideLayout::node(int label) const {
  require(label >= 1 && static_cast<std::size_t>(label) <= nodes_.size(), ErrorKind::InvalidArgument,
          "node label " + std::to_string(label) + " out of range 1.." + std::to_string(nodes_.size()));
  return nodes_[static_cast<std::size_t>(label - 1)];
}

bool WaveguideLayout::is_stochastic(int label) const {
  node(label);
  return stochastic_[static_cast<std::size_t>(label - 1)];
}

WaveguideLayout WaveguideLayout::with_stochastic_flags(std::vector<bool> flags) const {
  return WaveguideLayout(nodes_, std::move(flags));
}

double WaveguideLayout::min_spacing_um() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t j = i + 1; j < nodes_.size(); ++j)
      best = std::min(best, std::hypot(nodes_[i].x_um - nodes_[j].x_um, nodes_[i].y_um - nodes_[j].y_um));
  return best;
}

void CouplingModel::validate() const {
  require(std::isfinite(amplitude_per_cm) && amplitude_per_cm > 0, ErrorKind::Domain, "coupling amplitude must be positive");
  require(std::isfinite(decay_length_um) && decay_length_um > 0, ErrorKind::Domain, "coupling decay length must be positive");
  require(cutoff_um > 0 && !std::isnan(cutoff_um), ErrorKind::Domain, "coupling cutoff distance must be positive");
}

double coupling_coefficient(double distance_um, const CouplingModel& model) {
  model.validate();
  require(std::isfinite(distance_um) && distance_um > 0, ErrorKind::Domain,
          "waveguide spacing must be positive and finite, got " + std::to_string(distance_um));
  if (distance_um > model.cutoff_um) return 0.0;
  return model.amplitude_per_cm * std::exp(-distance_um / model.decay_length_um);
}

double hermitian_defect(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "matrix must be square");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

Hamiltonian::Hamiltonian(ComplexMatrix matrix, double beta_baseline) : matrix_(std::move(matrix)), beta_(beta_baseline) {
  require(matrix_.rows() >= 1 && matrix_.rows() == matrix_.cols(), ErrorKind::InvalidArgument,
          "Hamiltonian must be a non-empty square matrix");
  require(matrix_.allFinite(), ErrorKind::Domain, "Hamiltonian has non-finite entries");
  const double defect = hermitian_defect(matrix_);
  require(defect <= 1e-12, ErrorKind::Domain, "Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
  real_ = matrix_.imag().isZero(0.0);
}

Hamiltonian build_hamiltonian(const WaveguideLayout& layout, const CouplingModel& model, double beta_per_cm) {
  model.validate();
  require(std::isfinite(beta_per_cm), ErrorKind::Domain, "beta must be finite");
  const auto& nodes = layout.nodes();
  const auto n = static_cast<Eigen::Index>(nodes.size());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = beta_per_cm;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = nodes[static_cast<std::size_t>(i)];
      const auto& b = nodes[static_cast<std::size_t>(j)];
      const double c = coupling_coefficient(std::hypot(a.x_um - b.x_um, a.y_um - b.y_um), model);
      h(i, j) = c;
      h(j, i) = c;
    }
  }
  return Hamiltonian(std::move(h), beta_per_cm);
}

WaveguideLayout rectangular_lattice(int nx, int ny, double dx_um, double dy_um) {
  require(nx >= 1 && ny >= 1, ErrorKind::InvalidArgument, "lattice node counts must be at least 1");
  require(std::isfinite(dx_um) && dx_um > 0 && std::isfinite(dy_um) && dy_um > 0, ErrorKind::InvalidArgument,
          "lattice spacings must be positive");
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 1; iy <= ny; ++iy)
    for (int ix = 1; ix <= nx; ++ix)
      nodes.push_back({lattice_label(nx, ix, iy), (ix - 1) * dx_um, (ny - iy) * dy_um});
  return WaveguideLayout(std::move(nodes));
}

}  // namespace paqs
