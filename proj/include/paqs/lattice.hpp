#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "paqs/types.hpp"

namespace paqs {

struct Node {
  int label = 0;  // 1-based
  double x_um = 0.0;
  double y_um = 0.0;

  bool operator==(const Node&) const = default;
};

/// Ordered set of waveguide positions.  Labels are always 1..n; nodes are
/// stored in label order.  Each node also carries a flag telling the
/// stochastic walk whether its propagation constant fluctuates.
class WaveguideLayout {
 public:
  /// Validates: labels form exactly 1..n, coordinates finite and pairwise
  /// distinct.  `stochastic` defaults to all-true when empty.
  explicit WaveguideLayout(std::vector<Node> nodes, std::vector<bool> stochastic = {});

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(int label) const;
  const std::vector<bool>& stochastic_flags() const noexcept { return stochastic_; }
  bool is_stochastic(int label) const;

  WaveguideLayout with_stochastic_flags(std::vector<bool> flags) const;
  double min_spacing_um() const;  // +inf for a single node

  bool operator==(const WaveguideLayout&) const = default;

 private:
  std::vector<Node> nodes_;
  std::vector<bool> stochastic_;
};

/// Empirical coupling law C(d) = amplitude * exp(-d / decay_length).
/// The published fit was made for spacings of roughly 10-25 um; other
/// spacings are extrapolated, not clamped.
struct CouplingModel {
  double amplitude_per_cm = 41.42;
  double decay_length_um = 4.616;
  double cutoff_um = 50.0;

  static CouplingModel uncut() {
    CouplingModel m;
    m.cutoff_um = std::numeric_limits<double>::infinity();
    return m;
  }
  void validate() const;
};

double coupling_coefficient(double distance_um, const CouplingModel& model = {});

/// Dense Hermitian tight-binding Hamiltonian in 1/cm.
class Hamiltonian {
 public:
  /// Takes ownership of a Hermitian matrix; rejects asymmetry above 1e-12.
  explicit Hamiltonian(ComplexMatrix matrix, double beta_baseline = 0.0);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  double beta_baseline() const noexcept { return beta_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  bool is_real() const noexcept { return real_; }

 private:
  ComplexMatrix matrix_;
  double beta_;
  bool real_;
};

/// Largest |H_ij - conj(H_ji)|.
double hermitian_defect(const ComplexMatrix& m);

Hamiltonian build_hamiltonian(const WaveguideLayout& layout, const CouplingModel& model = {}, double beta_per_cm = 0.0);

/// nx * ny nodes numbered left to right, then top to bottom.  The y axis
/// points up, so node 1 sits at the top-left corner (0, (ny - 1) * dy).
WaveguideLayout rectangular_lattice(int nx, int ny, double dx_um, double dy_um);

/// Label of the node in column `ix` and row `iy` (both 1-based).
inline int lattice_label(int nx, int ix, int iy) { return (iy - 1) * nx + ix; }

}  // namespace paqs
