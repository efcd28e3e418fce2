#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "paqs/lattice.hpp"
#include "paqs/types.hpp"

namespace paqs {

/// Number of propagation-distance samples in every probability series.
inline constexpr int kSeriesPoints = 100;

/// Eigen-decomposed Hamiltonian; evaluates exp(-iHz) for any z without
/// re-diagonalising.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Hamiltonian& h);
  /// Raw matrix entry point; rejects Hermitian defects above 1e-12.
  explicit SpectralPropagator(const ComplexMatrix& h);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const RealVector& eigenvalues() const noexcept { return values_; }

  /// exp(-iHz).  Negative z is accepted (inverse evolution).
  ComplexMatrix unitary(double z_cm) const;
  /// exp(-iHz) psi.
  ComplexVector apply(const ComplexVector& psi, double z_cm) const;
  /// Column `inject` of exp(-iHz): the state after injecting one photon.
  ComplexVector column(int inject_label, double z_cm) const;

 private:
  void decompose(const ComplexMatrix& h, bool real);

  ComplexMatrix vectors_;
  RealVector values_;
};

/// exp(-iHz) for z >= 0.
ComplexMatrix unitary_propagator(const Hamiltonian& h, double z_cm);
ComplexMatrix unitary_propagator(const ComplexMatrix& h, double z_cm);

struct ProbabilityDistribution {
  std::vector<double> probs;  // indexed by node label - 1

  double total() const;
  bool operator==(const ProbabilityDistribution&) const = default;
};

/// Watched quantities sampled at kSeriesPoints evenly spaced distances.
struct ProbabilitySeries {
  std::vector<double> z_cm;
  std::vector<std::string> names;           // one per watched item
  std::vector<std::vector<double>> values;  // values[item][sample]
};

/// kSeriesPoints values from z0 to z1, both endpoints exact.
std::vector<double> series_distances(double z0_cm, double z1_cm);

ProbabilityDistribution evolve(const Hamiltonian& h, int inject_label, double z_cm);
ProbabilityDistribution evolve(const SpectralPropagator& prop, int inject_label, double z_cm);

ProbabilitySeries probability_series(const Hamiltonian& h, int inject_label, double z0_cm, double z1_cm,
                                     const std::vector<int>& watch);

struct FaculaRaster {
  int width = 0;   // gx
  int height = 0;  // gy
  std::vector<double> grid;  // row-major; row 0 is the top edge (y_max)
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;  // micrometers
  double sigma_um = 0;

  double at(int ix, int iy) const { return grid[static_cast<std::size_t>(iy) * width + ix]; }
  double x_at(int ix) const { return x_min + (x_max - x_min) * ix / (width - 1); }
  double y_at(int iy) const { return y_max - (y_max - y_min) * iy / (height - 1); }
  double cell_area() const { return (x_max - x_min) / (width - 1) * (y_max - y_min) / (height - 1); }
  double peak() const;
};

inline constexpr int kFullResolution = 500;
inline constexpr int kQuickResolution = 100;

/// 0.35 x the smallest node spacing; 5 um for a single node.
double default_facula_sigma(const WaveguideLayout& layout);

/// Sum of 2D Gaussians of width sigma centred on each node, weighted by
/// its probability.  The extent pads the node bounding box by 3 sigma.
FaculaRaster facula_raster(const WaveguideLayout& layout, const ProbabilityDistribution& dist, int gx, int gy,
                           double sigma_um);

}  // namespace paqs
