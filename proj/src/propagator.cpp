#include "paqs/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "paqs/error.hpp"

namespace paqs {

namespace {
constexpr Complex kI{0.0, 1.0};

void check_distance(double z_cm) {
  require(std::isfinite(z_cm) && z_cm >= 0, ErrorKind::Domain, "propagation distance must be finite and >= 0");
}
}  // namespace

SpectralPropagator::SpectralPropagator(const Hamiltonian& h) { decompose(h.matrix(), h.is_real()); }

SpectralPropagator::SpectralPropagator(const ComplexMatrix& h) {
  require(h.rows() >= 1 && h.rows() == h.cols(), ErrorKind::InvalidArgument, "Hamiltonian must be square");
  require(h.allFinite(), ErrorKind::Domain, "Hamiltonian has non-finite entries");
  const double defect = hermitian_defect(h);
  require(defect <= 1e-12, ErrorKind::Domain, "matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  decompose(h, h.imag().isZero(0.0));
}

void SpectralPropagator::decompose(const ComplexMatrix& h, bool real) {
  if (real) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h.real());
    require(solver.info() == Eigen::Success, ErrorKind::Numerical, "eigendecomposition failed");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    require(solver.info() == Eigen::Success, ErrorKind::Numerical, "eigendecomposition failed");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }
}

ComplexMatrix SpectralPropagator::unitary(double z_cm) const {
  require(std::isfinite(z_cm), ErrorKind::Domain, "propagation distance must be finite");
  // V V^dagger is only the identity to rounding; keep z = 0 exact.
  if (z_cm == 0.0) return ComplexMatrix::Identity(values_.size(), values_.size());
  ComplexVector phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) phases(k) = std::exp(-kI * (values_(k) * z_cm));
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

ComplexVector SpectralPropagator::apply(const ComplexVector& psi, double z_cm) const {
  require(psi.size() == values_.size(), ErrorKind::InvalidArgument, "state length does not match Hamiltonian");
  if (z_cm == 0.0) return psi;
  ComplexVector coeffs = vectors_.adjoint() * psi;
  for (Eigen::Index k = 0; k < values_.size(); ++k) coeffs(k) *= std::exp(-kI * (values_(k) * z_cm));
  return vectors_ * coeffs;
}

ComplexVector SpectralPropagator::column(int inject_label, double z_cm) const {
  require(inject_label >= 1 && inject_label <= values_.size(), ErrorKind::InvalidArgument,
          "inject label " + std::to_string(inject_label) + " out of range 1.." + std::to_string(values_.size()));
  if (z_cm == 0.0) return ComplexVector::Unit(values_.size(), inject_label - 1);
  ComplexVector coeffs = vectors_.row(inject_label - 1).adjoint();
  for (Eigen::Index k = 0; k < values_.size(); ++k) coeffs(k) *= std::exp(-kI * (values_(k) * z_cm));
  return vectors_ * coeffs;
}

ComplexMatrix unitary_propagator(const Hamiltonian& h, double z_cm) {
  check_distance(z_cm);
  return SpectralPropagator(h).unitary(z_cm);
}

ComplexMatrix unitary_propagator(const ComplexMatrix& h, double z_cm) {
  check_distance(z_cm);
  return SpectralPropagator(h).unitary(z_cm);
}

double ProbabilityDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

std::vector<double> series_distances(double z0_cm, double z1_cm) {
  require(std::isfinite(z0_cm) && std::isfinite(z1_cm) && z0_cm >= 0 && z1_cm > z0_cm, ErrorKind::InvalidArgument,
          "z range must satisfy 0 <= z0 < z1");
  std::vector<double> z(kSeriesPoints);
  for (int k = 0; k < kSeriesPoints; ++k) z[k] = z0_cm + (z1_cm - z0_cm) * k / (kSeriesPoints - 1);
  z.back() = z1_cm;
  return z;
}

ProbabilityDistribution evolve(const SpectralPropagator& prop, int inject_label, double z_cm) {
  check_distance(z_cm);
  const ComplexVector amp = prop.column(inject_label, z_cm);
  ProbabilityDistribution out;
  out.probs.resize(static_cast<std::size_t>(amp.size()));
  for (Eigen::Index j = 0; j < amp.size(); ++j) out.probs[static_cast<std::size_t>(j)] = std::norm(amp(j));
  return out;
}

ProbabilityDistribution evolve(const Hamiltonian& h, int inject_label, double z_cm) {
  return evolve(SpectralPropagator(h), inject_label, z_cm);
}

ProbabilitySeries probability_series(const Hamiltonian& h, int inject_label, double z0_cm, double z1_cm,
                                     const std::vector<int>& watch) {
  require(!watch.empty(), ErrorKind::InvalidArgument, "watch set must not be empty");
  for (int w : watch)
    require(w >= 1 && static_cast<std::size_t>(w) <= h.size(), ErrorKind::InvalidArgument,
            "watched node " + std::to_string(w) + " out of range");
  const SpectralPropagator prop(h);
  ProbabilitySeries series;
  series.z_cm = series_distances(z0_cm, z1_cm);
  for (int w : watch) series.names.push_back(std::to_string(w));
  series.values.assign(watch.size(), std::vector<double>(series.z_cm.size()));
  for (std::size_t k = 0; k < series.z_cm.size(); ++k) {
    const ComplexVector amp = prop.column(inject_label, series.z_cm[k]);
    for (std::size_t w = 0; w < watch.size(); ++w) series.values[w][k] = std::norm(amp(watch[w] - 1));
  }
  return series;
}

double FaculaRaster::peak() const { return grid.empty() ? 0.0 : *std::max_element(grid.begin(), grid.end()); }

double default_facula_sigma(const WaveguideLayout& layout) {
  const double spacing = layout.min_spacing_um();
  return std::isfinite(spacing) ? 0.35 * spacing : 5.0;
}

FaculaRaster facula_raster(const WaveguideLayout& layout, const ProbabilityDistribution& dist, int gx, int gy,
                           double sigma_um) {
  require(gx >= 2 && gy >= 2, ErrorKind::InvalidArgument, "raster resolution must be at least 2x2");
  require(std::isfinite(sigma_um) && sigma_um > 0, ErrorKind::InvalidArgument, "facula sigma must be positive");
  require(dist.probs.size() == layout.size(), ErrorKind::InvalidArgument,
          "distribution length does not match the layout");

  FaculaRaster r;
  r.width = gx;
  r.height = gy;
  r.sigma_um = sigma_um;
  const auto& nodes = layout.nodes();
  auto [xmin_it, xmax_it] = std::minmax_element(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.x_um < b.x_um; });
  auto [ymin_it, ymax_it] = std::minmax_element(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.y_um < b.y_um; });
  const double pad = 3.0 * sigma_um;
  r.x_min = xmin_it->x_um - pad;
  r.x_max = xmax_it->x_um + pad;
  r.y_min = ymin_it->y_um - pad;
  r.y_max = ymax_it->y_um + pad;
  r.grid.assign(static_cast<std::size_t>(gx) * gy, 0.0);

  const double step_x = (r.x_max - r.x_min) / (gx - 1);
  const double step_y = (r.y_max - r.y_min) / (gy - 1);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_um * sigma_um);
  // exp(-18) ~ 1.5e-8 of the peak; contributions beyond 6 sigma are dropped.
  const double reach = 6.0 * sigma_um;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double p = dist.probs[j];
    if (p == 0.0) continue;
    const auto& n = nodes[j];
    const int ix0 = std::max(0, static_cast<int>(std::floor((n.x_um - reach - r.x_min) / step_x)));
    const int ix1 = std::min(gx - 1, static_cast<int>(std::ceil((n.x_um + reach - r.x_min) / step_x)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((r.y_max - (n.y_um + reach)) / step_y)));
    const int iy1 = std::min(gy - 1, static_cast<int>(std::ceil((r.y_max - (n.y_um - reach)) / step_y)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      const double dy = r.y_at(iy) - n.y_um;
      const double wy = std::exp(-dy * dy * inv_two_sigma2);
      for (int ix = ix0; ix <= ix1; ++ix) {
        const double dx = r.x_at(ix) - n.x_um;
        r.grid[static_cast<std::size_t>(iy) * gx + ix] += p * wy * std::exp(-dx * dx * inv_two_sigma2);
      }
    }
  }
  return r;
}

}  // namespace paqs
