#pragma once

#include <complex>

#include <Eigen/Dense>

namespace paqs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Canonical units: positions in micrometers, Hamiltonian entries in 1/cm,
// propagation lengths in centimeters.
inline constexpr double kMicrometersPerCentimeter = 1.0e4;
inline constexpr double kMillimetersPerCentimeter = 10.0;

}  // namespace paqs
