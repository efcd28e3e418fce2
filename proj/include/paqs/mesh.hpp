#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paqs/fock.hpp"
#include "paqs/types.hpp"

namespace paqs {

enum class MeshStyle { Reck, Clements };

const char* to_string(MeshStyle style) noexcept;
MeshStyle mesh_style_from_string(const std::string& name);

/// Beam splitter between adjacent modes (m, m+1), 1-based.  Reflectivity
/// cos(theta); phase phi on the input-m side.
struct BeamSplitterParam {
  int order = 0;   // 1-based position in the mesh
  int mode = 0;    // m; the partner is m + 1
  double theta = 0.0;
  double phi = 0.0;

  bool operator==(const BeamSplitterParam&) const = default;
};

/// Board position of one splitter: column along the propagation direction,
/// row halfway between its two channels (channel k sits at row k).
struct MeshSlot {
  int order;
  int mode;
  int column;
  double row;
};

/// M(M-1)/2 slots in physical order.  Reck: a triangle built from
/// diagonals (k,k+1),(k-1,k),...,(1,2) for k = 1..M-1.  Clements: M
/// columns alternating between pairs starting at mode 1 and mode 2.
std::vector<MeshSlot> mesh_layout(MeshStyle style, int modes);

struct MeshSpec {
  MeshStyle style = MeshStyle::Reck;
  int modes = 0;
  std::vector<BeamSplitterParam> splitters;  // sorted by order
  std::vector<Complex> diagonal;             // unit-modulus output phases

  /// Every splitter at theta = phi = 0 and an identity diagonal.
  static MeshSpec zero(MeshStyle style, int modes);
  /// Attaches (order, theta, phi) rows to the layout's channels by order.
  static MeshSpec from_parameters(MeshStyle style, int modes, std::vector<BeamSplitterParam> params);
  void validate() const;
};

/// Identity except the block [[e^{i phi} cos t, -sin t], [e^{i phi} sin t, cos t]]
/// on modes (m, m+1).
ComplexMatrix bs_transform(int modes, const BeamSplitterParam& p);

/// D * T_K * ... * T_1: the splitter with order 1 acts on the state first.
ComplexMatrix compose_mesh(const MeshSpec& spec);

struct UnitarityCheck {
  bool pass;
  double max_deviation;  // max |(U U^dagger - I)_ij|
};

inline constexpr double kDefaultUnitarityTolerance = 1e-8;
UnitarityCheck check_unitary(const ComplexMatrix& u, double tol = kDefaultUnitarityTolerance);

/// theta uniform on [0, pi/2], phi uniform on [0, 2 pi), identity diagonal.
/// Not Haar-distributed over U(M).
MeshSpec random_parameters(MeshStyle style, int modes, std::uint64_t seed);

/// Bosonic output distribution for a mesh.
OutputDistribution boson_sampling_distribution(const MeshSpec& spec, const FockConfiguration& s,
                                               const MultiParticleOptions& opts = {});
/// Same for an imported matrix; fails with ErrorKind::Numerical when it is
/// not unitary within `tol`.
OutputDistribution boson_sampling_distribution(const ComplexMatrix& u, const FockConfiguration& s,
                                               const MultiParticleOptions& opts = {},
                                               double tol = kDefaultUnitarityTolerance);

}  // namespace paqs
