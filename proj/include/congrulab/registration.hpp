#pragma once

#include "congrulab/funk_analysis.hpp"
#include "congrulab/transforms.hpp"

#include <optional>
#include <string>

namespace congrulab {

/// Candidate rotation phi of S^2(w) with f o phi ~ g. For FixZeta the
/// parameter is the rotation angle, for FlipZeta the azimuth of the
/// half-turn axis; both are normalized to [0, 2 pi) (FlipZeta to [0, pi)).
struct RotationWitness {
  SphereFrame frame;
  RotationFamily family = RotationFamily::FixZeta;
  double parameter = 0.0;
  /// Sup norm of f o phi - g on the grid.
  double residual = 0.0;
  /// Parameter of the best integer azimuth shift, before refinement.
  double coarse_parameter = 0.0;
  /// The correlation is flat: every shift fits equally well.
  bool degenerate = false;

  AxisRotation rotation() const { return AxisRotation{frame, family, parameter}; }
};

/// Best rotation about zeta taking f to g (f o phi = g): per-ring circular
/// cross-correlation over all integer azimuth shifts, then off-grid
/// refinement. Residual from the band-limited (spectral) shift of f.
/// Throws GridMismatch unless both share a grid.
RotationWitness register_fix_zeta(const GridFunction& f, const GridFunction& g);

/// Same for half turns about axes u in S^2(w) ∩ S^2(zeta), which map ring t
/// to ring -t with the azimuth reflected. Throws AsymmetricRings if the
/// t-nodes are not symmetric about 0.
RotationWitness register_flip_zeta(const GridFunction& f, const GridFunction& g);

enum class LabelKind { Xi, Psi, None };

struct Classification {
  Vec4 w = Vec4::Zero();
  LabelKind label = LabelKind::None;
  /// Xi: rotation angle in units of pi, in [0, 2).
  double alpha = 0.0;
  /// Psi: azimuth of the half-turn axis.
  double axis_azimuth = 0.0;
  /// Witness of the reported label (or of the best candidate for None).
  RotationWitness witness;
  double tol = 0.0;
  double fix_residual = 0.0;
  double flip_residual = 0.0;
  /// Both Xi(0) and Xi(1) fit: the direction does not discriminate.
  bool ambiguous = false;
  /// alpha outside {0, 1} was replaced by Xi(0) after f = g = 0 on S^2(w).
  bool collapsed = false;
  /// Two distinct half-turn axes register under tol.
  bool symmetry_violation = false;

  std::string label_string() const;
};

struct ClassifyOptions {
  int n_rings = SphereGrid::kDefaultRings;
  int n_azimuth = SphereGrid::kDefaultAzimuth;
  /// Snap distance to alpha in {0, 1}, in units of pi.
  double snap_tol = 1e-2;
  /// Exact residual sweeps stop once they exceed this multiple of tol, so
  /// residuals of rejected candidates are lower bounds. Zero disables.
  double early_exit_factor = 10.0;
};

/// Places the frame's w into one of Xi(alpha), Psi(u) or None for the
/// relation f o phi = g on S^2(w). Residuals are exact (callables are
/// re-evaluated at the rotated grid points).
Classification classify_direction(const SphereFunction& f, const SphereFunction& g, const SphereFrame& frame,
                                  double tol, const ClassifyOptions& options = {});

/// Same, with f and g already sampled on a shared grid; f is evaluated only
/// for off-grid residuals.
Classification classify_sampled(const GridFunction& fg, const GridFunction& gg, const SphereFunction& f,
                                double tol, const ClassifyOptions& options = {});

/// True iff f o phi = f on S^2(xi) within tol for phi the rotation by
/// alpha * pi about zeta. Requires xi . zeta = 0.
bool detect_zeta_symmetry(const SphereFunction& f, const Direction4& xi, const Direction4& zeta, double alpha,
                          double tol, const ClassifyOptions& options = {});

/// Sup deviation |f o phi - f| behind detect_zeta_symmetry.
double zeta_symmetry_residual(const SphereFunction& f, const Direction4& xi, const Direction4& zeta,
                              double alpha, const ClassifyOptions& options = {});

/// Half-turn axis u in the frame's great circle with f o phi_u = f within
/// tol, if any. The witness is flagged degenerate when every axis fits.
std::optional<RotationWitness> detect_u_pi_symmetry(const SphereFunction& f, const SphereFrame& frame, double tol,
                                                     const ClassifyOptions& options = {});

const char* to_string(LabelKind label);

}  // namespace congrulab
