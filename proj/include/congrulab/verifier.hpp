#pragma once

#include "congrulab/bodies.hpp"
#include "congrulab/funk_analysis.hpp"
#include "congrulab/registration.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace congrulab {

enum class Outcome { Equal, OEqual, Both, ZeroOdd, Inconclusive };

struct VerifierConfig {
  /// Tolerance; relative to the sup norm of the compared functions unless
  /// absolute_tol is set.
  double tol = 1e-6;
  bool absolute_tol = false;
  int n_rings = SphereGrid::kDefaultRings;
  int n_azimuth = SphereGrid::kDefaultAzimuth;
  /// Directions w on S^2(zeta) classified by the registration step.
  int w_samples = 200;
  /// Great circles and nodes per circle for the even-part comparison.
  int even_w_samples = 128;
  int circle_nodes = 128;
  /// Fresh S^3 points for the final certificate and sup-norm estimates.
  int certificate_samples = 4096;
  /// Mixed Xi(0)/Xi(1) labels are accepted as ZeroOdd when the odd parts are
  /// below this multiple of tol.
  double zero_odd_factor = 100.0;
  double snap_tol = 1e-2;
  /// w with |w . eta| below this for another diameter direction eta are
  /// skipped (the diameter would lie in S^2(w)).
  double diameter_exclusion = 1e-3;
  /// Projection verifier: also match the ground projections K|zeta^perp and
  /// L|zeta^perp when both bodies are polytopes.
  bool ground_projection = false;
  std::uint64_t seed = 1;

  /// Throws ConfigInvalid.
  void validate() const;
  ClassifyOptions classify_options() const;
};

struct PsiWitness {
  Vec4 w;
  double axis_azimuth;
  /// |f_o o phi - f_o| for the half turn about zeta on S^2(w).
  double zeta_symmetry_residual;
  /// Residual of the best (u, pi) self-symmetry of f_o on S^2(w).
  double u_pi_residual;
};

struct DiameterReport {
  Vec4 zeta;
  double length_k = 0.0;
  double length_l = 0.0;
  int count_k = 0;
  int count_l = 0;
  int excluded_w = 0;
  Vec4 shift_k = Vec4::Zero();
  Vec4 shift_l = Vec4::Zero();
};

struct CongruenceReport {
  int directions = 0;
  double max_residual = 0.0;
  Vec4 worst_w = Vec4::Zero();
};

struct HypothesisReport {
  EvenPartsReport even_parts;
  double odd_sup_f = 0.0;
  double odd_sup_g = 0.0;
  int xi0 = 0;
  int xi1 = 0;
  int xi_other = 0;
  int psi = 0;
  int none = 0;
  int ambiguous = 0;
  int collapsed = 0;
  int symmetry_violations = 0;
  std::vector<PsiWitness> psi_witnesses;
  /// sup of |f - g| (Equal) or |f - g o O| (OEqual) on a fresh sample.
  std::optional<double> certificate_residual;
  std::optional<DiameterReport> diameters;
  std::optional<CongruenceReport> congruence;
  /// Section verifier: "R1" (zeta kept) or "R2" (zeta reversed).
  std::optional<std::string> section_case;
  /// Ground projection clause: proper and improper rigid motions found.
  std::optional<int> ground_congruences;
  std::optional<int> ground_proper_congruences;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::string reason;
  /// K = L + translation (Equal, Both) or K = O L + translation (OEqual).
  Vec4 translation = Vec4::Zero();
  /// Absolute tolerance actually applied.
  double tol = 0.0;
  std::vector<Classification> classifications;
  HypothesisReport report;
};

/// Decides f = g or f = g o O on S^3 from the relations f o phi_w = g on
/// every S^2(w), w in S^2(zeta), with phi_w(zeta) = +-zeta.
Verdict decide_functional_equation(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                   const VerifierConfig& config = {});

/// Same with an explicit set of directions w.
Verdict decide_functional_equation(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                   const std::vector<Vec4>& w_nodes, const VerifierConfig& config);

/// Convex bodies with directly congruent side projections. Throws
/// DiameterHypothesisFailed or CongruenceHypothesisFailed.
Verdict verify_projection_theorem(const Body4& k, const Body4& l, const Direction4& zeta,
                                  const VerifierConfig& config = {});

/// Star bodies with directly congruent central sections. Throws
/// DiameterHypothesisFailed, CongruenceHypothesisFailed or
/// StarShapednessLost.
Verdict verify_section_theorem(const Body4& k, const Body4& l, const Direction4& zeta,
                               const VerifierConfig& config = {});

const char* to_string(Outcome outcome);

nlohmann::json to_json(const Verdict& verdict, const VerifierConfig& config);

}  // namespace congrulab
