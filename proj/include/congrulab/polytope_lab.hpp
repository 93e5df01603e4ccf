#pragma once

#include "congrulab/bodies.hpp"

#include "json.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace congrulab {

using Basis43 = Eigen::Matrix<double, 4, 3>;

/// Vertices of a 3-polytope in a 3-dimensional subspace H of R^4, stored in
/// the coordinates of H's orthonormal basis. Only extreme points are kept.
struct Polytope3 {
  Basis43 basis;
  std::vector<Vec3> vertices;

  double support(const Vec3& x) const;
};

/// Rigid motion x -> phi x + a with phi(q_{j(i)}) + a = q_i for every
/// vertex i, where j = permutation.
struct SymmetryRecord {
  Mat3 phi;
  Vec3 a;
  std::vector<int> permutation;
};

/// sup over S^3 of |h_K - h_L|: quasi-uniform sample then pattern-search
/// ascent from the best points.
double hausdorff_distance(const Body4& k, const Body4& l, int n_sample = 20000);

/// Polytope with v vertices on the boundary of the smooth body K: farthest
/// point seeding over a pool of boundary points, then Lloyd-style spreading.
Body4 inscribe_polytope(const Body4& k, int v, std::uint64_t seed);

struct RateFit {
  std::vector<int> v;
  std::vector<double> delta;
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double log_constant = 0.0;
};

/// Least-squares slope of log delta against log v. Throws InsufficientData
/// for fewer than 4 points.
RateFit fit_rate(const std::vector<int>& v, const std::vector<double>& delta);
RateFit approximation_rate(const Body4& k, const std::vector<int>& v_list, std::uint64_t seed,
                           int n_sample = 20000);

/// Orthonormal basis of a uniformly random 3-dimensional subspace.
Basis43 random_subspace(std::mt19937_64& rng);

/// Throws ConfigInvalid if the basis is not orthonormal, DegenerateProjection
/// if the projection is flat within 1e-10.
Polytope3 project_polytope(const std::vector<Vec4>& vertices, const Basis43& basis);
Polytope3 project_polytope(const Body4& p, const Basis43& basis);

/// Rigid motions taking the point set `from` onto `to` (same size), each
/// verified on all points within tol relative to the point spread.
std::vector<SymmetryRecord> find_congruences(const std::vector<Vec3>& from, const std::vector<Vec3>& to,
                                             double tol = 1e-8, bool include_identity = true);

/// Non-identity rigid motions of Q onto itself. Throws TooFewVertices below 4.
std::vector<SymmetryRecord> detect_rigid_symmetries(const Polytope3& q, double tol = 1e-8);

/// Smallest relative vertex-set mismatch over all non-identity orthogonal
/// maps fixed by a base-triple assignment; zero for a symmetric Q.
double symmetry_margin(const Polytope3& q);

struct PerturbOptions {
  int h_samples = 50;
  double tol = 1e-8;
  /// Hausdorff bound on delta(P, P'), relative to diam(P).
  double delta_bound = 1e-2;
  int max_iterations = 20;
};

struct PerturbationResult {
  std::vector<Vec4> vertices;
  int iterations = 0;
  /// Largest vertex displacement, an upper bound on delta(P, P').
  double delta = 0.0;
  double epsilon_final = 0.0;
  std::vector<Basis43> subspaces;
  std::vector<double> margins;

  /// {delta, epsilon_final, subspaces:[{basis, min_symmetry_residual}]}.
  nlohmann::json certificate() const;
};

/// Random radial perturbations of the vertices (magnitude epsilon, halved
/// from 1e-2 diam) until no sampled 3-dimensional projection has a rigid
/// motion symmetry. Returns the input unchanged if it already qualifies.
/// Throws BudgetExhausted.
PerturbationResult perturb_to_asymmetric(const std::vector<Vec4>& vertices, std::uint64_t seed,
                                         const PerturbOptions& options = {});
PerturbationResult perturb_to_asymmetric(const Body4& p, std::uint64_t seed, const PerturbOptions& options = {});

}  // namespace congrulab
