#pragma once

#include "congrulab/sphere_geometry.hpp"
#include "congrulab/transforms.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace congrulab {

enum class BodyKind { Convex, Star };

struct PolytopeShape {
  std::vector<Vec4> vertices;
};

/// {x : sum_i ((R^T x)_i / a_i)^2 <= 1} with R = orientation.
struct EllipsoidShape {
  Vec4 semiaxes;
  Orthogonal4 orientation;
};

/// One term |x| P(x.pole / |x|) of a zonal perturbation; coefficients[k]
/// multiplies s^k.
struct ZonalTerm {
  Vec4 pole;
  std::vector<double> coefficients;
};

/// Support function h_base + epsilon * sum of zonal terms.
struct ZonalBumpShape {
  EllipsoidShape base;
  double epsilon = 0.0;
  std::vector<ZonalTerm> terms;
};

using Shape = std::variant<PolytopeShape, EllipsoidShape, ZonalBumpShape>;

/// Entry of a transform chain: a linear map or a shift.
using TransformStep = std::variant<Orthogonal4, Vec4>;

/// Convex or star body in R^4 given by exact shape data and an affine map
/// x -> U x + a accumulated from the transform chain. Copies share the shape
/// data and are cheap. Evaluation is thread-safe.
class Body4 {
 public:
  /// Throws DegenerateBody unless the vertices affinely span R^4 (needs at
  /// least 5). Star polytopes must contain the origin in the interior.
  static Body4 polytope(std::vector<Vec4> vertices, BodyKind kind = BodyKind::Convex);
  static Body4 ellipsoid(const Vec4& semiaxes, const Orthogonal4& orientation = {},
                         BodyKind kind = BodyKind::Convex);
  /// Throws NonConvex if the perturbed support function fails the sampled
  /// curvature test.
  static Body4 zonal_bump(const EllipsoidShape& base, double epsilon, std::vector<ZonalTerm> terms);
  static Body4 ball(double radius = 1.0);
  /// [-half, half]^4.
  static Body4 hypercube(double half = 1.0);

  BodyKind kind() const { return kind_; }
  const Shape& shape() const { return *shape_; }
  const std::vector<TransformStep>& transform_chain() const { return chain_; }
  /// Composite map x -> linear() x + offset().
  const Mat4& linear() const { return linear_; }
  const Vec4& offset() const { return offset_; }

  bool is_polytope() const { return std::holds_alternative<PolytopeShape>(*shape_); }
  /// Vertices after the transform chain; empty for smooth shapes.
  const std::vector<Vec4>& vertices() const { return vertices_; }

  /// Support function, extended 1-homogeneously off the sphere.
  double support(const Vec4& theta) const;
  /// A point of the body where theta . x = support(theta).
  Vec4 support_point(const Vec4& theta) const;
  double width(const Vec4& theta) const { return support(theta) + support(-theta); }
  /// Throws OriginOutside when the origin is not interior, UnsupportedShape
  /// for zonal bumps.
  double radial(const Vec4& theta) const;
  bool contains_origin_interior() const;

  /// The body U K + a; appended to the transform chain.
  Body4 apply(const Orthogonal4& u, const Vec4& a) const;
  Body4 translated(const Vec4& a) const { return apply(Orthogonal4::identity(), a); }
  Body4 transformed(const Orthogonal4& u) const { return apply(u, Vec4::Zero()); }
  Body4 with_kind(BodyKind kind) const;

  /// Shape-only diameter bound used to scale tolerances.
  double circumradius_bound() const;

  struct FacetCache;

 private:
  Body4() = default;
  void finish();

  BodyKind kind_ = BodyKind::Convex;
  std::shared_ptr<const Shape> shape_;
  std::shared_ptr<FacetCache> facets_;
  std::vector<TransformStep> chain_;
  Mat4 linear_ = Mat4::Identity();
  Vec4 offset_ = Vec4::Zero();
  std::vector<Vec4> vertices_;
};

double support(const Body4& body, const Direction4& theta);
double radial(const Body4& body, const Direction4& theta);
double width(const Body4& body, const Direction4& theta);
Body4 apply(const Body4& body, const Orthogonal4& u, const Vec4& a);

/// Diameter directions (one per antipodal pair) with their endpoints
/// [lower, upper], upper - lower = length * direction.
struct DiameterSet {
  std::vector<Direction4> directions;
  std::vector<std::pair<Vec4, Vec4>> endpoints;
  double length = 0.0;
  double tolerance = 0.0;
};

/// Width scan over S^3 followed by ascent. `tol <= 0` selects the default
/// (1e-9 * length for polytopes, 1e-6 * length otherwise). Throws
/// DegenerateBody when the width is constant within tol.
DiameterSet find_diameters(const Body4& body, double tol = 0.0);

/// Index of the diameter within `angle_tol` of +-direction, or -1.
int match_diameter(const DiameterSet& set, const Vec4& direction, double angle_tol = 1e-3);

/// h_K restricted to S^2(w); throws NonOrthogonal off the great sphere.
SphereFunction project_support(const Body4& body, const Direction4& w);
/// rho_K restricted to S^2(w).
SphereFunction section_radial(const Body4& body, const Direction4& w);

const char* to_string(BodyKind kind);

}  // namespace congrulab
