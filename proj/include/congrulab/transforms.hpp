#pragma once

#include "congrulab/sphere_geometry.hpp"

#include "json.hpp"

namespace congrulab {

/// Element of O(4). Construction checks M^T M = I within 1e-10.
class Orthogonal4 {
 public:
  Orthogonal4() : m_(Mat4::Identity()) {}
  explicit Orthogonal4(const Mat4& m);

  static Orthogonal4 identity() { return Orthogonal4(); }

  const Mat4& matrix() const { return m_; }
  Vec4 operator*(const Vec4& x) const { return m_ * x; }
  Orthogonal4 operator*(const Orthogonal4& other) const;
  Orthogonal4 transpose() const;
  Orthogonal4 inverse() const { return transpose(); }
  double determinant() const;

 private:
  struct Unchecked {};
  Orthogonal4(const Mat4& m, Unchecked) : m_(m) {}
  Mat4 m_;
};

enum class RotationFamily { FixZeta, FlipZeta };

/// Rotation of the 3-space spanned by S^2(w) that fixes w and maps zeta to
/// +zeta (FixZeta: `parameter` is the rotation angle in radians, e1 turns
/// toward e2) or to -zeta (FlipZeta: `parameter` is the azimuth of the
/// pi-rotation axis u = cos(p) e1 + sin(p) e2).
struct AxisRotation {
  SphereFrame frame;
  RotationFamily family;
  double parameter;

  Orthogonal4 matrix() const;
  /// Image of the grid coordinates (t, azimuth) of S^2(w).
  std::pair<double, double> map_coordinates(double t, double azimuth) const;
};

/// Rotation by alpha * pi about zeta; alpha = 1/2 takes e1 to e2.
AxisRotation rotation_fixing_zeta(const SphereFrame& frame, double alpha);
AxisRotation pi_rotation_about(const SphereFrame& frame, double u_azimuth);

/// Rotation by `angle` about `axis` (coordinates in the basis e1, e2, zeta)
/// inside the hyperplane w^perp; w is fixed.
Orthogonal4 rotation_in_hyperplane(const SphereFrame& frame, const Vec3& axis, double angle);

/// The map fixing zeta and negating zeta^perp: 2 zeta zeta^T - I.
Orthogonal4 reflection_O(const Direction4& zeta);

Orthogonal4 compose(const Orthogonal4& a, const Orthogonal4& b);

/// Row-major 16-number array.
void to_json(nlohmann::json& j, const Orthogonal4& m);
void from_json(const nlohmann::json& j, Orthogonal4& m);

}  // namespace congrulab
