#include "congrulab/transforms.hpp"

#include "congrulab/error.hpp"

#include <Eigen/LU>
#include "json.hpp"

#include <cmath>
#include <string>

namespace congrulab {

Orthogonal4::Orthogonal4(const Mat4& m) : m_(m) {
  const double err = (m.transpose() * m - Mat4::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) {
    throw Error(ErrorCode::NotOrthogonalMatrix, "|M^T M - I| = " + std::to_string(err));
  }
}

Orthogonal4 Orthogonal4::operator*(const Orthogonal4& other) const {
  return Orthogonal4(m_ * other.m_, Unchecked{});
}

Orthogonal4 Orthogonal4::transpose() const { return Orthogonal4(m_.transpose(), Unchecked{}); }

double Orthogonal4::determinant() const { return m_.determinant(); }

Orthogonal4 AxisRotation::matrix() const {
  const Vec4& e1 = frame.e1();
  const Vec4& e2 = frame.e2();
  const Vec4& z = frame.zeta();
  Mat4 m = Mat4::Identity();
  if (family == RotationFamily::FixZeta) {
    const double c = std::cos(parameter);
    const double s = std::sin(parameter);
    m += (c - 1.0) * (e1 * e1.transpose() + e2 * e2.transpose()) +
         s * (e2 * e1.transpose() - e1 * e2.transpose());
  } else {
    const Vec4 v = -std::sin(parameter) * e1 + std::cos(parameter) * e2;
    m -= 2.0 * (v * v.transpose() + z * z.transpose());
  }
  return Orthogonal4(m);
}

std::pair<double, double> AxisRotation::map_coordinates(double t, double azimuth) const {
  if (family == RotationFamily::FixZeta) return {t, azimuth + parameter};
  return {-t, 2.0 * parameter - azimuth};
}

AxisRotation rotation_fixing_zeta(const SphereFrame& frame, double alpha) {
  return AxisRotation{frame, RotationFamily::FixZeta, alpha * kPi};
}

AxisRotation pi_rotation_about(const SphereFrame& frame, double u_azimuth) {
  return AxisRotation{frame, RotationFamily::FlipZeta, u_azimuth};
}

Orthogonal4 rotation_in_hyperplane(const SphereFrame& frame, const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::NotUnit, "rotation axis must be nonzero");
  const Vec3 k = axis / n;
  Mat3 kx;
  kx << 0.0, -k.z(), k.y(), k.z(), 0.0, -k.x(), -k.y(), k.x(), 0.0;
  const Mat3 r = Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
  const auto b = frame.hyperplane_basis();
  const Mat4 m = b * r * b.transpose() + frame.w() * frame.w().transpose();
  return Orthogonal4(m);
}

Orthogonal4 reflection_O(const Direction4& zeta) {
  const Vec4& z = zeta.vec();
  return Orthogonal4(2.0 * z * z.transpose() - Mat4::Identity());
}

Orthogonal4 compose(const Orthogonal4& a, const Orthogonal4& b) { return a * b; }

void to_json(nlohmann::json& j, const Orthogonal4& m) {
  j = nlohmann::json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) j.push_back(m.matrix()(r, c));
}

void from_json(const nlohmann::json& j, Orthogonal4& m) {
  if (!j.is_array() || j.size() != 16) {
    throw Error(ErrorCode::SpecParseError, "orthogonal matrix must be a 16-number array");
  }
  Mat4 a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = j.at(4 * r + c).get<double>();
  m = Orthogonal4(a);
}

}  // namespace congrulab
