#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace congrulab {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Scalar function on S^3, evaluated at unit vectors of R^4.
using SphereFunction = std::function<double(const Vec4&)>;

/// Unit vector of R^4.
class Direction4 {
 public:
  Direction4() : v_(1.0, 0.0, 0.0, 0.0) {}

  /// Accepts a vector whose norm is within 1e-10 of one and renormalizes it.
  explicit Direction4(const Vec4& v);
  Direction4(double x0, double x1, double x2, double x3) : Direction4(Vec4(x0, x1, x2, x3)) {}

  /// Normalizes any nonzero vector.
  static Direction4 normalize(const Vec4& v);
  static Direction4 axis(int i);

  const Vec4& vec() const { return v_; }
  operator const Vec4&() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double dot(const Vec4& other) const { return v_.dot(other); }
  Direction4 operator-() const { return Direction4(-v_, 0); }

 private:
  Direction4(const Vec4& v, int) : v_(v) {}
  Vec4 v_;
};

/// Orthonormal frame {e1, e2, w, zeta} with w . zeta = 0. The pair (e1, e2)
/// spans the great circle S^2(w) ∩ S^2(zeta) and is oriented so that the
/// frame is positively oriented in R^4.
class SphereFrame {
 public:
  /// Coordinate frame e1, e2, w = e3, zeta = e4.
  SphereFrame()
      : zeta_(Vec4::UnitW()), w_(Vec4::UnitZ()), e1_(Vec4::UnitX()), e2_(Vec4::UnitY()) {}
  /// Throws NonOrthogonal if |zeta . w| > 1e-10.
  SphereFrame(const Direction4& zeta, const Direction4& w);

  const Vec4& zeta() const { return zeta_; }
  const Vec4& w() const { return w_; }
  const Vec4& e1() const { return e1_; }
  const Vec4& e2() const { return e2_; }

  /// Point cos(a) e1 + sin(a) e2 of the great circle.
  Vec4 circle_point(double azimuth) const;
  /// Point sqrt(1-t^2) (cos a e1 + sin a e2) + t zeta of S^2(w).
  Vec4 point(double t, double azimuth) const;
  /// Columns e1, e2, zeta: orthonormal basis of the hyperplane w^perp.
  Eigen::Matrix<double, 4, 3> hyperplane_basis() const;
  /// Columns e1, e2, w, zeta.
  Mat4 matrix() const;

  bool same_as(const SphereFrame& other, double tol = 1e-12) const;

 private:
  Vec4 zeta_;
  Vec4 w_;
  Vec4 e1_;
  Vec4 e2_;
};

/// Gauss-Legendre nodes on (-1, 1), increasing, exactly antisymmetric.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// (t-ring x azimuth) product grid on S^2(w) with poles +-zeta.
class SphereGrid {
 public:
  static constexpr int kDefaultRings = 64;
  static constexpr int kDefaultAzimuth = 256;

  /// Gauss-Legendre rings.
  SphereGrid(SphereFrame frame, int n_rings = kDefaultRings, int n_azimuth = kDefaultAzimuth);
  /// Explicit rings; throws ConfigInvalid when the invariants fail.
  SphereGrid(SphereFrame frame, std::vector<double> t_nodes, std::vector<double> t_weights,
             int n_azimuth);

  const SphereFrame& frame() const { return frame_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  const std::vector<double>& t_weights() const { return t_weights_; }
  int n_rings() const { return static_cast<int>(t_nodes_.size()); }
  int n_azimuth() const { return n_azimuth_; }
  double azimuth_step() const { return kTwoPi / n_azimuth_; }
  double azimuth(int j) const { return azimuth_step() * j; }

  /// True when t_nodes[i] = -t_nodes[n-1-i] to rounding.
  bool rings_symmetric(double tol = 1e-13) const;
  bool same_layout(const SphereGrid& other) const;

 private:
  SphereFrame frame_;
  std::vector<double> t_nodes_;
  std::vector<double> t_weights_;
  int n_azimuth_;
};

/// sqrt(1-t^2) x + t zeta for x in S^2(zeta).
Vec4 embed_parallel(const Vec4& x, double t, const Direction4& zeta);

/// Grid point at ring i_t, azimuth index j_az; throws IndexOutOfRange.
Vec4 grid_point(const SphereGrid& grid, int i_t, int j_az);

/// n equispaced points of S^2(w) ∩ S^2(zeta), starting at e1.
std::vector<Vec4> great_circle_nodes(const SphereFrame& frame, int n);

/// Trapezoidal rule on a circle of circumference 2 pi.
double circle_quadrature(const std::vector<double>& f_values);

/// Quasi-uniform points on S^3 (super-Fibonacci spiral).
std::vector<Vec4> s3_spiral(int n);
/// Quasi-uniform points on the great 2-sphere S^2(zeta) (Fibonacci lattice).
std::vector<Vec4> s2_fibonacci(const Direction4& zeta, int n);
/// Orthonormal basis (columns) of zeta^perp, deterministic in zeta.
Eigen::Matrix<double, 4, 3> complement_basis(const Vec4& zeta);

}  // namespace congrulab
