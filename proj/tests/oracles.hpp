#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's algorithms beyond plain data types.

#include "congrulab/sphere_geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using congrulab::Mat3;
using congrulab::Mat4;
using congrulab::Vec3;
using congrulab::Vec4;

// Legendre polynomial by the three-term recurrence.
inline double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

inline Vec4 random_unit4(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 v;
  do v = Vec4(n(rng), n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

inline Vec4 random_orthogonal_to(const Vec4& z, std::mt19937_64& rng) {
  Vec4 v;
  do {
    v = random_unit4(rng);
    v -= v.dot(z) * z;
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline Mat4 random_orthogonal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat4 a;
  for (int i = 0; i < 16; ++i) a.data()[i] = n(rng);
  Eigen::HouseholderQR<Mat4> qr(a);
  Mat4 q = qr.householderQ();
  return q;
}

// 3x3 rotation about a unit axis (Rodrigues).
inline Mat3 rodrigues(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
}

// Embeds a rotation of span{b0, b1, b2} (columns of basis) into R^4, fixing
// the orthogonal complement.
inline Mat4 embed_rotation(const Eigen::Matrix<double, 4, 3>& basis, const Mat3& r) {
  return Mat4::Identity() + basis * (r - Mat3::Identity()) * basis.transpose();
}

// Orthogonal Procrustes: the orthogonal map minimizing sum |phi a_i - b_i|^2.
inline Mat3 procrustes(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) m += b[i] * a[i].transpose();
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// Counts the non-identity orthogonal maps (about the centroid) permuting the
// point set. Enumerates every permutation, skipping branches as soon as a
// partial assignment fails to preserve a pairwise distance.
inline int brute_force_symmetry_count(std::vector<Vec3> pts, double tol = 1e-8) {
  const std::size_t n = pts.size();
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(n);
  double scale = 0.0;
  for (auto& p : pts) {
    p -= c;
    scale = std::max(scale, p.norm());
  }
  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  int count = 0;
  std::function<void(std::size_t)> extend = [&](std::size_t i) {
    if (i == n) {
      std::vector<Vec3> image(n);
      for (std::size_t k = 0; k < n; ++k) image[k] = pts[static_cast<std::size_t>(perm[k])];
      const Mat3 phi = procrustes(pts, image);
      double res = 0.0;
      for (std::size_t k = 0; k < n; ++k) res = std::max(res, (phi * pts[k] - image[k]).norm());
      if (res <= tol * scale && !phi.isIdentity(1e-9)) ++count;
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || std::abs(pts[i].norm() - pts[j].norm()) > tol * scale) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k)
        ok = std::abs((pts[i] - pts[k]).norm() - (pts[j] - pts[static_cast<std::size_t>(perm[k])]).norm()) <=
             tol * scale;
      if (!ok) continue;
      used[j] = true;
      perm[i] = static_cast<int>(j);
      extend(i + 1);
      used[j] = false;
    }
  };
  extend(0);
  return count;
}

// Points that are not in the convex hull of four others (Caratheodory).
inline std::vector<Vec3> extreme_points_3d(const std::vector<Vec3>& pts, double tol = 1e-10) {
  std::vector<Vec3> out;
  const std::size_t n = pts.size();
  for (std::size_t p = 0; p < n; ++p) {
    bool inside = false;
    for (std::size_t a = 0; a < n && !inside; ++a)
      for (std::size_t b = a + 1; b < n && !inside; ++b)
        for (std::size_t c = b + 1; c < n && !inside; ++c)
          for (std::size_t d = c + 1; d < n && !inside; ++d) {
            if (p == a || p == b || p == c || p == d) continue;
            Eigen::Matrix4d m;
            m << pts[a], pts[b], pts[c], pts[d], 1, 1, 1, 1;
            Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
            if (!lu.isInvertible()) continue;
            Eigen::Vector4d rhs;
            rhs << pts[p], 1.0;
            const Eigen::Vector4d lambda = lu.solve(rhs);
            inside = lambda.minCoeff() >= -tol;
          }
    if (!inside) out.push_back(pts[p]);
  }
  return out;
}

// Radial function of conv(points) in R^D along theta (origin interior): the
// largest c with c theta in the convex hull of some D-subset of the points.
template <int D>
double brute_force_radial(const std::vector<Eigen::Matrix<double, D, 1>>& pts,
                          const Eigen::Matrix<double, D, 1>& theta) {
  using Sq = Eigen::Matrix<double, D + 1, D + 1>;
  using Col = Eigen::Matrix<double, D + 1, 1>;
  const int n = static_cast<int>(pts.size());
  std::vector<int> idx(D);
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + D, true);
  double best = 0.0;
  do {
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (pick[static_cast<std::size_t>(i)]) idx[static_cast<std::size_t>(k++)] = i;
    // Unknowns (c, lambda_1..lambda_D): c theta - sum lambda v = 0, sum lambda = 1.
    Sq a = Sq::Zero();
    Col rhs = Col::Zero();
    a.block(0, 0, D, 1) = theta;
    for (int j = 0; j < D; ++j) {
      a.block(0, j + 1, D, 1) = -pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      a(D, j + 1) = 1.0;
    }
    rhs(D) = 1.0;
    Eigen::FullPivLU<Sq> lu(a);
    if (!lu.isInvertible()) continue;
    const Col x = lu.solve(rhs);
    bool ok = x(0) > 0.0;
    for (int j = 1; j <= D && ok; ++j) ok = x(j) >= -1e-12;
    if (ok) best = std::max(best, x(0));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Vertices (possibly redundant) of conv(pts) ∩ {x : x . w = 0}, in the
// coordinates of basis: crossings of every segment between points on
// opposite sides, plus the points on the hyperplane.
inline std::vector<Vec3> section_points(const std::vector<Vec4>& pts, const Vec4& w,
                                        const Eigen::Matrix<double, 4, 3>& basis) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double si = pts[i].dot(w);
    if (std::abs(si) < 1e-14) out.push_back(basis.transpose() * pts[i]);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double sj = pts[j].dot(w);
      if ((si < 0.0 && sj > 0.0) || (si > 0.0 && sj < 0.0)) {
        const double s = si / (si - sj);
        out.push_back(basis.transpose() * (pts[i] + s * (pts[j] - pts[i])));
      }
    }
  }
  return out;
}

// Orthonormal basis of w^perp: Gram-Schmidt, taking the coordinate axis
// with the largest remaining component each time.
inline Eigen::Matrix<double, 4, 3> perp_basis(const Vec4& w) {
  Eigen::Matrix<double, 4, 3> b;
  for (int col = 0; col < 3; ++col) {
    Vec4 best = Vec4::Zero();
    for (int i = 0; i < 4; ++i) {
      Vec4 v = Vec4::Unit(i) - Vec4::Unit(i).dot(w) * w;
      for (int c = 0; c < col; ++c) v -= v.dot(b.col(c)) * b.col(c);
      if (v.norm() > best.norm()) best = v;
    }
    b.col(col) = best.normalized();
  }
  return b;
}

}  // namespace oracle
