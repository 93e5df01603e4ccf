#include "congrulab/hull.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace congrulab::hull {

namespace {

template <int D>
double spread(const PointList<D>& points) {
  Eigen::Matrix<double, D, 1> c = Eigen::Matrix<double, D, 1>::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  double s = 0.0;
  for (const auto& p : points) s = std::max(s, (p - c).norm());
  return s;
}

// Generalized cross product of the D-1 rows of `a`.
template <int D>
Eigen::Matrix<double, D, 1> orthogonal_vector(const Eigen::Matrix<double, D - 1, D>& a) {
  Eigen::Matrix<double, D, 1> n;
  for (int k = 0; k < D; ++k) {
    Eigen::Matrix<double, D - 1, D - 1> minor;
    for (int c = 0, cc = 0; c < D; ++c) {
      if (c == k) continue;
      minor.col(cc++) = a.col(c);
    }
    n[k] = ((k % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
  }
  return n;
}

template <int D>
void for_each_subset(int n, auto&& fn) {
  std::array<int, D> idx{};
  for (int i = 0; i < D; ++i) idx[i] = i;
  if (n < D) return;
  while (true) {
    fn(idx);
    int k = D - 1;
    while (k >= 0 && idx[k] == n - D + k) --k;
    if (k < 0) return;
    ++idx[k];
    for (int j = k + 1; j < D; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

template <int D>
int affine_rank(const PointList<D>& points, double tol) {
  if (points.empty()) return -1;
  const double s = spread(points);
  if (s == 0.0) return 0;
  Eigen::MatrixXd m(D, static_cast<Eigen::Index>(points.size()) - 1);
  for (std::size_t i = 1; i < points.size(); ++i) m.col(static_cast<Eigen::Index>(i) - 1) = points[i] - points[0];
  if (m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * s * std::sqrt(static_cast<double>(points.size()))) ++r;
  return r;
}

template <int D>
std::vector<Facet<D>> enumerate_facets(const PointList<D>& points, double tol) {
  std::vector<Facet<D>> facets;
  const int n = static_cast<int>(points.size());
  const double s = spread(points);
  if (n <= D || s == 0.0) return facets;
  const double eps = tol * s;
  for_each_subset<D>(n, [&](const std::array<int, D>& idx) {
    Eigen::Matrix<double, D - 1, D> a;
    for (int r = 1; r < D; ++r) a.row(r - 1) = (points[idx[r]] - points[idx[0]]).transpose();
    Eigen::Matrix<double, D, 1> normal = orthogonal_vector<D>(a);
    const double len = normal.norm();
    if (!(len > eps * std::pow(s, D - 2) * 1e-2)) return;
    normal /= len;
    double offset = normal.dot(points[idx[0]]);
    bool above = false, below = false;
    for (const auto& p : points) {
      const double d = normal.dot(p) - offset;
      if (d > eps) above = true;
      if (d < -eps) below = true;
      if (above && below) return;
    }
    if (above) {
      normal = -normal;
      offset = -offset;
    }
    for (const auto& f : facets) {
      if (f.normal.dot(normal) > 1.0 - 1e-9 && std::abs(f.offset - offset) <= eps) return;
    }
    facets.push_back({normal, offset});
  });
  return facets;
}

template <int D>
std::vector<int> extreme_points(const PointList<D>& points, double tol) {
  const auto facets = enumerate_facets<D>(points, tol);
  const double eps = tol * spread(points);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    bool duplicate = false;
    for (int k : out) {
      if ((points[k] - points[i]).norm() <= eps) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    Eigen::MatrixXd normals(D, 0);
    for (const auto& f : facets) {
      if (std::abs(f.normal.dot(points[i]) - f.offset) <= eps) {
        normals.conservativeResize(Eigen::NoChange, normals.cols() + 1);
        normals.col(normals.cols() - 1) = f.normal;
      }
    }
    if (normals.cols() < D) continue;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normals);
    lu.setThreshold(1e-9);
    if (lu.rank() == D) out.push_back(i);
  }
  return out;
}

template int affine_rank<3>(const PointList<3>&, double);
template int affine_rank<4>(const PointList<4>&, double);
template std::vector<Facet<3>> enumerate_facets<3>(const PointList<3>&, double);
template std::vector<Facet<4>> enumerate_facets<4>(const PointList<4>&, double);
template std::vector<int> extreme_points<3>(const PointList<3>&, double);
template std::vector<int> extreme_points<4>(const PointList<4>&, double);

}  // namespace congrulab::hull
