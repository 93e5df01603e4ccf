#pragma once

#include <Eigen/Core>

#include <vector>

namespace congrulab::hull {

/// Supporting half-space normal . x <= offset with unit normal.
template <int D>
struct Facet {
  Eigen::Matrix<double, D, 1> normal;
  double offset;
};

template <int D>
using PointList = std::vector<Eigen::Matrix<double, D, 1>>;

/// Dimension of the affine hull, with `tol` relative to the point spread.
template <int D>
int affine_rank(const PointList<D>& points, double tol = 1e-10);

/// All facets of conv(points) by enumeration of D-subsets. Intended for
/// point counts up to a few dozen. Requires full affine rank.
template <int D>
std::vector<Facet<D>> enumerate_facets(const PointList<D>& points, double tol = 1e-10);

/// Indices of points that are vertices of conv(points); duplicates are
/// reported once (lowest index).
template <int D>
std::vector<int> extreme_points(const PointList<D>& points, double tol = 1e-10);

}  // namespace congrulab::hull
