#pragma once

#include "congrulab/sphere_geometry.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace congrulab {

/// Samples on a SphereGrid: rows are t-rings, columns azimuth indices.
class GridFunction {
 public:
  /// Throws GridMismatch if the array shape differs from the grid,
  /// EvaluationFailure if a value is not finite.
  GridFunction(SphereGrid grid, Eigen::MatrixXd values);

  const SphereGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int i_t, int j_az) const { return values_(i_t, j_az); }
  double sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

  /// f o O on the same grid: O acts on S^2(w) as the half turn about zeta,
  /// so this is an exact shift by n_azimuth / 2.
  GridFunction reflected() const;

 private:
  SphereGrid grid_;
  Eigen::MatrixXd values_;
};

/// values[i][j] = f(grid_point(i, j)).
GridFunction sample_on_sphere(const SphereFunction& f, const SphereGrid& grid);

/// Even and odd parts with respect to O = 2 zeta zeta^T - I.
struct ParityFunctions {
  SphereFunction even;
  SphereFunction odd;
};
ParityFunctions parity_decompose(SphereFunction f, const Direction4& zeta);

struct ParityPair {
  GridFunction even;
  GridFunction odd;
};
/// Grid version; requires the grid's pole to be the reflection axis.
ParityPair parity_decompose(const GridFunction& f);

/// Integral of F over the great circle S^2(w) ∩ S^2(zeta) (arclength,
/// circumference 2 pi) by the n-point trapezoidal rule.
double funk_transform(const SphereFunction& f, const Direction4& zeta, const Direction4& w, int n);

struct EvenPartsReport {
  bool equal = false;
  bool transform_check = false;
  bool direct_check = false;
  double transform_deviation = 0.0;
  double direct_deviation = 0.0;
};

/// Compares the O-even parts of f and g in two ways over the parallels
/// S^2_t(zeta), t in t_nodes, and great circles through w in w_nodes:
/// the Funk transforms of the restrictions F_t, G_t (tolerance 2 pi tol) and
/// the even parts pointwise on the same circle nodes (tolerance tol).
EvenPartsReport even_parts_equal(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                 const std::vector<double>& t_nodes, const std::vector<Vec4>& w_nodes,
                                 double tol, int circle_nodes = 128);

/// CSV rows "t,azimuth,value" with 17 significant digits.
void write_csv(std::ostream& out, const GridFunction& f);

}  // namespace congrulab
