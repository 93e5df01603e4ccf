#include "congrulab/funk_analysis.hpp"

#include "congrulab/error.hpp"
#include "congrulab/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace congrulab {

GridFunction::GridFunction(SphereGrid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.n_rings() || values_.cols() != grid_.n_azimuth()) {
    throw Error(ErrorCode::GridMismatch, "value array shape does not match the grid");
  }
  if (!values_.allFinite()) throw Error(ErrorCode::EvaluationFailure, "non-finite sample");
}

GridFunction GridFunction::reflected() const {
  const int n = grid_.n_azimuth();
  const int half = n / 2;
  Eigen::MatrixXd out(values_.rows(), n);
  out.leftCols(n - half) = values_.rightCols(n - half);
  out.rightCols(half) = values_.leftCols(half);
  return GridFunction(grid_, std::move(out));
}

GridFunction sample_on_sphere(const SphereFunction& f, const SphereGrid& grid) {
  Eigen::MatrixXd values(grid.n_rings(), grid.n_azimuth());
  const auto& frame = grid.frame();
  for (int i = 0; i < grid.n_rings(); ++i) {
    const double t = grid.t_nodes()[i];
    for (int j = 0; j < grid.n_azimuth(); ++j) values(i, j) = f(frame.point(t, grid.azimuth(j)));
  }
  return GridFunction(grid, std::move(values));
}

ParityFunctions parity_decompose(SphereFunction f, const Direction4& zeta) {
  const Vec4 z = zeta.vec();
  auto reflect = [z](const Vec4& x) -> Vec4 { return 2.0 * x.dot(z) * z - x; };
  SphereFunction even = [f, reflect](const Vec4& x) { return 0.5 * (f(x) + f(reflect(x))); };
  SphereFunction odd = [f, reflect](const Vec4& x) { return 0.5 * (f(x) - f(reflect(x))); };
  return {std::move(even), std::move(odd)};
}

ParityPair parity_decompose(const GridFunction& f) {
  const GridFunction r = f.reflected();
  return {GridFunction(f.grid(), 0.5 * (f.values() + r.values())),
          GridFunction(f.grid(), 0.5 * (f.values() - r.values()))};
}

double funk_transform(const SphereFunction& f, const Direction4& zeta, const Direction4& w, int n) {
  const SphereFrame frame(zeta, w);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (const Vec4& x : great_circle_nodes(frame, n)) values.push_back(f(x));
  return circle_quadrature(values);
}

EvenPartsReport even_parts_equal(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                 const std::vector<double>& t_nodes, const std::vector<Vec4>& w_nodes,
                                 double tol, int circle_nodes) {
  if (circle_nodes < 2 || circle_nodes % 2 != 0) {
    throw Error(ErrorCode::ConfigInvalid, "circle_nodes must be even and positive");
  }
  const Vec4 z = zeta.vec();
  std::vector<double> transform_dev(w_nodes.size(), 0.0);
  std::vector<double> direct_dev(w_nodes.size(), 0.0);
  parallel_for(w_nodes.size(), [&](std::size_t k) {
    const SphereFrame frame(zeta, Direction4::normalize(w_nodes[k]));
    const auto circle = great_circle_nodes(frame, circle_nodes);
    const int half = circle_nodes / 2;
    std::vector<double> fv(circle.size()), gv(circle.size()), diff(circle.size());
    for (double t : t_nodes) {
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (std::size_t j = 0; j < circle.size(); ++j) {
        const Vec4 theta = s * circle[j] + t * z;
        fv[j] = f(theta);
        gv[j] = g(theta);
      }
      // The node j + n/2 is O applied to node j.
      for (int j = 0; j < circle_nodes; ++j) {
        const int jr = (j + half) % circle_nodes;
        const double fe = 0.5 * (fv[j] + fv[jr]);
        const double ge = 0.5 * (gv[j] + gv[jr]);
        direct_dev[k] = std::max(direct_dev[k], std::abs(fe - ge));
        diff[j] = fv[j] - gv[j];
      }
      transform_dev[k] = std::max(transform_dev[k], std::abs(circle_quadrature(diff)));
    }
  });
  EvenPartsReport report;
  for (std::size_t k = 0; k < w_nodes.size(); ++k) {
    report.transform_deviation = std::max(report.transform_deviation, transform_dev[k]);
    report.direct_deviation = std::max(report.direct_deviation, direct_dev[k]);
  }
  report.transform_check = report.transform_deviation <= kTwoPi * tol;
  report.direct_check = report.direct_deviation <= tol;
  report.equal = report.transform_check && report.direct_check;
  return report;
}

void write_csv(std::ostream& out, const GridFunction& f) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "t,azimuth,value\n";
  const auto& grid = f.grid();
  for (int i = 0; i < grid.n_rings(); ++i) {
    for (int j = 0; j < grid.n_azimuth(); ++j) {
      out << grid.t_nodes()[i] << ',' << grid.azimuth(j) << ',' << f(i, j) << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace congrulab
