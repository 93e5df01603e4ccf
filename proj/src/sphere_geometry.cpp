#include "congrulab/sphere_geometry.hpp"

#include "congrulab/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace congrulab {

Direction4::Direction4(const Vec4& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-10) {
    throw Error(ErrorCode::NotUnit, "direction norm " + std::to_string(n));
  }
  v_ = v / n;
}

Direction4 Direction4::normalize(const Vec4& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::NotUnit, "cannot normalize a zero or non-finite vector");
  }
  return Direction4(Vec4(v / n), 0);
}

Direction4 Direction4::axis(int i) {
  if (i < 0 || i > 3) throw Error(ErrorCode::IndexOutOfRange, "axis index");
  Vec4 v = Vec4::Zero();
  v[i] = 1.0;
  return Direction4(v, 0);
}

namespace {

// Gram-Schmidt of the standard basis against `span`; picks the candidate with
// the largest residual so that the result depends only on the inputs.
Vec4 best_complement(const std::vector<Vec4>& span) {
  Vec4 best = Vec4::Zero();
  double best_norm = -1.0;
  for (int i = 0; i < 4; ++i) {
    Vec4 c = Vec4::Zero();
    c[i] = 1.0;
    for (const auto& s : span) c -= c.dot(s) * s;
    // second pass for rounding
    for (const auto& s : span) c -= c.dot(s) * s;
    const double n = c.norm();
    if (n > best_norm + 1e-12) {
      best_norm = n;
      best = c / n;
    }
  }
  return best;
}

}  // namespace

SphereFrame::SphereFrame(const Direction4& zeta, const Direction4& w) : zeta_(zeta.vec()) {
  const double d = zeta.dot(w.vec());
  if (std::abs(d) > 1e-10) {
    throw Error(ErrorCode::NonOrthogonal, "frame requires w . zeta = 0, got " + std::to_string(d));
  }
  w_ = (w.vec() - d * zeta_).normalized();
  e1_ = best_complement({zeta_, w_});
  e2_ = best_complement({zeta_, w_, e1_});
  Mat4 m;
  m << e1_, e2_, w_, zeta_;
  if (m.determinant() < 0.0) e2_ = -e2_;
}

Vec4 SphereFrame::circle_point(double azimuth) const {
  return std::cos(azimuth) * e1_ + std::sin(azimuth) * e2_;
}

Vec4 SphereFrame::point(double t, double azimuth) const {
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  return s * circle_point(azimuth) + t * zeta_;
}

Eigen::Matrix<double, 4, 3> SphereFrame::hyperplane_basis() const {
  Eigen::Matrix<double, 4, 3> b;
  b << e1_, e2_, zeta_;
  return b;
}

Mat4 SphereFrame::matrix() const {
  Mat4 m;
  m << e1_, e2_, w_, zeta_;
  return m;
}

bool SphereFrame::same_as(const SphereFrame& other, double tol) const {
  return (zeta_ - other.zeta_).norm() <= tol && (w_ - other.w_).norm() <= tol &&
         (e1_ - other.e1_).norm() <= tol && (e2_ - other.e2_).norm() <= tol;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::ConfigInvalid, "gauss_legendre needs n >= 1");
  GaussLegendre gl;
  gl.nodes.assign(n, 0.0);
  gl.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // i-th root counted from +1; mirror onto the negative side
    gl.nodes[n - 1 - i] = x;
    gl.nodes[i] = -x;
    gl.weights[n - 1 - i] = w;
    gl.weights[i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

SphereGrid::SphereGrid(SphereFrame frame, int n_rings, int n_azimuth)
    : frame_(std::move(frame)), n_azimuth_(n_azimuth) {
  if (n_rings < 1) throw Error(ErrorCode::ConfigInvalid, "grid needs at least one ring");
  if (n_azimuth < 8 || n_azimuth % 2 != 0) {
    throw Error(ErrorCode::ConfigInvalid, "n_azimuth must be even and >= 8");
  }
  auto gl = gauss_legendre(n_rings);
  t_nodes_ = std::move(gl.nodes);
  t_weights_ = std::move(gl.weights);
}

SphereGrid::SphereGrid(SphereFrame frame, std::vector<double> t_nodes,
                       std::vector<double> t_weights, int n_azimuth)
    : frame_(std::move(frame)),
      t_nodes_(std::move(t_nodes)),
      t_weights_(std::move(t_weights)),
      n_azimuth_(n_azimuth) {
  if (t_nodes_.empty() || t_nodes_.size() != t_weights_.size()) {
    throw Error(ErrorCode::ConfigInvalid, "t_nodes and weights must be nonempty and equal length");
  }
  if (n_azimuth < 8 || n_azimuth % 2 != 0) {
    throw Error(ErrorCode::ConfigInvalid, "n_azimuth must be even and >= 8");
  }
  for (std::size_t i = 0; i < t_nodes_.size(); ++i) {
    if (!(t_nodes_[i] > -1.0 && t_nodes_[i] < 1.0) || !(t_weights_[i] > 0.0)) {
      throw Error(ErrorCode::ConfigInvalid, "t_nodes must lie in (-1,1) with positive weights");
    }
    if (i > 0 && !(t_nodes_[i] > t_nodes_[i - 1])) {
      throw Error(ErrorCode::ConfigInvalid, "t_nodes must be strictly increasing");
    }
  }
}

bool SphereGrid::rings_symmetric(double tol) const {
  const int n = n_rings();
  for (int i = 0; i < n; ++i) {
    if (std::abs(t_nodes_[i] + t_nodes_[n - 1 - i]) > tol) return false;
  }
  return true;
}

bool SphereGrid::same_layout(const SphereGrid& other) const {
  if (n_azimuth_ != other.n_azimuth_ || t_nodes_.size() != other.t_nodes_.size()) return false;
  if (!frame_.same_as(other.frame_)) return false;
  for (std::size_t i = 0; i < t_nodes_.size(); ++i) {
    if (std::abs(t_nodes_[i] - other.t_nodes_[i]) > 1e-14) return false;
  }
  return true;
}

Vec4 embed_parallel(const Vec4& x, double t, const Direction4& zeta) {
  if (std::abs(x.dot(zeta.vec())) > 1e-10) {
    throw Error(ErrorCode::NonOrthogonal, "embed_parallel requires x . zeta = 0");
  }
  if (std::abs(t) > 1.0) throw Error(ErrorCode::ConfigInvalid, "|t| must be <= 1");
  return std::sqrt(1.0 - t * t) * x + t * zeta.vec();
}

Vec4 grid_point(const SphereGrid& grid, int i_t, int j_az) {
  if (i_t < 0 || i_t >= grid.n_rings() || j_az < 0 || j_az >= grid.n_azimuth()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "grid index (" + std::to_string(i_t) + ", " + std::to_string(j_az) + ")");
  }
  return grid.frame().point(grid.t_nodes()[i_t], grid.azimuth(j_az));
}

std::vector<Vec4> great_circle_nodes(const SphereFrame& frame, int n) {
  if (n < 1) throw Error(ErrorCode::EmptyInput, "great_circle_nodes needs n >= 1");
  std::vector<Vec4> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) out.push_back(frame.circle_point(kTwoPi * j / n));
  return out;
}

double circle_quadrature(const std::vector<double>& f_values) {
  if (f_values.empty()) throw Error(ErrorCode::EmptyInput, "circle_quadrature of no samples");
  double sum = 0.0;
  for (double v : f_values) sum += v;
  return kTwoPi * sum / static_cast<double>(f_values.size());
}

std::vector<Vec4> s3_spiral(int n) {
  // Alexa, "Super-Fibonacci spirals", CVPR 2022.
  constexpr double phi = 1.4142135623730951;
  constexpr double psi = 1.533751168755204288118041;
  std::vector<Vec4> out;
  out.reserve(std::max(n, 0));
  for (int i = 0; i < n; ++i) {
    const double s = i + 0.5;
    const double r = std::sqrt(s / n);
    const double R = std::sqrt(1.0 - s / n);
    const double a = kTwoPi * s / phi;
    const double b = kTwoPi * s / psi;
    out.emplace_back(r * std::sin(a), r * std::cos(a), R * std::sin(b), R * std::cos(b));
    out.back().normalize();
  }
  return out;
}

Eigen::Matrix<double, 4, 3> complement_basis(const Vec4& zeta) {
  Eigen::Matrix<double, 4, 3> b;
  std::vector<Vec4> span{zeta};
  for (int k = 0; k < 3; ++k) {
    Vec4 c = best_complement(span);
    b.col(k) = c;
    span.push_back(c);
  }
  return b;
}

std::vector<Vec4> s2_fibonacci(const Direction4& zeta, int n) {
  const auto basis = complement_basis(zeta.vec());
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec4> out;
  out.reserve(std::max(n, 0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    Vec4 p = basis * Vec3(r * std::cos(a), r * std::sin(a), z);
    out.push_back(p.normalized());
  }
  return out;
}

}  // namespace congrulab
