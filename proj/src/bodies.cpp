#include "congrulab/bodies.hpp"

#include "congrulab/error.hpp"
#include "congrulab/hull.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace congrulab {

struct Body4::FacetCache {
  std::once_flag once;
  std::vector<hull::Facet<4>> facets;
};

namespace {

Mat4 ellipsoid_quadratic(const EllipsoidShape& e, double power) {
  Vec4 d;
  for (int i = 0; i < 4; ++i) d[i] = std::pow(e.semiaxes[i], power);
  const Mat4& r = e.orientation.matrix();
  return r * d.asDiagonal() * r.transpose();
}

double ellipsoid_support(const EllipsoidShape& e, const Vec4& x) {
  const Vec4 y = e.orientation.matrix().transpose() * x;
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += e.semiaxes[i] * e.semiaxes[i] * y[i] * y[i];
  return std::sqrt(s);
}

Vec4 ellipsoid_support_point(const EllipsoidShape& e, const Vec4& x) {
  const Mat4& r = e.orientation.matrix();
  Vec4 y = r.transpose() * x;
  for (int i = 0; i < 4; ++i) y[i] *= e.semiaxes[i] * e.semiaxes[i];
  const double h = ellipsoid_support(e, x);
  if (!(h > 0.0)) return Vec4::Zero();
  return r * y / h;
}

double poly_value(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

double poly_derivative(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * s + static_cast<double>(k) * c[k];
  return v;
}

double zonal_support(const ZonalBumpShape& z, const Vec4& x) {
  double h = ellipsoid_support(z.base, x);
  const double r = x.norm();
  if (r == 0.0) return h;
  double bump = 0.0;
  for (const auto& term : z.terms) bump += r * poly_value(term.coefficients, x.dot(term.pole) / r);
  return h + z.epsilon * bump;
}

Vec4 zonal_gradient(const ZonalBumpShape& z, const Vec4& x) {
  Vec4 g = ellipsoid_support_point(z.base, x);
  const double r = x.norm();
  if (r == 0.0) return g;
  const Vec4 u = x / r;
  for (const auto& term : z.terms) {
    const double s = u.dot(term.pole);
    g += z.epsilon *
         (u * poly_value(term.coefficients, s) + poly_derivative(term.coefficients, s) * (term.pole - s * u));
  }
  return g;
}

// Smallest eigenvalue of the tangential Hessian of h over a sphere sample,
// by central differences of the analytic gradient.
double min_tangential_curvature(const ZonalBumpShape& z, int n_samples) {
  constexpr double step = 1e-5;
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec4& theta : s3_spiral(n_samples)) {
    Mat4 hess;
    for (int j = 0; j < 4; ++j) {
      Vec4 d = Vec4::Zero();
      d[j] = step;
      hess.col(j) = (zonal_gradient(z, theta + d) - zonal_gradient(z, theta - d)) / (2.0 * step);
    }
    const Eigen::Matrix<double, 4, 3> t = complement_basis(theta);
    const Mat3 tangential = t.transpose() * (0.5 * (hess + hess.transpose())) * t;
    Eigen::SelfAdjointEigenSolver<Mat3> es(tangential, Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues()[0]);
  }
  return worst;
}

}  // namespace

Body4 Body4::polytope(std::vector<Vec4> vertices, BodyKind kind) {
  if (vertices.size() < 5) {
    throw Error(ErrorCode::DegenerateBody, "a 4-polytope needs at least 5 vertices");
  }
  if (hull::affine_rank<4>(vertices) < 4) {
    throw Error(ErrorCode::DegenerateBody, "vertices do not affinely span R^4");
  }
  Body4 b;
  b.kind_ = kind;
  b.shape_ = std::make_shared<const Shape>(PolytopeShape{std::move(vertices)});
  b.finish();
  if (kind == BodyKind::Star && !b.contains_origin_interior()) {
    throw Error(ErrorCode::OriginOutside, "star polytope must contain the origin in its interior");
  }
  return b;
}

Body4 Body4::ellipsoid(const Vec4& semiaxes, const Orthogonal4& orientation, BodyKind kind) {
  if (!(semiaxes.minCoeff() > 0.0) || !semiaxes.allFinite()) {
    throw Error(ErrorCode::DegenerateBody, "ellipsoid semiaxes must be positive");
  }
  Body4 b;
  b.kind_ = kind;
  b.shape_ = std::make_shared<const Shape>(EllipsoidShape{semiaxes, orientation});
  b.finish();
  return b;
}

Body4 Body4::zonal_bump(const EllipsoidShape& base, double epsilon, std::vector<ZonalTerm> terms) {
  if (!(base.semiaxes.minCoeff() > 0.0)) {
    throw Error(ErrorCode::DegenerateBody, "ellipsoid semiaxes must be positive");
  }
  for (auto& term : terms) {
    const double n = term.pole.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::NotUnit, "zonal pole must be nonzero");
    term.pole /= n;
  }
  ZonalBumpShape z{base, epsilon, std::move(terms)};
  const double curvature = min_tangential_curvature(z, 2048);
  if (!(curvature > 1e-8 * base.semiaxes.maxCoeff())) {
    throw Error(ErrorCode::NonConvex,
                "perturbed support function has tangential curvature " + std::to_string(curvature));
  }
  Body4 b;
  b.kind_ = BodyKind::Convex;
  b.shape_ = std::make_shared<const Shape>(std::move(z));
  b.finish();
  return b;
}

Body4 Body4::ball(double radius) { return ellipsoid(Vec4::Constant(radius)); }

Body4 Body4::hypercube(double half) {
  std::vector<Vec4> v;
  for (int m = 0; m < 16; ++m) {
    Vec4 p;
    for (int i = 0; i < 4; ++i) p[i] = ((m >> i) & 1) ? half : -half;
    v.push_back(p);
  }
  return polytope(std::move(v));
}

void Body4::finish() {
  if (!facets_) facets_ = std::make_shared<FacetCache>();
  vertices_.clear();
  if (const auto* p = std::get_if<PolytopeShape>(shape_.get())) {
    vertices_.reserve(p->vertices.size());
    for (const auto& v : p->vertices) vertices_.push_back(linear_ * v + offset_);
  }
}

Body4 Body4::with_kind(BodyKind kind) const {
  Body4 b = *this;
  b.kind_ = kind;
  return b;
}

double Body4::support(const Vec4& theta) const {
  const Vec4 x = linear_.transpose() * theta;
  double h = 0.0;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PolytopeShape>) {
          h = -std::numeric_limits<double>::infinity();
          for (const auto& v : s.vertices) h = std::max(h, v.dot(x));
        } else if constexpr (std::is_same_v<T, EllipsoidShape>) {
          h = ellipsoid_support(s, x);
        } else {
          h = zonal_support(s, x);
        }
      },
      *shape_);
  return h + offset_.dot(theta);
}

Vec4 Body4::support_point(const Vec4& theta) const {
  const Vec4 x = linear_.transpose() * theta;
  Vec4 p = Vec4::Zero();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PolytopeShape>) {
          double best = -std::numeric_limits<double>::infinity();
          for (const auto& v : s.vertices) {
            const double d = v.dot(x);
            if (d > best) {
              best = d;
              p = v;
            }
          }
        } else if constexpr (std::is_same_v<T, EllipsoidShape>) {
          p = ellipsoid_support_point(s, x);
        } else {
          p = zonal_gradient(s, x);
        }
      },
      *shape_);
  return linear_ * p + offset_;
}

double Body4::radial(const Vec4& theta) const {
  // Ray origin and direction in shape coordinates.
  const Vec4 p0 = -(linear_.transpose() * offset_);
  const Vec4 d = linear_.transpose() * theta;
  if (const auto* poly = std::get_if<PolytopeShape>(shape_.get())) {
    std::call_once(facets_->once, [&] { facets_->facets = hull::enumerate_facets<4>(poly->vertices); });
    double c = std::numeric_limits<double>::infinity();
    for (const auto& f : facets_->facets) {
      const double slack = f.offset - f.normal.dot(p0);
      if (!(slack > 0.0)) throw Error(ErrorCode::OriginOutside, "origin is not interior");
      const double rate = f.normal.dot(d);
      if (rate > 0.0) c = std::min(c, slack / rate);
    }
    return c;
  }
  if (const auto* e = std::get_if<EllipsoidShape>(shape_.get())) {
    const Mat4 m = ellipsoid_quadratic(*e, -2.0);
    const double qa = d.dot(m * d);
    const double qb = p0.dot(m * d);
    const double qc = p0.dot(m * p0) - 1.0;
    if (!(qc < 0.0)) throw Error(ErrorCode::OriginOutside, "origin is not interior");
    return (-qb + std::sqrt(qb * qb - qa * qc)) / qa;
  }
  throw Error(ErrorCode::UnsupportedShape, "radial function of a zonal bump body");
}

bool Body4::contains_origin_interior() const {
  if (std::holds_alternative<ZonalBumpShape>(*shape_)) {
    for (const Vec4& theta : s3_spiral(4096)) {
      if (!(support(theta) > 0.0)) return false;
    }
    return true;
  }
  try {
    radial(Vec4(1.0, 0.0, 0.0, 0.0));
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OriginOutside) return false;
    throw;
  }
}

Body4 Body4::apply(const Orthogonal4& u, const Vec4& a) const {
  Body4 b = *this;
  if (!u.matrix().isIdentity(0.0)) b.chain_.emplace_back(u);
  if (!a.isZero(0.0)) b.chain_.emplace_back(a);
  b.linear_ = u.matrix() * linear_;
  b.offset_ = u.matrix() * offset_ + a;
  b.finish();
  return b;
}

double Body4::circumradius_bound() const {
  double r = 0.0;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PolytopeShape>) {
          for (const auto& v : s.vertices) r = std::max(r, v.norm());
        } else if constexpr (std::is_same_v<T, EllipsoidShape>) {
          r = s.semiaxes.maxCoeff();
        } else {
          r = s.base.semiaxes.maxCoeff();
          for (const auto& t : s.terms)
            for (double c : t.coefficients) r += std::abs(s.epsilon * c);
        }
      },
      *shape_);
  return r + offset_.norm();
}

double support(const Body4& body, const Direction4& theta) { return body.support(theta.vec()); }
double radial(const Body4& body, const Direction4& theta) { return body.radial(theta.vec()); }
double width(const Body4& body, const Direction4& theta) { return body.width(theta.vec()); }
Body4 apply(const Body4& body, const Orthogonal4& u, const Vec4& a) { return body.apply(u, a); }

namespace {

struct AscentResult {
  Vec4 direction;
  Vec4 upper;
  Vec4 lower;
  double width;
};

// theta <- normalize(x+(theta) - x-(theta)) never decreases the width.
AscentResult width_ascent(const Body4& body, Vec4 theta) {
  Vec4 upper = body.support_point(theta);
  Vec4 lower = body.support_point(-theta);
  double current = (upper - lower).dot(theta);
  for (int iter = 0; iter < 2000; ++iter) {
    const Vec4 chord = upper - lower;
    const double len = chord.norm();
    if (!(len > 0.0)) break;
    const Vec4 next = chord / len;
    if ((next - theta).norm() < 1e-14) break;
    const Vec4 next_upper = body.support_point(next);
    const Vec4 next_lower = body.support_point(-next);
    const double next_width = (next_upper - next_lower).dot(next);
    if (next_width < current) break;
    theta = next;
    upper = next_upper;
    lower = next_lower;
    current = next_width;
  }
  // At a diameter the chord is parallel to theta; report the chord itself.
  const Vec4 chord = upper - lower;
  if (chord.norm() > 0.0) theta = chord.normalized();
  return {theta, upper, lower, body.width(theta)};
}

Vec4 canonical_sign(const Vec4& v) {
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(v[i]) > std::abs(v[k]) + 1e-12) k = i;
  return v[k] < 0.0 ? Vec4(-v) : v;
}

}  // namespace

DiameterSet find_diameters(const Body4& body, double tol) {
  const auto scan = s3_spiral(8192);
  std::vector<double> widths(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) widths[i] = body.width(scan[i]);
  const auto [lo, hi] = std::minmax_element(widths.begin(), widths.end());
  const double relative = body.is_polytope() ? 1e-9 : 1e-6;
  const double eff_tol = tol > 0.0 ? tol : relative * *hi;
  if (*hi - *lo <= eff_tol) {
    throw Error(ErrorCode::DegenerateBody, "width is constant within tolerance; diameters are not isolated");
  }

  std::vector<std::size_t> order(scan.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n_seeds = std::min<std::size_t>(1024, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_seeds), order.end(),
                    [&](std::size_t a, std::size_t b) { return widths[a] > widths[b]; });

  std::vector<AscentResult> found;
  double best = 0.0;
  for (std::size_t k = 0; k < n_seeds; ++k) {
    AscentResult r = width_ascent(body, scan[order[k]]);
    best = std::max(best, r.width);
    found.push_back(r);
  }
  const double final_tol = tol > 0.0 ? tol : relative * best;

  DiameterSet set;
  set.length = best;
  set.tolerance = final_tol;
  std::sort(found.begin(), found.end(), [](const AscentResult& a, const AscentResult& b) { return a.width > b.width; });
  for (const auto& r : found) {
    if (r.width < best - final_tol) break;
    const bool duplicate = std::any_of(set.directions.begin(), set.directions.end(), [&](const Direction4& d) {
      return std::acos(std::min(1.0, std::abs(d.dot(r.direction)))) < 1e-3;
    });
    if (duplicate) continue;
    const Vec4 dir = canonical_sign(r.direction);
    const bool flipped = dir.dot(r.direction) < 0.0;
    set.directions.push_back(Direction4::normalize(dir));
    set.endpoints.emplace_back(flipped ? r.upper : r.lower, flipped ? r.lower : r.upper);
    if (set.directions.size() > 64) {
      throw Error(ErrorCode::DegenerateBody, "more than 64 diameter directions; diameter set is not isolated");
    }
  }
  return set;
}

int match_diameter(const DiameterSet& set, const Vec4& direction, double angle_tol) {
  const Vec4 u = direction.normalized();
  for (std::size_t i = 0; i < set.directions.size(); ++i) {
    if (std::acos(std::min(1.0, std::abs(set.directions[i].dot(u)))) <= angle_tol) return static_cast<int>(i);
  }
  return -1;
}

SphereFunction project_support(const Body4& body, const Direction4& w) {
  return [body, w = w.vec()](const Vec4& theta) {
    if (std::abs(theta.dot(w)) > 1e-10) {
      throw Error(ErrorCode::NonOrthogonal, "point is not on the great sphere S^2(w)");
    }
    return body.support(theta);
  };
}

SphereFunction section_radial(const Body4& body, const Direction4& w) {
  return [body, w = w.vec()](const Vec4& theta) {
    if (std::abs(theta.dot(w)) > 1e-10) {
      throw Error(ErrorCode::NonOrthogonal, "point is not on the great sphere S^2(w)");
    }
    return body.radial(theta);
  };
}

const char* to_string(BodyKind kind) { return kind == BodyKind::Convex ? "convex" : "star"; }

}  // namespace congrulab
