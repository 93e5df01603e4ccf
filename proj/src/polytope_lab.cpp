#include "congrulab/polytope_lab.hpp"

#include "congrulab/error.hpp"
#include "congrulab/hull.hpp"
#include "congrulab/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace congrulab {

double Polytope3::support(const Vec3& x) const {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) h = std::max(h, v.dot(x));
  return h;
}

namespace {

Vec4 tangent_step(const Vec4& theta, const Eigen::Matrix<double, 4, 3>& t, int dir, double step) {
  const int axis = dir / 2;
  const double sign = dir % 2 == 0 ? 1.0 : -1.0;
  return (std::cos(step) * theta + std::sin(step) * sign * t.col(axis)).normalized();
}

Vec4 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec4 v;
  do {
    for (int i = 0; i < 4; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Mat3 polar_factor(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

struct Centered {
  std::vector<Vec3> points;
  Vec3 centroid;
  double scale;
};

Centered center(const std::vector<Vec3>& pts) {
  Centered c;
  c.centroid = Vec3::Zero();
  for (const auto& p : pts) c.centroid += p;
  c.centroid /= static_cast<double>(pts.size());
  c.scale = 0.0;
  for (const auto& p : pts) {
    c.points.push_back(p - c.centroid);
    c.scale = std::max(c.scale, c.points.back().norm());
  }
  return c;
}

// Three affinely independent reference points: farthest from the centroid,
// farthest from that line, farthest from that plane.
std::array<int, 3> base_triple(const std::vector<Vec3>& a, double scale) {
  const int n = static_cast<int>(a.size());
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (a[i].norm() > a[i0].norm()) i0 = i;
  const Vec3 u0 = a[i0].normalized();
  int i1 = i0 == 0 ? 1 : 0;
  auto off_line = [&](int i) { return (a[i] - a[i].dot(u0) * u0).norm(); };
  for (int i = 0; i < n; ++i)
    if (i != i0 && off_line(i) > off_line(i1)) i1 = i;
  int i2 = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1) continue;
    const double d = std::abs(a[i0].cross(a[i1]).dot(a[i]));
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0 || !(best > 1e-10 * scale * scale * scale)) {
    throw Error(ErrorCode::DegenerateProjection, "point set is coplanar about its centroid");
  }
  return {i0, i1, i2};
}

}  // namespace

double hausdorff_distance(const Body4& k, const Body4& l, int n_sample) {
  auto gap = [&](const Vec4& theta) { return std::abs(k.support(theta) - l.support(theta)); };
  const auto sample = s3_spiral(std::max(n_sample, 16));
  std::vector<double> values(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) values[i] = gap(sample[i]);
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n_start = std::min<std::size_t>(8, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_start), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  double best = values[order[0]];
  for (std::size_t s = 0; s < n_start; ++s) {
    Vec4 theta = sample[order[s]];
    double value = values[order[s]];
    double step = 0.05;
    while (step > 1e-9) {
      const auto t = complement_basis(theta);
      bool moved = false;
      for (int dir = 0; dir < 6; ++dir) {
        const Vec4 cand = tangent_step(theta, t, dir, step);
        const double v = gap(cand);
        if (v > value) {
          theta = cand;
          value = v;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, value);
  }
  return best;
}

Body4 inscribe_polytope(const Body4& k, int v, std::uint64_t seed) {
  if (v < 5) throw Error(ErrorCode::ConfigInvalid, "inscribed polytope needs at least 5 vertices");
  std::mt19937_64 rng(seed);
  const int pool_size = std::max(40 * v, 8000);
  std::vector<Vec4> pool(static_cast<std::size_t>(pool_size));
  for (auto& p : pool) p = k.support_point(random_direction(rng));

  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(v));
  std::vector<double> dist(pool.size(), std::numeric_limits<double>::infinity());
  int next = std::uniform_int_distribution<int>(0, pool_size - 1)(rng);
  for (int c = 0; c < v; ++c) {
    chosen.push_back(next);
    int far = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      dist[i] = std::min(dist[i], (pool[i] - pool[next]).squaredNorm());
      if (dist[i] > dist[far]) far = static_cast<int>(i);
    }
    next = far;
  }

  // Lloyd iterations restricted to the pool: move each vertex to the pool
  // point nearest its cluster mean.
  std::vector<int> owner(pool.size());
  for (int iter = 0; iter < 5; ++iter) {
    parallel_for(pool.size(), [&](std::size_t i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < v; ++c) {
        const double d = (pool[i] - pool[chosen[c]]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      owner[i] = best;
    });
    std::vector<Vec4> mean(static_cast<std::size_t>(v), Vec4::Zero());
    std::vector<int> count(static_cast<std::size_t>(v), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      mean[owner[i]] += pool[i];
      ++count[owner[i]];
    }
    std::vector<double> nearest(static_cast<std::size_t>(v), std::numeric_limits<double>::infinity());
    std::vector<int> replacement(chosen);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const int c = owner[i];
      const double d = (pool[i] - mean[c] / count[c]).squaredNorm();
      if (d < nearest[c]) {
        nearest[c] = d;
        replacement[c] = static_cast<int>(i);
      }
    }
    chosen = replacement;
  }

  std::vector<Vec4> vertices;
  vertices.reserve(chosen.size());
  for (int c : chosen) vertices.push_back(pool[c]);
  return Body4::polytope(std::move(vertices));
}

RateFit fit_rate(const std::vector<int>& v, const std::vector<double>& delta) {
  if (v.size() != delta.size()) throw Error(ErrorCode::ConfigInvalid, "v and delta lengths differ");
  if (v.size() < 4) throw Error(ErrorCode::InsufficientData, "rate fit needs at least 4 (v, delta) pairs");
  const std::size_t m = v.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(delta[i] > 0.0) || v[i] <= 0) throw Error(ErrorCode::InsufficientData, "nonpositive v or delta");
    x[i] = std::log(static_cast<double>(v[i]));
    y[i] = std::log(delta[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "v values must not all coincide");
  RateFit fit;
  fit.v = v;
  fit.delta = delta;
  fit.exponent = sxy / sxx;
  fit.log_constant = my - fit.exponent * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (fit.log_constant + fit.exponent * x[i]);
    sse += r * r;
  }
  fit.stderr_exponent = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  return fit;
}

RateFit approximation_rate(const Body4& k, const std::vector<int>& v_list, std::uint64_t seed, int n_sample) {
  if (v_list.size() < 4) throw Error(ErrorCode::InsufficientData, "rate fit needs at least 4 values of v");
  std::vector<double> delta;
  for (int v : v_list) delta.push_back(hausdorff_distance(k, inscribe_polytope(k, v, seed), n_sample));
  return fit_rate(v_list, delta);
}

Basis43 random_subspace(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Basis43 m;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 4; ++r) m(r, c) = normal(rng);
  Eigen::HouseholderQR<Basis43> qr(m);
  const Mat4 q = qr.householderQ();
  return q.leftCols<3>();
}

Polytope3 project_polytope(const std::vector<Vec4>& vertices, const Basis43& basis) {
  if ((basis.transpose() * basis - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::ConfigInvalid, "subspace basis is not orthonormal");
  }
  hull::PointList<3> pts;
  pts.reserve(vertices.size());
  for (const auto& v : vertices) pts.push_back(basis.transpose() * v);
  if (pts.size() < 4 || hull::affine_rank<3>(pts) < 3) {
    throw Error(ErrorCode::DegenerateProjection, "projection is not 3-dimensional");
  }
  Polytope3 q{basis, {}};
  for (int i : hull::extreme_points<3>(pts)) q.vertices.push_back(pts[i]);
  return q;
}

Polytope3 project_polytope(const Body4& p, const Basis43& basis) {
  if (!p.is_polytope()) throw Error(ErrorCode::UnsupportedShape, "projection needs a polytope");
  return project_polytope(p.vertices(), basis);
}

std::vector<SymmetryRecord> find_congruences(const std::vector<Vec3>& from, const std::vector<Vec3>& to,
                                             double tol, bool include_identity) {
  std::vector<SymmetryRecord> out;
  if (from.size() != to.size() || from.empty()) return out;
  const Centered a = center(from);
  const Centered b = center(to);
  const double eps = tol * std::max(a.scale, b.scale);
  if (std::abs(a.scale - b.scale) > eps) return out;
  const auto [i0, i1, i2] = base_triple(a.points, a.scale);
  const int n = static_cast<int>(from.size());
  Mat3 base;
  base << a.points[i0], a.points[i1], a.points[i2];
  const Mat3 base_inv = base.inverse();
  const double d01 = (a.points[i0] - a.points[i1]).norm();
  const double d02 = (a.points[i0] - a.points[i2]).norm();
  const double d12 = (a.points[i1] - a.points[i2]).norm();
  auto close = [&](double x, double y) { return std::abs(x - y) <= eps; };

  for (int k = 0; k < n; ++k) {
    if (!close(b.points[k].norm(), a.points[i0].norm())) continue;
    for (int l = 0; l < n; ++l) {
      if (l == k || !close(b.points[l].norm(), a.points[i1].norm())) continue;
      if (!close((b.points[k] - b.points[l]).norm(), d01)) continue;
      for (int m = 0; m < n; ++m) {
        if (m == k || m == l || !close(b.points[m].norm(), a.points[i2].norm())) continue;
        if (!close((b.points[k] - b.points[m]).norm(), d02) || !close((b.points[l] - b.points[m]).norm(), d12))
          continue;
        Mat3 target;
        target << b.points[k], b.points[l], b.points[m];
        const Mat3 phi = polar_factor(target * base_inv);
        std::vector<int> perm(static_cast<std::size_t>(n), -1);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
          const Vec3 image = phi * a.points[i];
          int hit = -1;
          for (int j = 0; j < n; ++j) {
            if ((image - b.points[j]).norm() <= eps) {
              hit = j;
              break;
            }
          }
          if (hit < 0 || perm[hit] >= 0) ok = false;
          else perm[hit] = i;
        }
        if (!ok) continue;
        bool identity = (phi - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9;
        for (int i = 0; i < n && identity; ++i) identity = perm[i] == i;
        if (identity && !include_identity) continue;
        out.push_back({phi, b.centroid - phi * a.centroid, std::move(perm)});
      }
    }
  }
  return out;
}

std::vector<SymmetryRecord> detect_rigid_symmetries(const Polytope3& q, double tol) {
  if (q.vertices.size() < 4) throw Error(ErrorCode::TooFewVertices, "symmetry search needs at least 4 vertices");
  return find_congruences(q.vertices, q.vertices, tol, false);
}

double symmetry_margin(const Polytope3& q) {
  if (q.vertices.size() < 4) throw Error(ErrorCode::TooFewVertices, "symmetry search needs at least 4 vertices");
  const Centered a = center(q.vertices);
  const auto [i0, i1, i2] = base_triple(a.points, a.scale);
  Mat3 base;
  base << a.points[i0], a.points[i1], a.points[i2];
  const Mat3 base_inv = base.inverse();
  const int n = static_cast<int>(a.points.size());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        if (k == l || k == m || l == m || (k == i0 && l == i1 && m == i2)) continue;
        Mat3 target;
        target << a.points[k], a.points[l], a.points[m];
        const Mat3 phi = polar_factor(target * base_inv);
        double worst = 0.0;
        for (int i = 0; i < n && worst < best; ++i) {
          const Vec3 image = phi * a.points[i];
          double nearest = std::numeric_limits<double>::infinity();
          for (int j = 0; j < n; ++j) nearest = std::min(nearest, (image - a.points[j]).norm());
          worst = std::max(worst, nearest);
        }
        best = std::min(best, worst);
      }
  return best / a.scale;
}

nlohmann::json PerturbationResult::certificate() const {
  nlohmann::json subs = nlohmann::json::array();
  for (std::size_t s = 0; s < subspaces.size(); ++s) {
    nlohmann::json basis = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) {
      const Vec4 col = subspaces[s].col(c);
      basis.push_back({col[0], col[1], col[2], col[3]});
    }
    subs.push_back({{"basis", basis}, {"min_symmetry_residual", margins[s]}});
  }
  return {{"delta", delta}, {"epsilon_final", epsilon_final}, {"iterations", iterations}, {"subspaces", subs}};
}

namespace {

bool all_asymmetric(const std::vector<Vec4>& vertices, const std::vector<Basis43>& subspaces, double tol) {
  std::vector<char> symmetric(subspaces.size(), 0);
  parallel_for(subspaces.size(), [&](std::size_t s) {
    symmetric[s] = !detect_rigid_symmetries(project_polytope(vertices, subspaces[s]), tol).empty();
  });
  return std::none_of(symmetric.begin(), symmetric.end(), [](char c) { return c != 0; });
}

}  // namespace

PerturbationResult perturb_to_asymmetric(const std::vector<Vec4>& vertices, std::uint64_t seed,
                                         const PerturbOptions& options) {
  if (vertices.size() < 4) throw Error(ErrorCode::TooFewVertices, "polytope needs at least 4 vertices");
  std::mt19937_64 rng(seed);
  PerturbationResult result;
  for (int s = 0; s < options.h_samples; ++s) result.subspaces.push_back(random_subspace(rng));

  double diam = 0.0;
  Vec4 centroid = Vec4::Zero();
  for (const auto& v : vertices) centroid += v;
  centroid /= static_cast<double>(vertices.size());
  for (const auto& p : vertices)
    for (const auto& q : vertices) diam = std::max(diam, (p - q).norm());

  auto finish = [&](std::vector<Vec4> candidate) {
    result.vertices = std::move(candidate);
    for (const auto& h : result.subspaces) result.margins.push_back(symmetry_margin(project_polytope(result.vertices, h)));
    return result;
  };

  if (all_asymmetric(vertices, result.subspaces, options.tol)) return finish(vertices);

  const double bound = options.delta_bound * diam;
  double epsilon = 1e-2 * diam;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    std::vector<Vec4> candidate = vertices;
    for (auto& v : candidate) {
      const Vec4 radial = v - centroid;
      const double r = radial.norm();
      if (r > 0.0) v += epsilon * unit(rng) * radial / r;
    }
    // Each vertex moves by at most epsilon, so delta(P, P') <= epsilon.
    double delta = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) delta = std::max(delta, (candidate[i] - vertices[i]).norm());
    result.iterations = iter;
    result.delta = delta;
    result.epsilon_final = epsilon;
    if (delta <= bound && all_asymmetric(candidate, result.subspaces, options.tol)) return finish(std::move(candidate));
    if (delta > bound) epsilon *= 0.5;
  }
  throw Error(ErrorCode::BudgetExhausted,
              "no symmetry-free perturbation within " + std::to_string(options.max_iterations) + " iterations");
}

PerturbationResult perturb_to_asymmetric(const Body4& p, std::uint64_t seed, const PerturbOptions& options) {
  if (!p.is_polytope()) throw Error(ErrorCode::UnsupportedShape, "perturbation needs a polytope");
  return perturb_to_asymmetric(p.vertices(), seed, options);
}

}  // namespace congrulab
