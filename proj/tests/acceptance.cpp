// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "oracles.hpp"

#include "congrulab/error.hpp"
#include "congrulab/funk_analysis.hpp"
#include "congrulab/polytope_lab.hpp"
#include "congrulab/registration.hpp"
#include "congrulab/verifier.hpp"

#include <chrono>
#include <cstdio>
#include <string>

using namespace congrulab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Mat4 reflection(const Vec4& z) { return 2.0 * z * z.transpose() - Mat4::Identity(); }

std::vector<Vec4> gaussian_points(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec4> v;
  for (int i = 0; i < n; ++i) v.emplace_back(g(rng), g(rng), g(rng), g(rng));
  return v;
}

// True when none of the 50 side restrictions of f (about the diameter line
// through the origin) has a half-turn symmetry about zeta or a (u, pi)
// symmetry.
bool side_restrictions_asymmetric(const SphereFunction& f, const Vec4& zeta) {
  const Direction4 z(zeta);
  ClassifyOptions opts;
  opts.n_rings = 16;
  opts.n_azimuth = 128;
  for (const auto& w : s2_fibonacci(z, 50)) {
    const Direction4 wd = Direction4::normalize(w);
    if (detect_zeta_symmetry(f, wd, z, 1.0, 1e-6, opts)) return false;
    if (detect_u_pi_symmetry(f, SphereFrame(z, wd), 1e-6, opts)) return false;
  }
  return true;
}

struct Planted {
  Body4 k;
  Vec4 zeta;
  double diam;
};

Planted planted_convex(std::mt19937_64& rng) {
  for (;;) {
    const Body4 k = Body4::polytope(gaussian_points(rng, 12));
    const DiameterSet d = find_diameters(k);
    if (d.directions.size() != 1) continue;
    const Vec4 mid = 0.5 * (d.endpoints[0].first + d.endpoints[0].second);
    const Body4 centred = k.translated(-mid);
    if (side_restrictions_asymmetric([&](const Vec4& x) { return centred.support(x); }, d.directions[0].vec()))
      return {k, d.directions[0].vec(), d.length};
  }
}

// Points near the unit sphere plus two spikes spanning a diameter through
// the origin. Redrawn until shifts of up to 10% of the diameter along it
// keep the origin inside.
Planted planted_star(std::mt19937_64& rng) {
  for (;;) {
    const Vec4 u = oracle::random_unit4(rng);
    std::vector<Vec4> v;
    for (int i = 0; i < 24; ++i) v.push_back(oracle::random_unit4(rng) * (0.8 + 0.015 * i));
    v.push_back(1.7 * u);
    v.push_back(-1.5 * u);
    const Body4 k = Body4::polytope(v, BodyKind::Star);
    const DiameterSet d = find_diameters(k);
    if (d.directions.size() != 1) continue;
    const Vec4 z = d.directions[0].vec();
    if (!k.translated(0.1 * d.length * z).contains_origin_interior() ||
        !k.translated(-0.1 * d.length * z).contains_origin_interior())
      continue;
    if (side_restrictions_asymmetric([&](const Vec4& x) { return k.radial(x); }, d.directions[0].vec()))
      return {k, d.directions[0].vec(), d.length};
  }
}

SphereFunction random_poly(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(1, 5);
  std::vector<std::tuple<double, Vec4, int>> parts;
  for (int m = 0; m < 5; ++m) parts.emplace_back(coef(rng), oracle::random_unit4(rng), deg(rng));
  parts.emplace_back(1.0, oracle::random_unit4(rng), 1);
  return [parts](const Vec4& x) {
    double s = 0.0;
    for (const auto& [a, p, d] : parts) s += a * std::pow(x.dot(p), d);
    return s;
  };
}

double circular_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

void criterion_1() {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0, slowest = 0.0;
  int correct = 0;
  for (int i = 0; i < 10; ++i) {
    const Planted p = planted_convex(rng);
    const Vec4 b(g(rng), g(rng), g(rng), g(rng));
    const auto t0 = Clock::now();
    const Verdict v = verify_projection_theorem(p.k, p.k.translated(b), Direction4(p.zeta));
    slowest = std::max(slowest, seconds_since(t0));
    if (v.outcome == Outcome::Equal) ++correct;
    worst = std::max(worst, (v.translation + b).norm() / p.diam);
  }
  report(1, "planted translation recovery", correct == 10 && worst <= 1e-6 && slowest <= 60.0,
         fmt("%.0f/10 Equal, max |b_rec - b|/diam = %.2e (<= 1e-6), max time %.1f s (<= 60 s)", correct, worst,
             slowest));
}

void criterion_2() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_p = 0.0, worst_s = 0.0, worst_par = 0.0, slowest = 0.0;
  int proj_ok = 0, sec_ok = 0;
  for (int i = 0; i < 10; ++i) {
    const Planted p = planted_convex(rng);
    const Vec4 b(g(rng), g(rng), g(rng), g(rng));
    const Mat4 o = reflection(p.zeta);
    const auto t0 = Clock::now();
    const Verdict v = verify_projection_theorem(p.k, p.k.apply(Orthogonal4(o), b), Direction4(p.zeta));
    slowest = std::max(slowest, seconds_since(t0));
    if (v.outcome == Outcome::OEqual) ++proj_ok;
    worst_p = std::max(worst_p, (v.translation + o * b).norm() / p.diam);
  }
  std::uniform_real_distribution<double> shift(-0.1, 0.1);
  for (int i = 0; i < 10; ++i) {
    const Planted p = planted_star(rng);
    const double c = shift(rng) * p.diam;
    const bool reflect = i % 2 == 1;
    const Body4 l = p.k.apply(Orthogonal4(reflect ? reflection(p.zeta) : Mat4(Mat4::Identity())), c * p.zeta);
    const auto t0 = Clock::now();
    const Verdict v = verify_section_theorem(p.k, l, Direction4(p.zeta));
    slowest = std::max(slowest, seconds_since(t0));
    if (v.outcome == (reflect ? Outcome::OEqual : Outcome::Equal)) ++sec_ok;
    worst_s = std::max(worst_s, (v.translation + c * p.zeta).norm() / p.diam);
    const Vec4 t = v.translation;
    worst_par = std::max(worst_par, (t - t.dot(p.zeta) * p.zeta).norm() / p.diam);
  }
  report(2, "planted reflection recovery and sections",
         proj_ok == 10 && sec_ok == 10 && worst_p <= 1e-6 && worst_s <= 1e-6 && worst_par <= 1e-6,
         fmt("projections %.0f/10 OEqual (max err/diam %.2e), sections %.0f/10 (max err/diam %.2e)", proj_ok,
             worst_p, sec_ok, worst_s) +
             fmt(", translation off zeta %.2e (all <= 1e-6), max time %.1f s", worst_par, slowest));
}

void criterion_3() {
  std::mt19937_64 rng(303);
  VerifierConfig cfg;
  cfg.n_rings = 16;
  cfg.n_azimuth = 64;
  cfg.w_samples = 32;
  cfg.even_w_samples = 32;
  cfg.circle_nodes = 64;
  cfg.certificate_samples = 1024;
  int mislabels = 0;
  double min_odd = 1e300;
  for (int i = 0; i < 100; ++i) {
    const Vec4 z = oracle::random_unit4(rng);
    const Mat4 o = reflection(z);
    const SphereFunction f = random_poly(rng);
    const SphereFunction fo = [&](const Vec4& x) { return f(o * x); };
    const SphereFunction fe = [&](const Vec4& x) { return f(x) + f(o * x); };
    const Direction4 zd(z);
    const Verdict a = decide_functional_equation(f, f, zd, cfg);
    const Verdict b = decide_functional_equation(f, fo, zd, cfg);
    const Verdict c = decide_functional_equation(fe, fe, zd, cfg);
    min_odd = std::min(min_odd, a.report.odd_sup_f);
    mislabels += (a.outcome != Outcome::Equal) + (b.outcome != Outcome::OEqual) + (c.outcome != Outcome::Both);
  }
  report(3, "functional-equation trichotomy", mislabels == 0,
         fmt("%.0f mislabels in 300 instances (Equal/OEqual/Both x 100), min odd sup %.2e", mislabels, min_odd));
}

void criterion_4() {
  std::mt19937_64 rng(404);
  double lin = 0.0, odd = 0.0, eig = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec4 z = oracle::random_unit4(rng);
    const Direction4 zd(z);
    const Direction4 w(oracle::random_orthogonal_to(z, rng));
    const SphereFunction f = random_poly(rng), g = random_poly(rng);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const double a = coef(rng), b = coef(rng);
    const double lhs = funk_transform([&](const Vec4& x) { return a * f(x) + b * g(x); }, zd, w, 128);
    lin = std::max(lin, std::abs(lhs - a * funk_transform(f, zd, w, 128) - b * funk_transform(g, zd, w, 128)));
    const SphereFunction fodd = [&](const Vec4& x) { return f(x) - f(-x); };
    odd = std::max(odd, std::abs(funk_transform(fodd, zd, w, 128)));
  }
  for (int n = 0; n <= 16; ++n) {
    for (int i = 0; i < 10; ++i) {
      const Vec4 z = oracle::random_unit4(rng);
      const Vec4 pole = oracle::random_orthogonal_to(z, rng);
      const Vec4 w = oracle::random_orthogonal_to(z, rng);
      const SphereFunction f = [&](const Vec4& x) { return oracle::legendre(n, x.dot(pole)); };
      const double expect = kTwoPi * oracle::legendre(n, 0.0) * oracle::legendre(n, w.dot(pole));
      eig = std::max(eig, std::abs(funk_transform(f, Direction4(z), Direction4(w), 128) - expect));
    }
  }
  report(4, "Funk-transform identities", lin <= 1e-12 && odd <= 1e-10 && eig <= 1e-8,
         fmt("linearity %.2e (<= 1e-12), odd annihilation %.2e (<= 1e-10), 2 pi P_n(0) eigenfactor n<=16 %.2e "
             "(<= 1e-8)",
             lin, odd, eig));
}

void criterion_5() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  double coarse = 0.0, refined = 0.0, resid = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec4 z = oracle::random_unit4(rng);
    const SphereFrame frame{Direction4(z), Direction4(oracle::random_orthogonal_to(z, rng))};
    const SphereFunction f = random_poly(rng);
    const bool flip = i % 2 == 1;
    const double param = flip ? ang(rng) / 2.0 : ang(rng);
    const AxisRotation phi{frame, flip ? RotationFamily::FlipZeta : RotationFamily::FixZeta, param};
    const Mat4 m = phi.matrix().matrix();
    const SphereGrid grid(frame, 16, 256);
    const GridFunction fg = sample_on_sphere(f, grid);
    const GridFunction gg = sample_on_sphere([&](const Vec4& x) { return f(m * x); }, grid);
    const RotationWitness w = flip ? register_flip_zeta(fg, gg) : register_fix_zeta(fg, gg);
    const double period = flip ? kPi : kTwoPi;
    coarse = std::max(coarse, circular_gap(w.coarse_parameter, param, period));
    refined = std::max(refined, circular_gap(w.parameter, param, period));
    resid = std::max(resid, w.residual);
  }
  report(5, "registration recovery", coarse <= kTwoPi / 256 && refined <= 1e-3 && resid <= 1e-8,
         fmt("1000 instances: coarse error %.2e (<= %.2e), refined %.2e (<= 1e-3), residual %.2e (<= 1e-8)", coarse,
             kTwoPi / 256, refined, resid));
}

void criterion_6() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec4 z = oracle::random_unit4(rng);
    const SphereFrame frame{Direction4(z), Direction4(oracle::random_orthogonal_to(z, rng))};
    const double a = ang(rng), beta = ang(rng);
    const Orthogonal4 prod =
        compose(pi_rotation_about(frame, a + beta).matrix(), pi_rotation_about(frame, a).matrix());
    const Mat4 oracle_m =
        oracle::embed_rotation(frame.hyperplane_basis(), oracle::rodrigues(Vec3(0, 0, 1), 2.0 * beta));
    const Mat4 library_m = rotation_fixing_zeta(frame, 2.0 * beta / kPi).matrix().matrix();
    worst = std::max({worst, (prod.matrix() - oracle_m).cwiseAbs().maxCoeff(),
                      (prod.matrix() - library_m).cwiseAbs().maxCoeff()});
  }
  report(6, "rotation algebra", worst <= 1e-10,
         fmt("two half turns at angle beta vs rotation by 2 beta, 100 beta: max entry error %.2e (<= 1e-10)", worst));
}

void criterion_7() {
  auto in_space = [](std::vector<Vec3> v) {
    Polytope3 q;
    q.basis = Basis43::Zero();
    q.basis.topRows<3>() = Mat3::Identity();
    q.vertices = std::move(v);
    return q;
  };
  std::vector<Vec3> tet{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  auto box = [](double a, double b, double c) {
    std::vector<Vec3> v;
    for (int m = 0; m < 8; ++m) v.emplace_back(m & 1 ? a : -a, m & 2 ? b : -b, m & 4 ? c : -c);
    return v;
  };
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  auto perturbed = tet;
  for (auto& p : perturbed) p += Vec3(jitter(rng), jitter(rng), jitter(rng));
  std::vector<Vec3> pyramid{{0, 0, 1.3}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  std::vector<Vec3> random_pts;
  for (int i = 0; i < 8; ++i) random_pts.push_back(oracle::random_unit4(rng).head<3>());

  struct Case {
    const char* name;
    std::vector<Vec3> pts;
    int expected;
  };
  const std::vector<Case> cases{{"tetrahedron", tet, 23},       {"box", box(1.0, 1.5, 2.0), 7},
                                {"perturbed tetrahedron", perturbed, 0}, {"cube", box(1, 1, 1), 47},
                                {"square pyramid", pyramid, 7},  {"random 8 points", random_pts, 0}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const int brute = oracle::brute_force_symmetry_count(c.pts);
    const int lib = static_cast<int>(detect_rigid_symmetries(in_space(c.pts)).size());
    ok = ok && brute == lib && lib == c.expected;
    detail += std::string(detail.empty() ? "" : ", ") + c.name + " " + std::to_string(lib) + "/" +
              std::to_string(brute);
  }
  report(7, "symmetry-oracle agreement", ok, "library/brute force: " + detail);
}

void criterion_8() {
  const auto t0 = Clock::now();
  const Body4 ball = Body4::ball(1.0);
  const RateFit fit = approximation_rate(ball, {40, 80, 160, 320, 640}, 1);
  const double elapsed = seconds_since(t0);
  // Dense independent estimate of delta for the coarsest polytope.
  const Body4 p40 = inscribe_polytope(ball, 40, 1);
  std::mt19937_64 rng(808);
  double dense = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const Vec4 t = oracle::random_unit4(rng);
    double h = -1e300;
    for (const auto& v : p40.vertices()) h = std::max(h, v.dot(t));
    dense = std::max(dense, 1.0 - h);
  }
  const double target = -2.0 / 3.0;
  const bool ok = std::abs(fit.exponent - target) <= 0.15 && elapsed <= 300.0 && fit.delta[0] >= dense * (1 - 1e-9) &&
                  fit.delta[0] <= dense * 1.05;
  report(8, "ball approximation rate", ok,
         fmt("exponent %.4f +- %.4f (target -0.6667 +- 0.15), delta(40) %.4e vs dense sample %.4e", fit.exponent,
             fit.stderr_exponent, fit.delta[0], dense) +
             fmt(", %.1f s (<= 300 s)", elapsed));
}

void criterion_9() {
  std::mt19937_64 rng(909);
  std::vector<std::vector<Vec4>> polys;
  std::vector<Body4> bodies;
  for (int i = 0; i < 5; ++i) {
    auto v = gaussian_points(rng, 8);
    Vec4 c = Vec4::Zero();
    for (const auto& x : v) c += x / 8.0;
    for (auto& x : v) x -= c;
    polys.push_back(v);
    bodies.push_back(Body4::polytope(v));
  }
  struct Ell {
    Mat4 m;
    Vec4 a;
  };
  std::vector<Ell> ells;
  std::uniform_real_distribution<double> axis(0.6, 2.0), off(-0.2, 0.2);
  for (int i = 0; i < 5; ++i) {
    const Vec4 ax(axis(rng), axis(rng), axis(rng), axis(rng));
    const Mat4 r = oracle::random_orthogonal(rng);
    const Vec4 a(off(rng), off(rng), off(rng), off(rng));
    ells.push_back({r * ax.cwiseAbs2().asDiagonal() * r.transpose(), a});
    bodies.push_back(Body4::ellipsoid(ax, Orthogonal4(r)).translated(a));
  }
  double worst_h = 0.0, worst_r = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t which = static_cast<std::size_t>(trial) % bodies.size();
    const Vec4 w = oracle::random_unit4(rng);
    const auto basis = oracle::perp_basis(w);
    const Vec3 t3 = oracle::random_unit4(rng).head<3>().normalized();
    const Vec4 t = basis * t3;
    const double h_lib = project_support(bodies[which], Direction4(w))(t);
    const double r_lib = section_radial(bodies[which], Direction4(w))(t);
    double h_ref, r_ref;
    if (which < polys.size()) {
      h_ref = -1e300;
      for (const auto& x : polys[which]) h_ref = std::max(h_ref, (basis.transpose() * x).dot(t3));
      r_ref = oracle::brute_force_radial<3>(oracle::section_points(polys[which], w, basis), t3);
    } else {
      const Ell& e = ells[which - polys.size()];
      const Mat3 q = basis.transpose() * e.m * basis;
      h_ref = std::sqrt(t3.dot(q * t3)) + (basis.transpose() * e.a).dot(t3);
      // Section: (B s - a)^T M^-1 (B s - a) <= 1, along s = c t3.
      const Mat4 minv = e.m.inverse();
      const Mat3 qs = basis.transpose() * minv * basis;
      const Vec3 lin = basis.transpose() * (minv * e.a);
      const double qa = t3.dot(qs * t3), qb = -2.0 * t3.dot(lin), qc = e.a.dot(minv * e.a) - 1.0;
      r_ref = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
    }
    worst_h = std::max(worst_h, std::abs(h_lib - h_ref));
    worst_r = std::max(worst_r, std::abs(r_lib - r_ref));
  }
  report(9, "restriction identities", worst_h <= 1e-10 && worst_r <= 1e-10,
         fmt("10^4 (body, w, theta) triples: support %.2e, radial %.2e (<= 1e-10)", worst_h, worst_r));
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                         criterion_6, criterion_7, criterion_8, criterion_9};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
