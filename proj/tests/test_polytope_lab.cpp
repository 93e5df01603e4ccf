#include "doctest.h"

#include "oracles.hpp"

#include "congrulab/error.hpp"
#include "congrulab/polytope_lab.hpp"

#include <Eigen/Dense>

using namespace congrulab;

namespace {

Polytope3 in_space(std::vector<Vec3> v) {
  Polytope3 q;
  q.basis = Basis43::Zero();
  q.basis.topRows<3>() = Mat3::Identity();
  q.vertices = std::move(v);
  return q;
}

std::vector<Vec3> tetrahedron() { return {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}; }

std::vector<Vec3> box(double a, double b, double c) {
  std::vector<Vec3> v;
  for (int m = 0; m < 8; ++m) v.emplace_back(m & 1 ? a : -a, m & 2 ? b : -b, m & 4 ? c : -c);
  return v;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::EmptyInput;
}

}  // namespace

TEST_CASE("rigid symmetries agree with brute-force permutation enumeration") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<std::vector<Vec3>> cases{tetrahedron(), box(1.0, 1.5, 2.0), box(1, 1, 1)};
  cases.push_back({{0, 0, 1.3}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}});  // square pyramid
  std::vector<Vec3> prism;
  for (int k = 0; k < 3; ++k)
    for (double h : {-0.7, 0.7}) prism.emplace_back(std::cos(kTwoPi * k / 3), std::sin(kTwoPi * k / 3), h);
  cases.push_back(prism);
  auto perturbed = tetrahedron();
  for (auto& p : perturbed) p += Vec3(jitter(rng), jitter(rng), jitter(rng));
  cases.push_back(perturbed);
  std::vector<Vec3> random_pts;
  for (int i = 0; i < 7; ++i) random_pts.push_back(oracle::random_unit4(rng).head<3>());
  cases.push_back(random_pts);

  const std::vector<int> expected{23, 7, 47, 7, 11, 0, 0};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    CAPTURE(c);
    const int brute = oracle::brute_force_symmetry_count(cases[c]);
    CHECK(brute == expected[c]);
    CHECK(static_cast<int>(detect_rigid_symmetries(in_space(cases[c])).size()) == brute);
  }
}

TEST_CASE("symmetry records are valid vertex permutations") {
  const Polytope3 q = in_space(box(1.0, 1.5, 2.0));
  for (const auto& s : detect_rigid_symmetries(q)) {
    CHECK((s.phi.transpose() * s.phi - Mat3::Identity()).norm() < 1e-10);
    for (std::size_t i = 0; i < q.vertices.size(); ++i) {
      const Vec3 image = s.phi * q.vertices[static_cast<std::size_t>(s.permutation[i])] + s.a;
      CHECK((image - q.vertices[i]).norm() < 1e-9);
    }
  }
  CHECK(code_of([] { detect_rigid_symmetries(in_space({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}})); }) ==
        ErrorCode::TooFewVertices);
}

TEST_CASE("find_congruences recovers a planted rigid motion") {
  std::mt19937_64 rng(2);
  std::vector<Vec3> a;
  for (int i = 0; i < 7; ++i) a.push_back(oracle::random_unit4(rng).head<3>() * 2.0);
  const Mat3 r = oracle::rodrigues(Vec3(0.2, -0.5, 1.0), 1.1);
  const Vec3 t(0.3, 0.2, -0.4);
  std::vector<Vec3> b;
  for (const auto& p : a) b.push_back(r * p + t);
  std::shuffle(b.begin(), b.end(), rng);
  const auto maps = find_congruences(a, b);
  REQUIRE(maps.size() == 1);
  CHECK((maps[0].phi - r).norm() < 1e-9);
  CHECK((maps[0].a - t).norm() < 1e-9);
}

TEST_CASE("symmetry margin vanishes exactly on symmetric sets") {
  CHECK(symmetry_margin(in_space(tetrahedron())) < 1e-12);
  std::mt19937_64 rng(3);
  std::vector<Vec3> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(oracle::random_unit4(rng).head<3>());
  CHECK(symmetry_margin(in_space(pts)) > 1e-3);
}

TEST_CASE("projections of the 4-cube") {
  Basis43 coord = Basis43::Zero();
  coord.topRows<3>() = Mat3::Identity();
  const Polytope3 q = project_polytope(Body4::hypercube(), coord);
  CHECK(q.vertices.size() == 8);
  CHECK(detect_rigid_symmetries(q).size() == 47);
  Basis43 bad = coord;
  bad(0, 1) = 0.5;
  CHECK(code_of([&] { project_polytope(Body4::hypercube(), bad); }) == ErrorCode::ConfigInvalid);
  std::mt19937_64 rng(4);
  const Basis43 b = random_subspace(rng);
  CHECK((b.transpose() * b - Mat3::Identity()).norm() < 1e-12);
  const Polytope3 generic = project_polytope(Body4::hypercube(), b);
  for (int i = 0; i < 50; ++i) {
    const Vec3 t = oracle::random_unit4(rng).head<3>().normalized();
    CHECK(generic.support(t) == doctest::Approx(Body4::hypercube().support(b * t)).epsilon(1e-12));
  }
}

TEST_CASE("fit_rate recovers an exact power law") {
  const std::vector<int> v{40, 80, 160, 320, 640};
  std::vector<double> d;
  for (int x : v) d.push_back(3.0 * std::pow(x, -2.0 / 3.0));
  const RateFit fit = fit_rate(v, d);
  CHECK(fit.exponent == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(fit.stderr_exponent < 1e-10);
  CHECK(std::exp(fit.log_constant) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(code_of([] { fit_rate({40}, {0.1}); }) == ErrorCode::InsufficientData);
}

TEST_CASE("Hausdorff distance matches closed forms") {
  CHECK(hausdorff_distance(Body4::ball(1.0), Body4::ball(1.3), 2000) == doctest::Approx(0.3).epsilon(1e-9));
  const Vec4 a(0.1, -0.2, 0.3, 0.05);
  CHECK(hausdorff_distance(Body4::ball(1.0), Body4::ball(1.0).translated(a), 2000) ==
        doctest::Approx(a.norm()).epsilon(1e-6));
  // max over the sphere of 0.1 * |theta|_1 is 0.1 * 2 at the diagonal.
  CHECK(hausdorff_distance(Body4::hypercube(1.0), Body4::hypercube(1.1), 2000) ==
        doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("inscribed polytopes lie on the boundary and improve with v") {
  const Body4 ball = Body4::ball(1.0);
  const Body4 p20 = inscribe_polytope(ball, 20, 7);
  const Body4 p80 = inscribe_polytope(ball, 80, 7);
  CHECK(p20.vertices().size() == 20);
  for (const auto& x : p80.vertices()) CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hausdorff_distance(ball, p80, 4000) < hausdorff_distance(ball, p20, 4000));
  const Body4 again = inscribe_polytope(ball, 20, 7);
  CHECK((again.vertices()[5] - p20.vertices()[5]).norm() == 0.0);
}

TEST_CASE("perturbation removes projection symmetries of the cube") {
  PerturbOptions opts;
  opts.h_samples = 10;
  const PerturbationResult r = perturb_to_asymmetric(Body4::hypercube(), 11, opts);
  CHECK(r.iterations >= 1);
  CHECK(r.delta <= opts.delta_bound * 4.0 + 1e-15);
  std::mt19937_64 rng(99);
  for (int s = 0; s < 5; ++s) {
    const Polytope3 q = project_polytope(r.vertices, random_subspace(rng));
    CHECK(detect_rigid_symmetries(q).empty());
  }
  for (const auto& h : r.subspaces) CHECK(detect_rigid_symmetries(project_polytope(r.vertices, h)).empty());
  const auto cert = r.certificate();
  CHECK(cert["subspaces"].size() == 10);

  const PerturbationResult unchanged = perturb_to_asymmetric(r.vertices, 3, opts);
  CHECK(unchanged.iterations == 0);

  PerturbOptions tight = opts;
  tight.delta_bound = 1e-15;
  tight.max_iterations = 3;
  CHECK(code_of([&] { perturb_to_asymmetric(Body4::hypercube(), 11, tight); }) == ErrorCode::BudgetExhausted);
}
