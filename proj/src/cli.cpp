#include "congrulab/cli.hpp"

#include "congrulab/body_json.hpp"
#include "congrulab/error.hpp"
#include "congrulab/polytope_lab.hpp"
#include "congrulab/verifier.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace congrulab {

namespace {

using nlohmann::json;

struct RunConfig {
  double tol = 1e-6;
  int grid_t = SphereGrid::kDefaultRings;
  int grid_az = SphereGrid::kDefaultAzimuth;
  int w_samples = 200;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParsedBody load_body(const std::string& path, std::ostream& err) {
  ParsedBody parsed = parse_body(read_file(path));
  for (const auto& w : parsed.warnings) err << "warning: " << path << ": " << w << '\n';
  return parsed;
}

void emit(const RunConfig& rc, std::ostream& out, const std::string& text) {
  if (rc.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(rc.out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + rc.out_path);
  file << text;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json matrix_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

json basis_json(const Basis43& b) {
  json cols = json::array();
  for (int c = 0; c < 3; ++c) cols.push_back(vec_to_json(b.col(c)));
  return cols;
}

Direction4 parse_zeta(const std::vector<double>& z) {
  if (z.size() != 4) throw UsageError("--zeta needs 4 components");
  const Vec4 v(z[0], z[1], z[2], z[3]);
  if (!(v.norm() > 0.0)) throw UsageError("--zeta must be nonzero");
  return Direction4::normalize(v);
}

VerifierConfig verifier_config(const RunConfig& rc) {
  VerifierConfig c;
  c.tol = rc.tol;
  c.n_rings = rc.grid_t;
  c.n_azimuth = rc.grid_az;
  c.w_samples = rc.w_samples;
  c.seed = rc.seed;
  return c;
}

int cmd_gen_body(const RunConfig& rc, const std::string& path, std::ostream& out, std::ostream& err) {
  const ParsedBody parsed = load_body(path, err);
  emit(rc, out, canonical_json(parsed.body).dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const RunConfig& rc, const std::string& mode, const std::string& k_path, const std::string& l_path,
               const std::vector<double>& zeta, bool ground, std::ostream& out, std::ostream& err) {
  const Body4 k = load_body(k_path, err).body;
  const Body4 l = load_body(l_path, err).body;
  VerifierConfig config = verifier_config(rc);
  config.ground_projection = ground;
  const Direction4 z = parse_zeta(zeta);
  const Verdict verdict = mode == "projections" ? verify_projection_theorem(k, l, z, config)
                                                : verify_section_theorem(k, l, z, config);
  emit(rc, out, to_json(verdict, config).dump(2) + "\n");
  switch (verdict.outcome) {
    case Outcome::Equal:
    case Outcome::OEqual:
    case Outcome::Both: return kExitOk;
    default: return kExitInconclusive;
  }
}

int cmd_symmetry(const RunConfig& rc, const std::string& path, const std::vector<double>& subspace, int sample,
                 std::ostream& out, std::ostream& err) {
  const Body4 body = load_body(path, err).body;
  if (!body.is_polytope()) throw Error(ErrorCode::UnsupportedShape, "symmetry needs a polytope");
  std::vector<Basis43> bases;
  if (!subspace.empty()) {
    if (subspace.size() != 12) throw UsageError("--subspace needs 12 numbers (three basis vectors)");
    Basis43 b;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 4; ++r) b(r, c) = subspace[static_cast<std::size_t>(4 * c + r)];
    bases.push_back(b);
  } else {
    std::mt19937_64 rng(rc.seed);
    for (int i = 0; i < sample; ++i) bases.push_back(random_subspace(rng));
  }
  json rows = json::array();
  int asymmetric = 0;
  for (const auto& b : bases) {
    const Polytope3 q = project_polytope(body, b);
    const auto syms = detect_rigid_symmetries(q, rc.tol);
    if (syms.empty()) ++asymmetric;
    json list = json::array();
    for (const auto& s : syms) {
      list.push_back({{"phi", matrix_json(s.phi)},
                      {"a", {s.a[0], s.a[1], s.a[2]}},
                      {"permutation", s.permutation}});
    }
    rows.push_back({{"basis", basis_json(b)},
                    {"vertices", q.vertices.size()},
                    {"symmetry_count", syms.size()},
                    {"symmetries", list}});
  }
  const std::string summary = "asymmetric on " + std::to_string(asymmetric) + "/" + std::to_string(bases.size()) +
                              " sampled subspaces";
  emit(rc, out, json{{"subspaces", rows}, {"summary", summary}}.dump(2) + "\n");
  err << summary << '\n';
  return kExitOk;
}

int cmd_rate(const RunConfig& rc, const std::string& path, const std::vector<int>& v_list, int n_sample,
             std::ostream& out, std::ostream& err) {
  const Body4 body = load_body(path, err).body;
  const RateFit fit = approximation_rate(body, v_list, rc.seed, n_sample);
  const json summary{{"exponent", fit.exponent}, {"stderr", fit.stderr_exponent}};
  if (rc.format == "csv") {
    std::string csv = "v,delta\n";
    for (std::size_t i = 0; i < fit.v.size(); ++i)
      csv += std::to_string(fit.v[i]) + "," + csv_number(fit.delta[i]) + "\n";
    emit(rc, out, csv);
    err << summary.dump() << '\n';
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < fit.v.size(); ++i) rows.push_back({{"v", fit.v[i]}, {"delta", fit.delta[i]}});
    emit(rc, out, json{{"rows", rows}, {"exponent", fit.exponent}, {"stderr", fit.stderr_exponent}}.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_perturb(const RunConfig& rc, const std::string& path, int h_samples, int max_iterations, std::ostream& out,
                std::ostream& err) {
  const Body4 body = load_body(path, err).body;
  PerturbOptions options;
  options.h_samples = h_samples;
  options.max_iterations = max_iterations;
  const PerturbationResult result = perturb_to_asymmetric(body, rc.seed, options);
  const Body4 perturbed = Body4::polytope(result.vertices, body.kind());
  emit(rc, out,
       json{{"body", canonical_json(perturbed)}, {"iterations", result.iterations},
            {"certificate", result.certificate()}}
               .dump(2) +
           "\n");
  return kExitOk;
}

// Support or radial values of the body restricted to S^2(w) on the product
// grid, or of the whole body on a spiral sample of S^3 when w is absent.
int cmd_export(const RunConfig& rc, const std::string& path, const std::string& function,
               const std::vector<double>& w, const std::vector<double>& zeta, int n, std::ostream& out,
               std::ostream& err) {
  const Body4 body = load_body(path, err).body;
  std::function<double(const Vec4&)> value;
  if (function == "support") value = [&](const Vec4& x) { return body.support(x); };
  else if (function == "radial") value = [&](const Vec4& x) { return body.radial(x); };
  else value = [&](const Vec4& x) { return body.width(x); };

  std::vector<Vec4> points;
  std::vector<std::pair<double, double>> coords;
  if (!w.empty()) {
    const SphereFrame frame(parse_zeta(zeta), parse_zeta(w));
    const SphereGrid grid(frame, rc.grid_t, rc.grid_az);
    for (int i = 0; i < grid.n_rings(); ++i) {
      for (int j = 0; j < grid.n_azimuth(); ++j) {
        points.push_back(grid_point(grid, i, j));
        coords.emplace_back(grid.t_nodes()[static_cast<std::size_t>(i)], grid.azimuth(j));
      }
    }
  } else {
    points = s3_spiral(n);
  }

  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = value(points[i]);

  if (rc.format == "csv") {
    std::string csv = coords.empty() ? "x0,x1,x2,x3,value\n" : "t,azimuth,x0,x1,x2,x3,value\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!coords.empty()) csv += csv_number(coords[i].first) + "," + csv_number(coords[i].second) + ",";
      for (int c = 0; c < 4; ++c) csv += csv_number(points[i][c]) + ",";
      csv += csv_number(values[i]) + "\n";
    }
    emit(rc, out, csv);
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) rows.push_back({{"x", vec_to_json(points[i])}, {"value", values[i]}});
    emit(rc, out, json{{"function", function}, {"samples", rows}}.dump(2) + "\n");
  }
  return kExitOk;
}

int error_exit(ErrorCode code) {
  switch (code) {
    case ErrorCode::DiameterHypothesisFailed:
    case ErrorCode::CongruenceHypothesisFailed:
    case ErrorCode::StarShapednessLost: return kExitHypothesis;
    default: return kExitInternal;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric tomography toolkit for bodies in R^4", "congrulab"};
  app.require_subcommand(1);
  RunConfig rc;
  auto add_common = [&rc](CLI::App* sub) {
    sub->add_option("--tol", rc.tol, "Tolerance (relative to the data scale)")->check(CLI::PositiveNumber);
    sub->add_option("--grid-t", rc.grid_t, "Rings of the S^2(w) grid")->check(CLI::Range(2, 4096));
    sub->add_option("--grid-az", rc.grid_az, "Azimuth samples per ring (even)")->check(CLI::Range(8, 65536));
    sub->add_option("--w-samples", rc.w_samples, "Directions w on S^2(zeta)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", rc.seed, "Random seed");
    sub->add_option("--out", rc.out_path, "Output file (default stdout)");
    sub->add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  std::string spec_path;
  auto* gen = app.add_subcommand("gen-body", "Canonicalize a body spec");
  gen->add_option("spec", spec_path, "Body spec JSON")->required();
  add_common(gen);

  std::string mode, k_path, l_path;
  std::vector<double> zeta;
  bool ground = false;
  auto* verify = app.add_subcommand("verify", "Verify the projection or section congruence theorem");
  verify->add_option("mode", mode, "projections | sections")->required()->check(CLI::IsMember({"projections", "sections"}));
  verify->add_option("K", k_path, "Body K")->required();
  verify->add_option("L", l_path, "Body L")->required();
  verify->add_option("--zeta", zeta, "Diameter direction (4 numbers)")->required()->delimiter(',')->expected(4);
  verify->add_flag("--ground", ground, "Also match the ground projections (polytopes)");
  add_common(verify);

  std::string sym_path;
  std::vector<double> subspace;
  int sample = 0;
  auto* sym = app.add_subcommand("symmetry", "Rigid motion symmetries of 3-dimensional projections");
  sym->add_option("body", sym_path, "Polytope body")->required();
  auto* sub_opt = sym->add_option("--subspace", subspace, "Basis of the subspace (12 numbers)")->delimiter(',')->expected(12);
  auto* sample_opt = sym->add_option("--sample", sample, "Number of random subspaces")->check(CLI::PositiveNumber);
  sub_opt->excludes(sample_opt);
  add_common(sym);

  std::string rate_path;
  std::vector<int> v_list{40, 80, 160, 320, 640};
  int n_sample = 20000;
  auto* rate = app.add_subcommand("rate", "Approximation rate of inscribed polytopes");
  rate->add_option("body", rate_path, "Smooth body")->required();
  rate->add_option("--v", v_list, "Vertex counts")->delimiter(',');
  rate->add_option("--h-samples", n_sample, "Directions for the Hausdorff distance")->check(CLI::Range(100, 10000000));
  add_common(rate);

  std::string perturb_path;
  int h_samples = 50;
  int max_iterations = 20;
  auto* perturb = app.add_subcommand("perturb", "Perturb a polytope until its projections are asymmetric");
  perturb->add_option("body", perturb_path, "Polytope body")->required();
  perturb->add_option("--subspaces", h_samples, "Sampled subspaces")->check(CLI::PositiveNumber);
  perturb->add_option("--max-iterations", max_iterations, "Halving budget")->check(CLI::PositiveNumber);
  add_common(perturb);

  std::string export_path, function = "support";
  std::vector<double> w_dir, export_zeta{0, 0, 0, 1};
  int n_points = 4096;
  auto* exp = app.add_subcommand("export", "Sample support, radial or width values");
  exp->add_option("body", export_path, "Body")->required();
  exp->add_option("--function", function, "support | radial | width")
      ->check(CLI::IsMember({"support", "radial", "width"}));
  exp->add_option("--w", w_dir, "Restrict to the great sphere S^2(w) (4 numbers)")->delimiter(',')->expected(4);
  exp->add_option("--zeta", export_zeta, "Pole of the S^2(w) grid (4 numbers)")->delimiter(',')->expected(4);
  exp->add_option("--n", n_points, "Points on S^3 when --w is absent")->check(CLI::PositiveNumber);
  add_common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rc.grid_az % 2 != 0) throw UsageError("--grid-az must be even");
    if (*gen) return cmd_gen_body(rc, spec_path, out, err);
    if (*verify) return cmd_verify(rc, mode, k_path, l_path, zeta, ground, out, err);
    if (*sym) {
      if (subspace.empty() && sample <= 0) throw UsageError("symmetry needs --subspace or --sample N with N > 0");
      return cmd_symmetry(rc, sym_path, subspace, sample, out, err);
    }
    if (*rate) {
      if (rc.format == "json" && rate->count("--format") == 0) rc.format = "csv";
      return cmd_rate(rc, rate_path, v_list, n_sample, out, err);
    }
    if (*perturb) return cmd_perturb(rc, perturb_path, h_samples, max_iterations, out, err);
    if (*exp) return cmd_export(rc, export_path, function, w_dir, export_zeta, n_points, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    out << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump(2) << '\n';
    err << e.what() << '\n';
    return error_exit(e.code());
  } catch (const std::exception& e) {
    out << json{{"error", "Internal"}, {"message", e.what()}}.dump(2) << '\n';
    err << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace congrulab
