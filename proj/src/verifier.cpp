#include "congrulab/verifier.hpp"

#include "congrulab/body_json.hpp"
#include "congrulab/error.hpp"
#include "congrulab/parallel.hpp"
#include "congrulab/polytope_lab.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace congrulab {

void VerifierConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (!(tol > 0.0) || !std::isfinite(tol)) bad("tol must be positive");
  if (n_rings < 2 || n_rings > 4096) bad("n_rings must lie in [2, 4096]");
  if (n_azimuth < 8 || n_azimuth % 2 != 0 || n_azimuth > 65536) bad("n_azimuth must be even and in [8, 65536]");
  if (w_samples < 1) bad("w_samples must be positive");
  if (even_w_samples < 1) bad("even_w_samples must be positive");
  if (circle_nodes < 8 || circle_nodes % 2 != 0) bad("circle_nodes must be even and >= 8");
  if (certificate_samples < 16) bad("certificate_samples must be >= 16");
  if (!(zero_odd_factor >= 1.0)) bad("zero_odd_factor must be >= 1");
  if (!(snap_tol > 0.0 && snap_tol < 0.5)) bad("snap_tol must lie in (0, 0.5)");
  if (!(diameter_exclusion >= 0.0)) bad("diameter_exclusion must be nonnegative");
}

ClassifyOptions VerifierConfig::classify_options() const {
  ClassifyOptions o;
  o.n_rings = n_rings;
  o.n_azimuth = n_azimuth;
  o.snap_tol = snap_tol;
  return o;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Equal: return "Equal";
    case Outcome::OEqual: return "OEqual";
    case Outcome::Both: return "Both";
    case Outcome::ZeroOdd: return "ZeroOdd";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(const Vec4& v) {
  std::ostringstream os;
  os.precision(6);
  os << '(' << v[0] << ", " << v[1] << ", " << v[2] << ", " << v[3] << ')';
  return os.str();
}

std::vector<Vec4> fresh_sample(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec4> out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < n) {
    Vec4 v(normal(rng), normal(rng), normal(rng), normal(rng));
    if (v.norm() > 1e-9) out.push_back(v.normalized());
  }
  return out;
}

double sup_abs(const SphereFunction& f, const std::vector<Vec4>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, std::abs(f(p)));
  return s;
}

double absolute_tolerance(const SphereFunction& f, const SphereFunction& g, const VerifierConfig& config) {
  if (config.absolute_tol) return config.tol;
  const auto pts = s3_spiral(config.certificate_samples);
  const double scale = std::max(sup_abs(f, pts), sup_abs(g, pts));
  return scale > 0.0 ? config.tol * scale : config.tol;
}

VerifierConfig with_absolute(const VerifierConfig& config, double abs_tol) {
  VerifierConfig c = config;
  c.tol = abs_tol;
  c.absolute_tol = true;
  return c;
}

Vec4 reflect(const Vec4& x, const Vec4& z) { return 2.0 * x.dot(z) * z - x; }

}  // namespace

Verdict decide_functional_equation(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                   const VerifierConfig& config) {
  config.validate();
  return decide_functional_equation(f, g, zeta, s2_fibonacci(zeta, config.w_samples), config);
}

Verdict decide_functional_equation(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                   const std::vector<Vec4>& w_nodes, const VerifierConfig& config) {
  config.validate();
  if (w_nodes.empty()) throw Error(ErrorCode::ConfigInvalid, "no directions w to classify");
  const Vec4 z = zeta.vec();
  const double tol = absolute_tolerance(f, g, config);
  Verdict verdict;
  verdict.tol = tol;
  HypothesisReport& report = verdict.report;

  // Even parts: the direct comparison decides, the Funk transforms cross-check.
  const auto t_nodes = gauss_legendre(config.n_rings).nodes;
  report.even_parts =
      even_parts_equal(f, g, zeta, t_nodes, s2_fibonacci(zeta, config.even_w_samples), tol, config.circle_nodes);

  const ParityFunctions fp = parity_decompose(f, zeta);
  const ParityFunctions gp = parity_decompose(g, zeta);
  const auto spiral = s3_spiral(config.certificate_samples);
  report.odd_sup_f = sup_abs(fp.odd, spiral);
  report.odd_sup_g = sup_abs(gp.odd, spiral);

  if (!report.even_parts.equal) {
    verdict.reason = "even parts differ: direct deviation " + fmt(report.even_parts.direct_deviation) +
                     ", transform deviation " + fmt(report.even_parts.transform_deviation);
    return verdict;
  }

  const auto fresh = fresh_sample(config.certificate_samples, config.seed);
  auto certificate = [&](bool reflected) {
    double worst = 0.0;
    for (const auto& p : fresh) worst = std::max(worst, std::abs(f(p) - g(reflected ? reflect(p, z) : p)));
    return worst;
  };

  if (report.odd_sup_f <= tol && report.odd_sup_g <= tol) {
    const double cert = std::max(certificate(false), certificate(true));
    report.certificate_residual = cert;
    if (cert <= 5.0 * tol) {
      verdict.outcome = Outcome::Both;
    } else {
      verdict.reason = "odd parts vanish on the sample but the certificate residual is " + fmt(cert);
    }
    return verdict;
  }

  // Odd parts: classify every direction w.
  const ClassifyOptions options = config.classify_options();
  verdict.classifications.resize(w_nodes.size());
  parallel_for(w_nodes.size(), [&](std::size_t k) {
    const SphereFrame frame(zeta, Direction4::normalize(w_nodes[k]));
    const SphereGrid grid(frame, config.n_rings, config.n_azimuth);
    const GridFunction fo = parity_decompose(sample_on_sphere(f, grid)).odd;
    const GridFunction go = parity_decompose(sample_on_sphere(g, grid)).odd;
    verdict.classifications[k] = classify_sampled(fo, go, fp.odd, tol, options);
  });

  for (const auto& c : verdict.classifications) {
    if (c.symmetry_violation) ++report.symmetry_violations;
    if (c.collapsed) ++report.collapsed;
    switch (c.label) {
      case LabelKind::None: ++report.none; break;
      case LabelKind::Psi: ++report.psi; break;
      case LabelKind::Xi:
        if (c.ambiguous) ++report.ambiguous;
        else if (c.alpha == 0.0) ++report.xi0;
        else if (c.alpha == 1.0) ++report.xi1;
        else ++report.xi_other;
        break;
    }
  }

  if (report.none > 0) {
    verdict.reason = "no admissible rotation registers the odd parts at " + std::to_string(report.none) +
                     " of " + std::to_string(w_nodes.size()) + " directions";
    return verdict;
  }
  if (report.xi_other > 0) {
    verdict.reason = "rotation angle outside {0, pi} with a nonvanishing odd part at " +
                     std::to_string(report.xi_other) + " directions";
    return verdict;
  }
  if (report.psi > 0) {
    for (const auto& c : verdict.classifications) {
      if (c.label != LabelKind::Psi || report.psi_witnesses.size() >= 5) continue;
      const Direction4 w = Direction4::normalize(c.w);
      PsiWitness pw{c.w, c.axis_azimuth, zeta_symmetry_residual(fp.odd, w, zeta, 1.0, options), 0.0};
      const SphereFrame frame(zeta, w);
      const auto self = detect_u_pi_symmetry(fp.odd, frame, std::numeric_limits<double>::infinity(), options);
      pw.u_pi_residual = self ? self->residual : std::numeric_limits<double>::infinity();
      report.psi_witnesses.push_back(pw);
    }
    verdict.reason = "Psi nonempty at " + std::to_string(report.psi) +
                     " directions: excluded in exact arithmetic by a topological argument; the sampled data "
                     "violate the symmetry hypotheses";
    return verdict;
  }

  const double odd_sup = std::max(report.odd_sup_f, report.odd_sup_g);
  if (report.xi0 > 0 && report.xi1 == 0) {
    verdict.outcome = Outcome::Equal;
  } else if (report.xi1 > 0 && report.xi0 == 0) {
    verdict.outcome = Outcome::OEqual;
  } else if (odd_sup <= config.zero_odd_factor * tol) {
    verdict.outcome = Outcome::ZeroOdd;
  } else {
    verdict.reason = "mixed Xi(0) and Xi(1) labels with odd part of size " + fmt(odd_sup);
    return verdict;
  }

  if (verdict.outcome == Outcome::ZeroOdd) {
    report.certificate_residual = std::max(certificate(false), certificate(true));
    return verdict;
  }
  const double cert = certificate(verdict.outcome == Outcome::OEqual);
  report.certificate_residual = cert;
  if (cert > 5.0 * tol) {
    verdict.reason = std::string("certificate residual ") + fmt(cert) + " exceeds 5 tol for " +
                     to_string(verdict.outcome);
    verdict.outcome = Outcome::Inconclusive;
  }
  return verdict;
}

namespace {

DiameterSet diameters_or_fail(const Body4& body, const char* name, ErrorCode code) {
  try {
    return find_diameters(body);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateBody) throw;
    throw Error(code, std::string(name) + ": " + e.what());
  }
}

// Quasi-uniform w on S^2(zeta), skipping those whose great sphere S^2(w)
// contains a diameter direction other than zeta.
std::vector<Vec4> admissible_directions(const Direction4& zeta, const std::vector<const DiameterSet*>& sets,
                                        const VerifierConfig& config, int& excluded) {
  std::vector<Vec4> others;
  for (const auto* set : sets) {
    for (const auto& d : set->directions) {
      if (std::acos(std::min(1.0, std::abs(d.dot(zeta.vec())))) > 1e-3) others.push_back(d.vec());
    }
  }
  std::vector<Vec4> out;
  excluded = 0;
  for (const auto& w : s2_fibonacci(zeta, config.w_samples)) {
    const bool skip = std::any_of(others.begin(), others.end(),
                                  [&](const Vec4& eta) { return std::abs(w.dot(eta)) < config.diameter_exclusion; });
    if (skip) ++excluded;
    else out.push_back(w);
  }
  if (out.empty()) throw Error(ErrorCode::DiameterHypothesisFailed, "every sampled w meets another diameter");
  return out;
}

struct CongruenceScan {
  std::vector<Classification> rows;
  CongruenceReport summary;
  std::vector<char> passed;
  bool all = true;
};

CongruenceScan certify_congruence(const SphereFunction& f, const SphereFunction& g, const Direction4& zeta,
                                  const std::vector<Vec4>& w_nodes, double tol, const VerifierConfig& config) {
  CongruenceScan scan;
  scan.rows.resize(w_nodes.size());
  const ClassifyOptions options = config.classify_options();
  parallel_for(w_nodes.size(), [&](std::size_t k) {
    scan.rows[k] = classify_direction(f, g, SphereFrame(zeta, Direction4::normalize(w_nodes[k])), tol, options);
  });
  scan.summary.directions = static_cast<int>(w_nodes.size());
  for (const auto& row : scan.rows) {
    const bool ok = row.label != LabelKind::None;
    scan.passed.push_back(ok ? 1 : 0);
    scan.all = scan.all && ok;
    const double r = row.witness.residual;
    if (r > scan.summary.max_residual || scan.summary.worst_w.isZero(0.0)) {
      scan.summary.max_residual = r;
      scan.summary.worst_w = row.w;
    }
  }
  return scan;
}

[[noreturn]] void congruence_failed(const CongruenceReport& r, double tol) {
  throw Error(ErrorCode::CongruenceHypothesisFailed, "w = " + fmt(r.worst_w) + ", residual " +
                                                         fmt(r.max_residual) + " > tol " + fmt(tol));
}

}  // namespace

Verdict verify_projection_theorem(const Body4& k, const Body4& l, const Direction4& zeta,
                                  const VerifierConfig& config) {
  config.validate();
  const DiameterSet dk = diameters_or_fail(k, "K", ErrorCode::DiameterHypothesisFailed);
  const DiameterSet dl = diameters_or_fail(l, "L", ErrorCode::DiameterHypothesisFailed);
  const int ik = match_diameter(dk, zeta.vec());
  if (ik < 0) throw Error(ErrorCode::DiameterHypothesisFailed, "zeta is not a diameter direction of K");
  Vec4 z = dk.directions[ik].vec();
  if (z.dot(zeta.vec()) < 0.0) z = -z;
  const Direction4 zd = Direction4::normalize(z);
  const int il = match_diameter(dl, z);
  if (il < 0) throw Error(ErrorCode::DiameterHypothesisFailed, "zeta is not a diameter direction of L");
  const double len_tol = std::max(dk.tolerance, dl.tolerance);
  if (std::abs(dk.length - dl.length) > len_tol) {
    throw Error(ErrorCode::DiameterHypothesisFailed,
                "diameter lengths differ: " + fmt(dk.length) + " vs " + fmt(dl.length));
  }
  if (l.width(z) < dl.length - len_tol || k.width(z) < dk.length - len_tol) {
    throw Error(ErrorCode::DiameterHypothesisFailed, "width along zeta is below the diameter length");
  }

  const Vec4 shift_k = -0.5 * (dk.endpoints[ik].first + dk.endpoints[ik].second);
  const Vec4 shift_l = -0.5 * (dl.endpoints[il].first + dl.endpoints[il].second);
  const Body4 kt = k.translated(shift_k);
  const Body4 lt = l.translated(shift_l);
  const SphereFunction hk = [kt](const Vec4& x) { return kt.support(x); };
  const SphereFunction hl = [lt](const Vec4& x) { return lt.support(x); };

  DiameterReport dr;
  dr.zeta = z;
  dr.length_k = dk.length;
  dr.length_l = dl.length;
  dr.count_k = static_cast<int>(dk.directions.size());
  dr.count_l = static_cast<int>(dl.directions.size());
  dr.shift_k = shift_k;
  dr.shift_l = shift_l;
  const auto w_nodes = admissible_directions(zd, {&dk, &dl}, config, dr.excluded_w);

  const double tol = absolute_tolerance(hk, hl, config);
  const CongruenceScan scan = certify_congruence(hk, hl, zd, w_nodes, tol, config);
  if (!scan.all) congruence_failed(scan.summary, tol);

  Verdict verdict = decide_functional_equation(hk, hl, zd, w_nodes, with_absolute(config, tol));
  verdict.report.diameters = dr;
  verdict.report.congruence = scan.summary;
  const Mat4 o = 2.0 * z * z.transpose() - Mat4::Identity();
  verdict.translation = verdict.outcome == Outcome::OEqual ? Vec4(o * shift_l - shift_k) : Vec4(shift_l - shift_k);

  if (config.ground_projection && k.is_polytope() && l.is_polytope()) {
    const Basis43 ground = complement_basis(z);
    const Polytope3 qk = project_polytope(k, ground);
    const Polytope3 ql = project_polytope(l, ground);
    const auto maps = find_congruences(qk.vertices, ql.vertices);
    verdict.report.ground_congruences = static_cast<int>(maps.size());
    verdict.report.ground_proper_congruences =
        static_cast<int>(std::count_if(maps.begin(), maps.end(), [](const SymmetryRecord& r) {
          return r.phi.determinant() > 0.0;
        }));
  }
  return verdict;
}

Verdict verify_section_theorem(const Body4& k, const Body4& l, const Direction4& zeta, const VerifierConfig& config) {
  config.validate();
  if (!k.contains_origin_interior()) throw Error(ErrorCode::OriginOutside, "K does not contain the origin");
  if (!l.contains_origin_interior()) throw Error(ErrorCode::OriginOutside, "L does not contain the origin");

  const DiameterSet dk = diameters_or_fail(k, "K", ErrorCode::DiameterHypothesisFailed);
  const int ik = match_diameter(dk, zeta.vec());
  if (ik < 0) throw Error(ErrorCode::DiameterHypothesisFailed, "zeta is not a diameter direction of K");
  Vec4 z = dk.directions[ik].vec();
  if (z.dot(zeta.vec()) < 0.0) z = -z;
  const Direction4 zd = Direction4::normalize(z);
  const double chord_k = k.radial(z) + k.radial(-z);
  if (std::abs(chord_k - dk.length) > dk.tolerance) {
    throw Error(ErrorCode::DiameterHypothesisFailed,
                "the diameter of K parallel to zeta misses the origin (chord " + fmt(chord_k) + ", diameter " +
                    fmt(dk.length) + ")");
  }

  const DiameterSet dl = diameters_or_fail(l, "L", ErrorCode::CongruenceHypothesisFailed);
  const int il = match_diameter(dl, z);
  const double len_tol = std::max(dk.tolerance, dl.tolerance);
  if (il < 0) throw Error(ErrorCode::CongruenceHypothesisFailed, "L has no diameter parallel to zeta");
  if (std::abs(dk.length - dl.length) > len_tol) {
    throw Error(ErrorCode::CongruenceHypothesisFailed,
                "diameter lengths differ: " + fmt(dk.length) + " vs " + fmt(dl.length));
  }
  const double chord_l = l.radial(z) + l.radial(-z);
  if (std::abs(chord_l - dl.length) > len_tol) {
    throw Error(ErrorCode::CongruenceHypothesisFailed, "the diameter of L parallel to zeta misses the origin");
  }

  DiameterReport dr;
  dr.zeta = z;
  dr.length_k = dk.length;
  dr.length_l = dl.length;
  dr.count_k = static_cast<int>(dk.directions.size());
  dr.count_l = static_cast<int>(dl.directions.size());
  const auto w_nodes = admissible_directions(zd, {&dk, &dl}, config, dr.excluded_w);

  struct Case {
    const char* name;
    Vec4 shift;
  };
  std::vector<Case> cases{{"R1", (k.radial(z) - l.radial(z)) * z}, {"R2", (k.radial(-z) - l.radial(z)) * z}};
  if ((cases[0].shift - cases[1].shift).norm() <= len_tol) cases.pop_back();

  const SphereFunction rk = [k](const Vec4& x) { return k.radial(x); };
  std::vector<CongruenceScan> scans;
  std::vector<double> tols;
  std::vector<Body4> shifted;
  for (const auto& c : cases) {
    const Body4 lc = l.translated(c.shift);
    if (!lc.contains_origin_interior()) {
      scans.emplace_back();
      scans.back().all = false;
      tols.push_back(0.0);
      shifted.push_back(lc);
      continue;
    }
    const SphereFunction rl = [lc](const Vec4& x) { return lc.radial(x); };
    const double tol = absolute_tolerance(rk, rl, config);
    scans.push_back(certify_congruence(rk, rl, zd, w_nodes, tol, config));
    tols.push_back(tol);
    shifted.push_back(lc);
    if (scans.back().all) break;
  }

  int chosen = -1;
  for (std::size_t c = 0; c < scans.size(); ++c)
    if (scans[c].all) chosen = static_cast<int>(c);
  if (chosen < 0) {
    const bool any_valid = std::any_of(tols.begin(), tols.end(), [](double t) { return t > 0.0; });
    if (!any_valid) {
      throw Error(ErrorCode::StarShapednessLost, "aligning the diameters moves the origin out of L");
    }
    bool covered = scans.size() == 2 && !scans[0].passed.empty() && !scans[1].passed.empty();
    for (std::size_t w = 0; covered && w < w_nodes.size(); ++w) covered = scans[0].passed[w] || scans[1].passed[w];
    if (covered) {
      throw Error(ErrorCode::StarShapednessLost,
                  "congruences mix the diameter-preserving and diameter-reversing cases");
    }
    const std::size_t best = (scans.size() == 2 && tols[1] > 0.0 &&
                              (tols[0] == 0.0 || scans[1].summary.max_residual < scans[0].summary.max_residual))
                                 ? 1
                                 : 0;
    congruence_failed(scans[best].summary, tols[best]);
  }

  const Body4& lc = shifted[chosen];
  const SphereFunction rl = [lc](const Vec4& x) { return lc.radial(x); };
  Verdict verdict = decide_functional_equation(rk, rl, zd, w_nodes, with_absolute(config, tols[chosen]));
  verdict.report.diameters = dr;
  verdict.report.congruence = scans[chosen].summary;
  verdict.report.section_case = cases[chosen].name;
  // O fixes vectors parallel to zeta, so both relations use the same shift.
  verdict.translation = cases[chosen].shift;
  return verdict;
}

nlohmann::json to_json(const Verdict& verdict, const VerifierConfig& config) {
  using nlohmann::json;
  json j;
  j["outcome"] = to_string(verdict.outcome);
  if (!verdict.reason.empty()) j["reason"] = verdict.reason;
  j["translation"] = vec_to_json(verdict.translation);
  j["tol"] = verdict.tol;
  j["grid"] = {{"n_t", config.n_rings}, {"n_azimuth", config.n_azimuth}, {"w_samples", config.w_samples}};
  json rows = json::array();
  for (const auto& c : verdict.classifications) {
    const double parameter = c.label == LabelKind::Xi ? c.alpha * kPi : c.witness.parameter;
    rows.push_back({{"w", vec_to_json(c.w)},
                    {"label", c.label_string()},
                    {"parameter", parameter},
                    {"residual", c.witness.residual}});
  }
  j["classifications"] = rows;

  const HypothesisReport& r = verdict.report;
  json h;
  h["even_parts"] = {{"equal", r.even_parts.equal},
                     {"direct_deviation", r.even_parts.direct_deviation},
                     {"transform_deviation", r.even_parts.transform_deviation},
                     {"transform_check", r.even_parts.transform_check}};
  h["odd_sup"] = {r.odd_sup_f, r.odd_sup_g};
  h["labels"] = {{"xi0", r.xi0},          {"xi1", r.xi1},   {"xi_other", r.xi_other},
                 {"psi", r.psi},          {"none", r.none}, {"ambiguous", r.ambiguous},
                 {"collapsed", r.collapsed}};
  h["symmetry_violations"] = r.symmetry_violations;
  json psi = json::array();
  for (const auto& p : r.psi_witnesses) {
    psi.push_back({{"w", vec_to_json(p.w)},
                   {"axis_azimuth", p.axis_azimuth},
                   {"zeta_symmetry_residual", p.zeta_symmetry_residual},
                   {"u_pi_residual", std::isfinite(p.u_pi_residual) ? json(p.u_pi_residual) : json(nullptr)}});
  }
  h["psi_witnesses"] = psi;
  if (r.certificate_residual) h["certificate_residual"] = *r.certificate_residual;
  if (r.diameters) {
    const auto& d = *r.diameters;
    h["diameters"] = {{"zeta", vec_to_json(d.zeta)},   {"length_k", d.length_k},
                      {"length_l", d.length_l},        {"count_k", d.count_k},
                      {"count_l", d.count_l},          {"excluded_w", d.excluded_w},
                      {"shift_k", vec_to_json(d.shift_k)}, {"shift_l", vec_to_json(d.shift_l)}};
  }
  if (r.congruence) {
    h["congruence"] = {{"directions", r.congruence->directions},
                       {"max_residual", r.congruence->max_residual},
                       {"worst_w", vec_to_json(r.congruence->worst_w)}};
  }
  if (r.section_case) h["section_case"] = *r.section_case;
  if (r.ground_congruences) {
    h["ground_projection"] = {{"congruences", *r.ground_congruences},
                              {"proper", r.ground_proper_congruences.value_or(0)}};
  }
  h["tolerance_note"] = "tolerances propagate from registration to verdict by engineering choice, not by a proven bound";
  j["hypothesis_report"] = h;
  return j;
}

}  // namespace congrulab
