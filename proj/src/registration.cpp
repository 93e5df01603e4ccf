#include "congrulab/registration.hpp"

#include "congrulab/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace congrulab {

namespace {

using Complex = std::complex<double>;

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan r2c(int n) { return get(n, true); }
  fftw_plan c2r(int n) { return get(n, false); }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  fftw_plan get(int n, bool forward) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<Complex> spec(static_cast<std::size_t>(n / 2 + 1));
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(n, real.data(), cplx, flags)
                             : fftw_plan_dft_c2r_1d(n, cplx, real.data(), flags);
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

// Rows of `v` transformed ring by ring: rows x (n/2 + 1) coefficients.
Eigen::MatrixXcd ring_spectra(const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.cols());
  fftw_plan plan = PlanCache::instance().r2c(n);
  Eigen::MatrixXcd out(v.rows(), n / 2 + 1);
  std::vector<double> row(static_cast<std::size_t>(n));
  std::vector<Complex> spec(static_cast<std::size_t>(n / 2 + 1));
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < n; ++j) row[j] = v(i, j);
    fftw_execute_dft_r2c(plan, row.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    for (int k = 0; k <= n / 2; ++k) out(i, k) = spec[k];
  }
  return out;
}

// Inverse real transform, normalized.
std::vector<double> inverse_real(std::vector<Complex> spec, int n) {
  fftw_plan plan = PlanCache::instance().c2r(n);
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
  for (double& x : out) x /= n;
  return out;
}

// Weighted cross-correlation C(alpha) = sum_i w_i sum_j f_i(a_j + alpha) g_i(a_j)
// of the trigonometric interpolants, represented by its spectrum.
struct Correlation {
  int n = 0;
  std::vector<Complex> spectrum;  // X_k, k = 0..n/2
  std::vector<double> at_shift;   // C(s * 2 pi / n)

  // d-th derivative of C at alpha (d = 0, 1, 2).
  double eval(double alpha, int d) const {
    double sum = d == 0 ? spectrum[0].real() : 0.0;
    const int half = n / 2;
    for (int k = 1; k < half; ++k) {
      const Complex e = spectrum[k] * std::polar(1.0, k * alpha);
      const double kk = static_cast<double>(k);
      if (d == 0) sum += 2.0 * e.real();
      if (d == 1) sum -= 2.0 * kk * e.imag();
      if (d == 2) sum -= 2.0 * kk * kk * e.real();
    }
    const double nyq = spectrum[half].real();
    const double h = static_cast<double>(half);
    if (d == 0) sum += nyq * std::cos(h * alpha);
    if (d == 1) sum -= h * nyq * std::sin(h * alpha);
    if (d == 2) sum -= h * h * nyq * std::cos(h * alpha);
    return sum / n;
  }
};

Correlation correlate(const Eigen::MatrixXcd& fs, const Eigen::MatrixXcd& gs, const std::vector<double>& weights,
                      int n) {
  Correlation c;
  c.n = n;
  c.spectrum.assign(static_cast<std::size_t>(n / 2 + 1), Complex(0.0, 0.0));
  for (Eigen::Index i = 0; i < fs.rows(); ++i) {
    for (int k = 0; k <= n / 2; ++k) c.spectrum[k] += weights[i] * fs(i, k) * std::conj(gs(i, k));
  }
  c.at_shift = inverse_real(c.spectrum, n);
  return c;
}

double wrap(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period || r < 0.0) r = 0.0;
  // Values a rounding step below the period belong to 0.
  if (period - r < 1e-12) r = 0.0;
  return r;
}

struct Candidate {
  double shift_angle;  // refined relative shift alpha
  double value;        // C(alpha)
  int coarse_shift;
};

struct RegistrationCore {
  Candidate best;
  std::vector<Candidate> others;  // other local maxima, at least 3 shifts away
  bool degenerate = false;
};

// Maximizes the correlation; `param` maps a relative shift to the reported,
// normalized parameter, used for tie-breaking.
template <typename Param>
RegistrationCore maximize(const Correlation& c, Param param) {
  const int n = c.n;
  const double step = kTwoPi / n;
  const auto [mn, mx] = std::minmax_element(c.at_shift.begin(), c.at_shift.end());
  const double scale = std::max(std::abs(*mn), std::abs(*mx));
  const double eps = 1e-10 * scale;
  RegistrationCore core;
  core.degenerate = (*mx - *mn) <= eps;

  // Local maxima of the sampled correlation, best first; ties broken by the
  // smaller parameter.
  std::vector<int> maxima;
  for (int s = 0; s < n; ++s) {
    const double v = c.at_shift[s];
    if (v >= c.at_shift[(s + n - 1) % n] && v >= c.at_shift[(s + 1) % n]) maxima.push_back(s);
  }
  auto better = [&](double va, double pa, double vb, double pb) {
    if (std::abs(va - vb) <= eps) return pa < pb;
    return va > vb;
  };
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    return better(c.at_shift[a], param(a * step), c.at_shift[b], param(b * step));
  });

  auto refine = [&](int s) {
    const double cm = c.at_shift[(s + n - 1) % n];
    const double c0 = c.at_shift[s];
    const double cp = c.at_shift[(s + 1) % n];
    const double denom = cm - 2.0 * c0 + cp;
    double delta = 0.0;
    if (denom < -eps) delta = std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
    double alpha = (s + delta) * step;
    double value = c.eval(alpha, 0);
    if (value < c0) {
      alpha = s * step;
      value = c0;
    }
    for (int iter = 0; iter < 30; ++iter) {
      const double d1 = c.eval(alpha, 1);
      const double d2 = c.eval(alpha, 2);
      if (!(d2 < 0.0)) break;
      const double move = std::clamp(-d1 / d2, -step, step);
      const double next = alpha + move;
      const double next_value = c.eval(next, 0);
      if (!(next_value >= value)) break;
      alpha = next;
      value = next_value;
      if (std::abs(move) < 1e-15) break;
    }
    return Candidate{wrap(alpha, kTwoPi), value, s};
  };

  const std::size_t n_refine = std::min<std::size_t>(maxima.size(), 3);
  std::vector<Candidate> refined;
  for (std::size_t k = 0; k < n_refine; ++k) refined.push_back(refine(maxima[k]));
  std::size_t best = 0;
  for (std::size_t k = 1; k < refined.size(); ++k) {
    if (better(refined[k].value, param(refined[k].shift_angle), refined[best].value,
               param(refined[best].shift_angle))) {
      best = k;
    }
  }
  core.best = refined[best];
  for (std::size_t k = 0; k < maxima.size() && core.others.size() < 3; ++k) {
    const int s = maxima[k];
    const int d = std::abs(s - core.best.coarse_shift);
    if (std::min(d, n - d) < 3) continue;
    core.others.push_back(k < refined.size() ? refined[k] : refine(s));
  }
  return core;
}

// Sup norm of (ring-wise band-limited shift of f by alpha) - g.
double spectral_residual(const Eigen::MatrixXcd& fs, const Eigen::MatrixXd& g, double alpha) {
  const int n = static_cast<int>(g.cols());
  double worst = 0.0;
  std::vector<Complex> spec(static_cast<std::size_t>(n / 2 + 1));
  for (Eigen::Index i = 0; i < fs.rows(); ++i) {
    for (int k = 0; k < n / 2; ++k) spec[k] = fs(i, k) * std::polar(1.0, k * alpha);
    spec[n / 2] = Complex(fs(i, n / 2).real() * std::cos(0.5 * n * alpha), 0.0);
    const auto row = inverse_real(spec, n);
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(row[j] - g(i, j)));
  }
  return worst;
}

Eigen::MatrixXd flipped_values(const GridFunction& f) {
  const auto& v = f.values();
  const Eigen::Index rows = v.rows();
  const int n = static_cast<int>(v.cols());
  Eigen::MatrixXd out(rows, n);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = v(rows - 1 - i, (n - j) % n);
  return out;
}

void check_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!f.grid().same_layout(g.grid())) {
    throw Error(ErrorCode::GridMismatch, "registration needs both functions on the same grid");
  }
}

struct FlipResult {
  RotationWitness witness;
  std::vector<double> other_axes;
};

RotationWitness fix_from_core(const GridFunction& f, const GridFunction& g, const Eigen::MatrixXcd& fs,
                              const RegistrationCore& core) {
  RotationWitness w{f.grid().frame()};
  w.family = RotationFamily::FixZeta;
  w.parameter = core.best.shift_angle;
  w.coarse_parameter = core.best.coarse_shift * f.grid().azimuth_step();
  w.degenerate = core.degenerate;
  w.residual = spectral_residual(fs, g.values(), w.parameter);
  return w;
}

double flip_axis(double shift_angle) { return wrap(-0.5 * shift_angle, kPi); }

FlipResult flip_registration(const GridFunction& f, const GridFunction& g) {
  check_same_grid(f, g);
  if (!f.grid().rings_symmetric()) {
    throw Error(ErrorCode::AsymmetricRings, "half-turn registration needs t-nodes symmetric about 0");
  }
  const int n = f.grid().n_azimuth();
  const Eigen::MatrixXcd fs = ring_spectra(flipped_values(f));
  const Eigen::MatrixXcd gs = ring_spectra(g.values());
  const Correlation c = correlate(fs, gs, f.grid().t_weights(), n);
  const RegistrationCore core = maximize(c, flip_axis);
  FlipResult out{RotationWitness{f.grid().frame()}, {}};
  RotationWitness& w = out.witness;
  w.family = RotationFamily::FlipZeta;
  w.parameter = flip_axis(core.best.shift_angle);
  w.coarse_parameter = flip_axis(core.best.coarse_shift * f.grid().azimuth_step());
  w.degenerate = core.degenerate;
  w.residual = spectral_residual(fs, g.values(), core.best.shift_angle);
  for (const auto& o : core.others) out.other_axes.push_back(flip_axis(o.shift_angle));
  return out;
}

double shift_residual(const GridFunction& f, const GridFunction& g, int shift) {
  const int n = f.grid().n_azimuth();
  double worst = 0.0;
  for (int i = 0; i < f.grid().n_rings(); ++i)
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(f(i, (j + shift) % n) - g(i, j)));
  return worst;
}

constexpr double kNoExit = std::numeric_limits<double>::infinity();

double exact_fix_residual(const SphereFunction& f, const GridFunction& g, double angle, double stop_above) {
  const auto& grid = g.grid();
  double worst = 0.0;
  for (int i = 0; i < grid.n_rings(); ++i) {
    const double t = grid.t_nodes()[i];
    for (int j = 0; j < grid.n_azimuth(); ++j) {
      worst = std::max(worst, std::abs(f(grid.frame().point(t, grid.azimuth(j) + angle)) - g(i, j)));
      if (worst > stop_above) return worst;
    }
  }
  return worst;
}

double exact_flip_residual(const SphereFunction& f, const GridFunction& g, double axis, double stop_above) {
  const auto& grid = g.grid();
  double worst = 0.0;
  for (int i = 0; i < grid.n_rings(); ++i) {
    const double t = grid.t_nodes()[i];
    for (int j = 0; j < grid.n_azimuth(); ++j) {
      worst = std::max(worst, std::abs(f(grid.frame().point(-t, 2.0 * axis - grid.azimuth(j))) - g(i, j)));
      if (worst > stop_above) return worst;
    }
  }
  return worst;
}

}  // namespace

RotationWitness register_fix_zeta(const GridFunction& f, const GridFunction& g) {
  check_same_grid(f, g);
  const int n = f.grid().n_azimuth();
  const Eigen::MatrixXcd fs = ring_spectra(f.values());
  const Eigen::MatrixXcd gs = ring_spectra(g.values());
  const Correlation c = correlate(fs, gs, f.grid().t_weights(), n);
  const RegistrationCore core = maximize(c, [](double a) { return wrap(a, kTwoPi); });
  return fix_from_core(f, g, fs, core);
}

RotationWitness register_flip_zeta(const GridFunction& f, const GridFunction& g) {
  return flip_registration(f, g).witness;
}

std::string Classification::label_string() const {
  std::ostringstream os;
  os.precision(12);
  switch (label) {
    case LabelKind::Xi: os << "Xi(" << alpha << ")"; break;
    case LabelKind::Psi: os << "Psi(" << axis_azimuth << ")"; break;
    case LabelKind::None: os << "None"; break;
  }
  return os.str();
}

Classification classify_direction(const SphereFunction& f, const SphereFunction& g, const SphereFrame& frame,
                                  double tol, const ClassifyOptions& options) {
  const SphereGrid grid(frame, options.n_rings, options.n_azimuth);
  return classify_sampled(sample_on_sphere(f, grid), sample_on_sphere(g, grid), f, tol, options);
}

Classification classify_sampled(const GridFunction& fg, const GridFunction& gg, const SphereFunction& f,
                                double tol, const ClassifyOptions& options) {
  check_same_grid(fg, gg);
  const int n = fg.grid().n_azimuth();
  const double stop_above = options.early_exit_factor > 0.0 ? options.early_exit_factor * tol : kNoExit;

  Classification out;
  out.w = fg.grid().frame().w();
  out.tol = tol;

  // Rotations about zeta. The half turn about zeta is an exact grid shift.
  const RotationWitness fix = register_fix_zeta(fg, gg);
  const double res_identity = shift_residual(fg, gg, 0);
  const double res_half = shift_residual(fg, gg, n / 2);
  out.ambiguous = res_identity <= tol && res_half <= tol;
  RotationWitness fix_best = fix;
  fix_best.residual = std::numeric_limits<double>::infinity();
  const double alpha_units = fix.parameter / kPi;
  const bool near_identity = alpha_units < options.snap_tol || alpha_units > 2.0 - options.snap_tol;
  const bool near_half = std::abs(alpha_units - 1.0) < options.snap_tol;
  if (res_identity <= tol || (near_identity && res_half > tol)) {
    fix_best.parameter = 0.0;
    fix_best.residual = res_identity;
  } else if (res_half <= tol || near_half) {
    fix_best.parameter = kPi;
    fix_best.residual = res_half;
  }
  if (fix_best.residual > tol) {
    const double exact = exact_fix_residual(f, gg, fix.parameter, stop_above);
    if (exact < fix_best.residual) {
      fix_best.parameter = fix.parameter;
      fix_best.residual = exact;
    }
  }

  // Half turns about axes in the great circle.
  FlipResult flip = flip_registration(fg, gg);
  RotationWitness flip_best = flip.witness;
  flip_best.residual = exact_flip_residual(f, gg, flip_best.parameter, stop_above);

  out.fix_residual = fix_best.residual;
  out.flip_residual = flip_best.residual;

  if (fix_best.residual <= tol) {
    out.label = LabelKind::Xi;
    out.witness = fix_best;
    out.alpha = fix_best.parameter / kPi;
    if (fix_best.parameter != 0.0 && fix_best.parameter != kPi) {
      // A rotation by an angle other than 0 or pi forces f = g = 0 on S^2(w).
      if (fg.sup_norm() <= tol && gg.sup_norm() <= tol) {
        out.alpha = 0.0;
        out.witness.parameter = 0.0;
        out.witness.residual = res_identity;
        out.collapsed = true;
      }
    }
  } else if (flip_best.residual <= tol) {
    out.label = LabelKind::Psi;
    out.witness = flip_best;
    out.axis_azimuth = flip_best.parameter;
  } else {
    out.label = LabelKind::None;
    out.witness = fix_best.residual <= flip_best.residual ? fix_best : flip_best;
  }

  if (flip_best.residual <= tol) {
    for (double axis : flip.other_axes) {
      if (exact_flip_residual(f, gg, axis, stop_above) <= tol) {
        out.symmetry_violation = true;
        break;
      }
    }
  }
  return out;
}

double zeta_symmetry_residual(const SphereFunction& f, const Direction4& xi, const Direction4& zeta, double alpha,
                              const ClassifyOptions& options) {
  const SphereGrid grid(SphereFrame(zeta, xi), options.n_rings, options.n_azimuth);
  const GridFunction fg = sample_on_sphere(f, grid);
  const double angle = alpha * kPi;
  const double shifts = angle / grid.azimuth_step();
  const double nearest = std::round(shifts);
  if (std::abs(shifts - nearest) < 1e-12) {
    const int n = grid.n_azimuth();
    const int s = static_cast<int>(((static_cast<long long>(nearest) % n) + n) % n);
    return shift_residual(fg, fg, s);
  }
  return exact_fix_residual(f, fg, angle, kNoExit);
}

bool detect_zeta_symmetry(const SphereFunction& f, const Direction4& xi, const Direction4& zeta, double alpha,
                          double tol, const ClassifyOptions& options) {
  return zeta_symmetry_residual(f, xi, zeta, alpha, options) <= tol;
}

std::optional<RotationWitness> detect_u_pi_symmetry(const SphereFunction& f, const SphereFrame& frame, double tol,
                                                     const ClassifyOptions& options) {
  const SphereGrid grid(frame, options.n_rings, options.n_azimuth);
  const GridFunction fg = sample_on_sphere(f, grid);
  RotationWitness w = register_flip_zeta(fg, fg);
  w.residual = exact_flip_residual(f, fg, w.parameter, kNoExit);
  if (w.residual <= tol) return w;
  return std::nullopt;
}

const char* to_string(LabelKind label) {
  switch (label) {
    case LabelKind::Xi: return "Xi";
    case LabelKind::Psi: return "Psi";
    case LabelKind::None: return "None";
  }
  return "None";
}

}  // namespace congrulab
