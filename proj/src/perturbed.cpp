#include "fowler/perturbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fowler/pohozaev.hpp"

namespace fowler {

PotentialSpec PotentialSpec::scaled_identity(double a) {
  PotentialSpec p;
  p.entries[0][0].c = a;
  p.entries[1][1].c = a;
  return p;
}

Mat2 PotentialSpec::at(double r) const {
  Mat2 m;
  m << entries[0][0](r), entries[0][1](r), entries[1][0](r), entries[1][1](r);
  return m;
}

bool PotentialSpec::is_zero() const {
  for (const auto& row : entries) {
    for (const AffineRadial& a : row) {
      if (a.c != 0.0 || a.d != 0.0) return false;
    }
  }
  return true;
}

bool PotentialSpec::symmetric() const {
  return entries[0][1].c == entries[1][0].c && entries[0][1].d == entries[1][0].d;
}

ValidationReport validate_potential(const Dimension& dim, const PotentialSpec& spec) {
  ValidationReport report;
  if (dim.n() > 5) {
    report.issues.push_back({"DIMENSION_RANGE", "perturbed system requires 3 <= n <= 5"});
  }
  if (!spec.symmetric()) {
    report.issues.push_back({"SYMMETRY", "A_12 and A_21 must coincide"});
  }
  // An affine A_12 is nonpositive on [0, 1] iff it is nonpositive at both ends.
  for (const AffineRadial& off : {spec.entries[0][1], spec.entries[1][0]}) {
    if (off(0.0) > 0.0 || off(1.0) > 0.0) {
      report.issues.push_back({"H1_VIOLATION", "-A must be cooperative: off-diagonal entries of A must be <= 0 on [0, 1]"});
      break;
    }
  }
  if (dim.n() == 5) {
    const Mat2 a0 = spec.at(0.0);
    if (a0(0, 0) != a0(1, 1) || a0(0, 1) != 0.0 || a0(1, 0) != 0.0) {
      report.issues.push_back({"H2_VIOLATION", "for n = 5, A(0) must be a multiple of the identity"});
    }
  }
  return report;
}

PhaseVelocity perturbed_rhs(const Dimension& dim, double t, const CylState& state, const PotentialSpec& spec) {
  PhaseVelocity d = limit_rhs(dim, state);
  if (!spec.is_zero()) {
    const double r = std::exp(-t);
    d.dw += (r * r) * (spec.at(r) * state.v);
  }
  return d;
}

VectorField perturbed_system(const Dimension& dim, const PotentialSpec& spec) {
  return [dim, spec](double t, const State& y, State& dydt) {
    CylState s;
    s.t = t;
    s.v = y.head<2>();
    s.w = y.segment<2>(2);
    const PhaseVelocity d = perturbed_rhs(dim, t, s, spec);
    dydt << d.dv, d.dw;
  };
}

PerturbedRun run_perturbed(const Dimension& dim, const CylState& ic, const PotentialSpec& spec,
                           double t_end, const IntegratorConfig& cfg) {
  dim.require_low_dimension();
  const ValidationReport report = validate_potential(dim, spec);
  if (!report.valid()) {
    throw DomainError(report.issues.front().code, report.issues.front().message);
  }
  if (ic.v.x() < 0.0 || ic.v.y() < 0.0 || !ic.v.allFinite() || !ic.w.allFinite()) {
    throw DomainError("INITIAL_STATE", "initial state must be finite with nonnegative components");
  }
  if (!(t_end > ic.t) || ic.t < 0.0) {
    throw DomainError("SPAN", "run must go forward from t >= 0 (r <= 1)");
  }

  const double limit = cfg.blowup_limit;
  const StopCondition guard = [limit](double, const State& y) {
    return y[0] < 0.0 || y[1] < 0.0 || std::abs(y[0]) > limit || std::abs(y[1]) > limit;
  };
  State y0(4);
  y0 << ic.v, ic.w;

  PerturbedRun run;
  run.dim = dim;
  run.potential = spec;
  run.trajectory = integrate(perturbed_system(dim, spec), y0, {ic.t, t_end}, cfg, guard);
  run.truncated = run.trajectory.truncated();

  const double tail_begin = run.trajectory.t_end() - run.trajectory.span().length() / 3.0;
  run.sup_norm = 0.0;
  run.inf_norm = std::numeric_limits<double>::infinity();
  run.tail_inf_norm = std::numeric_limits<double>::infinity();
  const auto& times = run.trajectory.times();
  const auto& states = run.trajectory.states();
  for (std::size_t k = 0; k < times.size(); ++k) {
    CylState s;
    s.t = times[k];
    s.v = states[k].head<2>();
    s.w = states[k].segment<2>(2);
    const double norm = s.v.norm();
    run.times.push_back(s.t);
    run.w_avg.push_back(s.v.x() + s.v.y());
    run.psi.push_back(hamiltonian(dim, s));
    run.norm.push_back(norm);
    run.sup_norm = std::max(run.sup_norm, norm);
    run.inf_norm = std::min(run.inf_norm, norm);
    if (s.t >= tail_begin) run.tail_inf_norm = std::min(run.tail_inf_norm, norm);
  }
  return run;
}

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

AsymptoticFit asymptotic_fit(const PerturbedRun& run, int window_count, double window_length,
                             const IntegratorConfig& cfg) {
  if (window_count < 3 || !(window_length > 0.0)) {
    throw DomainError("FIT_WINDOWS", "need at least 3 windows of positive length");
  }
  if (run.truncated) {
    throw DomainError("FIT_TRUNCATED", "cannot fit a truncated run");
  }
  const Trajectory& traj = run.trajectory;
  const double t0 = traj.t_begin();
  const double t1 = traj.t_end();
  const double tail_begin = t1 - (t1 - t0) / 3.0;
  if (t0 + window_count * window_length > tail_begin + 1e-12) {
    throw DomainError("FIT_WINDOWS", "windows must fit before the tail (last third) of the run");
  }

  // Model parameters from the tail.
  double psi_sum = 0.0;
  Vec2 dir_sum = Vec2::Zero();
  std::size_t tail_nodes = 0;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (run.times[k] < tail_begin) continue;
    psi_sum += run.psi[k];
    const Vec2 v = traj.states()[k].head<2>();
    dir_sum += v / v.norm();
    ++tail_nodes;
  }
  if (tail_nodes < 8) throw DomainError("FIT_TAIL", "tail has too few samples");
  const double scalar_energy = 2.0 * psi_sum / static_cast<double>(tail_nodes);
  const double tail_p = 0.5 * run.dim.sigma_sphere() * scalar_energy;
  if (!(scalar_energy > cylinder_energy(run.dim)) || classify_sign(run.dim, tail_p) != SignClass::negative) {
    throw DomainError("ENERGY_RANGE", "tail energy lies outside the interval of periodic solutions");
  }

  AsymptoticFit fit;
  fit.eps_star = necksize_from_energy(run.dim, scalar_energy);
  fit.lambda_star = Direction::from_vector(dir_sum);
  const FowlerProfile model = profile_from_necksize(run.dim, fit.eps_star, cfg);
  fit.model_period = model.period();

  const EventFunction radial_speed = [](double, const State& y) {
    return y[0] * y[2] + y[1] * y[3];
  };
  std::vector<double> minima = find_events(traj, radial_speed, EventDirection::rising);
  std::erase_if(minima, [tail_begin](double t) { return t < tail_begin; });
  if (minima.empty()) {
    throw DomainError("FIT_PHASE", "no minimum of |V| in the tail");
  }
  const double period = model.period();
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (double t : minima) {
    const double angle = -2.0 * std::numbers::pi * t / period;
    sin_sum += std::sin(angle);
    cos_sum += std::cos(angle);
  }
  double phase = std::atan2(sin_sum, cos_sum) / (2.0 * std::numbers::pi) * period;
  if (phase < 0.0) phase += period;
  fit.T_star = phase;

  constexpr int kWindowSamples = 256;
  const Vec2 lambda = fit.lambda_star.lambda();
  double worst = 0.0;
  for (int w = 0; w < window_count; ++w) {
    const double tau = t0 + w * window_length;
    double err = 0.0;
    for (int i = 0; i <= kWindowSamples; ++i) {
      const double t = tau + window_length * i / kWindowSamples;
      const Vec2 v = traj(t).head<2>();
      err = std::max(err, (v - model.value(t + fit.T_star) * lambda).norm());
    }
    fit.windows.push_back({tau, err});
    worst = std::max(worst, err);
  }

  fit.burn_in = static_cast<std::size_t>(window_count / 3);
  if (worst <= kFitNoiseFloor) {
    fit.exact_model = true;
    return fit;
  }

  const double floor = kFitToleranceFactor * cfg.rel_tol * std::max(1.0, run.sup_norm);
  std::vector<double> taus{fit.windows[fit.burn_in].tau};
  std::vector<double> logs{std::log(fit.windows[fit.burn_in].error)};
  for (std::size_t j = fit.burn_in + 1; j < fit.windows.size(); ++j) {
    if (!(fit.windows[j].error < fit.windows[j - 1].error) || fit.windows[j].error <= floor) break;
    taus.push_back(fit.windows[j].tau);
    logs.push_back(std::log(fit.windows[j].error));
  }
  fit.decreasing_windows = taus.size() - 1;
  if (fit.decreasing_windows == 0) {
    throw DomainError("NO_CONVERGENCE", "window errors do not decrease after burn-in");
  }
  fit.alpha = -least_squares_slope(taus, logs);
  return fit;
}

Removability removability_classify(const PerturbedRun& run) {
  if (run.truncated) return Removability::undecided;
  PohozaevReport report;
  try {
    report = p_invariant(run);
  } catch (const DomainError&) {
    return Removability::undecided;
  }
  constexpr double kPositiveFloor = 1e-12;
  if (report.sign == SignClass::negative && run.tail_inf_norm > kPositiveFloor) {
    return Removability::nonremovable;
  }
  if (report.sign != SignClass::zero) return Removability::undecided;

  // Decay of the radial average over the tail.
  const double tail_begin = run.times.back() - (run.times.back() - run.times.front()) / 3.0;
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (run.times[k] < tail_begin) continue;
    if (!(run.w_avg[k] > 0.0)) return Removability::undecided;
    ts.push_back(run.times[k]);
    logs.push_back(std::log(run.w_avg[k]));
  }
  if (ts.size() < 3) return Removability::undecided;
  const bool decaying = least_squares_slope(ts, logs) < 0.0 && run.w_avg.back() < 0.5 * std::exp(logs.front());
  return decaying ? Removability::removable : Removability::undecided;
}

const char* to_string(Removability r) {
  switch (r) {
    case Removability::removable:
      return "removable";
    case Removability::nonremovable:
      return "nonremovable";
    case Removability::undecided:
      return "undecided";
  }
  return "undecided";
}

}  // namespace fowler
