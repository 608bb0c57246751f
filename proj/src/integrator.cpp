#include "fowler/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fowler/core.hpp"

namespace fowler {

namespace {

// Dormand-Prince 8(5,3) tableau with the three extra stages of its 7th-order
// continuous extension (Hairer, Norsett & Wanner, DOP853).
constexpr std::array<double, 16> kC = {0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0, 1.0, 0.1, 0.2, 0.7777777777777778};
constexpr double kA[16][16] = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259, 0.0, 0.0, 0.0, 0.0},
    {0.056167502283047954, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25350021021662483, -0.2462390374708025, -0.12419142326381637, 0.15329179827876568, 0.00820105229563469, 0.007567897660545699, -0.008298, 0.0, 0.0, 0.0},
    {0.03183464816350214, 0.0, 0.0, 0.0, 0.0, 0.028300909672366776, 0.053541988307438566, -0.05492374857139099, 0.0, 0.0, -0.00010834732869724932, 0.0003825710908356584, -0.00034046500868740456, 0.1413124436746325, 0.0, 0.0},
    {-0.42889630158379194, 0.0, 0.0, 0.0, 0.0, -4.697621415361164, 7.683421196062599, 4.06898981839711, 0.3567271874552811, 0.0, 0.0, 0.0, -0.0013990241651590145, 2.9475147891527724, -9.15095847217987, 0.0},
};
constexpr std::array<double, 13> kE3 = {-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0};
constexpr std::array<double, 13> kE5 = {0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0};
constexpr double kD[4][16] = {
    {-8.428938276109013, 0.0, 0.0, 0.0, 0.0, 0.5667149535193777, -3.0689499459498917, 2.38466765651207, 2.117034582445028, -0.871391583777973, 2.2404374302607883, 0.6315787787694688, -0.08899033645133331, 18.148505520854727, -9.194632392478356, -4.436036387594894},
    {10.427508642579134, 0.0, 0.0, 0.0, 0.0, 242.28349177525817, 165.20045171727028, -374.5467547226902, -22.113666853125306, 7.733432668472264, -30.674084731089398, -9.332130526430229, 15.697238121770845, -31.139403219565178, -9.35292435884448, 35.81684148639408},
    {19.985053242002433, 0.0, 0.0, 0.0, 0.0, -387.0373087493518, -189.17813819516758, 527.8081592054236, -11.57390253995963, 6.8812326946963, -1.0006050966910838, 0.7777137798053443, -2.778205752353508, -60.19669523126412, 84.32040550667716, 11.99229113618279},
    {-25.69393346270375, 0.0, 0.0, 0.0, 0.0, -154.18974869023643, -231.5293791760455, 357.6391179106141, 93.40532418362432, -37.45832313645163, 104.0996495089623, 29.8402934266605, -43.53345659001114, 96.32455395918828, -39.17726167561544, -149.72683625798564},
};

constexpr int kStages = 12;
constexpr int kStagesExtended = 16;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

double rms(const State& v) { return v.norm() / std::sqrt(static_cast<double>(v.size())); }

double initial_step(const VectorField& rhs, double t0, const State& y0, const State& f0,
                    double interval, double direction, const IntegratorConfig& cfg) {
  const State scale = (cfg.abs_tol + y0.cwiseAbs().array() * cfg.rel_tol).matrix();
  const double d0 = rms(y0.cwiseQuotient(scale));
  const double d1 = rms(f0.cwiseQuotient(scale));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, interval);
  const State y1 = y0 + h0 * direction * f0;
  State f1(y0.size());
  rhs(t0 + h0 * direction, y1, f1);
  const double d2 = rms((f1 - f0).cwiseQuotient(scale)) / h0;
  double h1 = 0.0;
  if (d1 <= 1e-15 && d2 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  }
  return std::min({100.0 * h0, h1, interval, cfg.max_step});
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
    throw DomainError("TOLERANCE", "rel_tol must lie in (0, 1e-3]");
  }
  if (!(abs_tol > 0.0 && abs_tol <= rel_tol)) {
    throw DomainError("TOLERANCE", "abs_tol must lie in (0, rel_tol]");
  }
  if (!(max_step > 0.0)) throw DomainError("TOLERANCE", "max_step must be positive");
  if (max_steps <= 0) throw DomainError("TOLERANCE", "max_steps must be positive");
}

Trajectory integrate(const VectorField& rhs, const State& y0, Interval span,
                     const IntegratorConfig& cfg, const StopCondition& stop) {
  cfg.validate();
  if (!(span.begin != span.end) || !std::isfinite(span.begin) || !std::isfinite(span.end)) {
    throw DomainError("SPAN", "integration span must be finite and nondegenerate");
  }
  if (!y0.allFinite()) throw DomainError("INITIAL_STATE", "initial state must be finite");

  const Eigen::Index dim = y0.size();
  const double direction = span.end > span.begin ? 1.0 : -1.0;
  const double interval = std::abs(span.end - span.begin);

  double t = span.begin;
  State y = y0;
  State f(dim);
  rhs(t, y, f);

  std::vector<Trajectory::Segment> segments;
  std::vector<double> times{t};
  std::vector<State> states{y};
  std::vector<State> ders{f};

  std::array<State, kStagesExtended> k;
  for (auto& stage : k) stage.resize(dim);
  State y_new(dim);
  State f_new(dim);
  State tmp(dim);

  double h_abs = initial_step(rhs, t, y, f, interval, direction, cfg);
  bool truncated = false;
  long steps = 0;

  while (direction * (span.end - t) > 0.0) {
    if (++steps > cfg.max_steps) {
      throw IntegrationError("step count exhausted at t = " + std::to_string(t), t);
    }
    h_abs = std::min(h_abs, cfg.max_step);
    const double min_step = 10.0 * std::abs(std::nextafter(t, direction * std::numeric_limits<double>::infinity()) - t);

    bool rejected = false;
    double t_new = t;
    double h = 0.0;
    for (;;) {
      if (h_abs < min_step) {
        throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
      }
      h = h_abs * direction;
      t_new = t + h;
      if (direction * (t_new - span.end) > 0.0) t_new = span.end;
      h = t_new - t;
      h_abs = std::abs(h);

      k[0] = f;
      for (int s = 1; s < kStages; ++s) {
        tmp = y;
        for (int j = 0; j < s; ++j) {
          if (kA[s][j] != 0.0) tmp.noalias() += (h * kA[s][j]) * k[j];
        }
        rhs(t + kC[s] * h, tmp, k[s]);
      }
      y_new = y;
      for (int j = 0; j < kStages; ++j) {
        if (kA[kStages][j] != 0.0) y_new.noalias() += (h * kA[kStages][j]) * k[j];
      }
      rhs(t_new, y_new, f_new);
      k[kStages] = f_new;

      double err = std::numeric_limits<double>::infinity();
      if (y_new.allFinite() && f_new.allFinite()) {
        const State scale =
            (cfg.abs_tol + y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array() * cfg.rel_tol).matrix();
        State e5 = State::Zero(dim);
        State e3 = State::Zero(dim);
        for (int j = 0; j <= kStages; ++j) {
          if (kE5[j] != 0.0) e5.noalias() += kE5[j] * k[j];
          if (kE3[j] != 0.0) e3.noalias() += kE3[j] * k[j];
        }
        e5 = e5.cwiseQuotient(scale);
        e3 = e3.cwiseQuotient(scale);
        const double n5 = e5.squaredNorm();
        const double n3 = e3.squaredNorm();
        if (n5 == 0.0 && n3 == 0.0) {
          err = 0.0;
        } else {
          err = h_abs * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(dim));
        }
      }

      if (err < 1.0) {
        double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kErrorExponent));
        if (rejected) factor = std::min(1.0, factor);
        h_abs *= factor;
        break;
      }
      const double factor = std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, kErrorExponent)) : kMinFactor;
      h_abs *= factor;
      rejected = true;
    }

    // Continuous extension.
    for (int s = kStages + 1; s < kStagesExtended; ++s) {
      tmp = y;
      for (int j = 0; j < s; ++j) {
        if (kA[s][j] != 0.0) tmp.noalias() += (h * kA[s][j]) * k[j];
      }
      rhs(t + kC[s] * h, tmp, k[s]);
    }
    Trajectory::Segment seg;
    seg.t_old = t;
    seg.h = h;
    seg.y_old = y;
    const State dy = y_new - y;
    seg.f[0] = dy;
    seg.f[1] = h * f - dy;
    seg.f[2] = 2.0 * dy - h * (f_new + f);
    for (int r = 0; r < 4; ++r) {
      State acc = State::Zero(dim);
      for (int j = 0; j < kStagesExtended; ++j) {
        if (kD[r][j] != 0.0) acc.noalias() += kD[r][j] * k[j];
      }
      seg.f[3 + r] = h * acc;
    }
    segments.push_back(std::move(seg));

    t = t_new;
    y = y_new;
    f = f_new;
    times.push_back(t);
    states.push_back(y);
    ders.push_back(f);

    if (stop && direction * (span.end - t) > 0.0 && stop(t, y)) {
      truncated = true;
      break;
    }
  }

  Trajectory traj(std::move(segments), std::move(times), std::move(states), std::move(ders));
  traj.mark_truncated(truncated);
  return traj;
}

std::vector<double> find_events(const Trajectory& traj, const EventFunction& event,
                                EventDirection direction, int subdivisions) {
  std::vector<double> out;
  if (traj.empty()) return out;
  subdivisions = std::max(1, subdivisions);

  auto crosses = [direction](double a, double b) {
    if (a == 0.0) return false;
    const bool rising = a < 0.0 && b >= 0.0;
    const bool falling = a > 0.0 && b <= 0.0;
    switch (direction) {
      case EventDirection::rising:
        return rising;
      case EventDirection::falling:
        return falling;
      case EventDirection::any:
        return rising || falling;
    }
    return false;
  };

  auto g = [&](double t) { return event(t, traj(t)); };

  double t_prev = traj.t_begin();
  double g_prev = g(t_prev);
  for (const auto& seg : traj.segments()) {
    const double lo = std::max(seg.lo(), traj.t_begin());
    const double hi = std::min(seg.hi(), traj.t_end());
    if (hi <= lo) continue;
    for (int s = 1; s <= subdivisions; ++s) {
      const double t_cur = s == subdivisions ? hi : lo + (hi - lo) * s / subdivisions;
      const double g_cur = g(t_cur);
      if (crosses(g_prev, g_cur)) {
        double a = t_prev;
        double b = t_cur;
        double ga = g_prev;
        for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
          const double m = 0.5 * (a + b);
          const double gm = g(m);
          if ((ga < 0.0) == (gm < 0.0) && gm != 0.0) {
            a = m;
            ga = gm;
          } else {
            b = m;
          }
        }
        out.push_back(0.5 * (a + b));
      }
      t_prev = t_cur;
      g_prev = g_cur;
    }
  }
  return out;
}

std::array<std::complex<double>, 2> multipliers_from(double trace, double det) {
  const double half = 0.5 * trace;
  const double disc = half * half - det;
  if (disc >= 0.0) {
    const double big = half + std::copysign(std::sqrt(disc), half == 0.0 ? 1.0 : half);
    const double small = big != 0.0 ? det / big : 0.0;
    return {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half, im), std::complex<double>(half, -im)};
}

Monodromy monodromy(const std::function<double(double)>& q, double period,
                    const IntegratorConfig& cfg) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw DomainError("PERIOD", "monodromy period must be positive and finite");
  }
  // Bound the growth rate sqrt(max|q|) on a coarse sample to size the segments.
  double q_max = 0.0;
  constexpr int kProbe = 256;
  for (int i = 0; i <= kProbe; ++i) q_max = std::max(q_max, std::abs(q(period * i / kProbe)));
  const int segments = std::max(1, static_cast<int>(std::ceil(period * std::sqrt(q_max))));

  const VectorField rhs = [&q](double t, const State& y, State& dydt) {
    const double qt = q(t);
    dydt[0] = y[1];
    dydt[1] = -qt * y[0];
    dydt[2] = y[3];
    dydt[3] = -qt * y[2];
  };

  Monodromy out;
  out.period = period;
  Eigen::Matrix2d product = Eigen::Matrix2d::Identity();
  double det = 1.0;
  for (int s = 0; s < segments; ++s) {
    const double a = period * s / segments;
    const double b = s + 1 == segments ? period : period * (s + 1) / segments;
    State y0(4);
    y0 << 1.0, 0.0, 0.0, 1.0;
    const Trajectory traj = integrate(rhs, y0, {a, b}, cfg);
    const State& y1 = traj.states().back();
    Eigen::Matrix2d m;
    m << y1[0], y1[2], y1[1], y1[3];
    det *= m.determinant();
    product = m * product;
  }
  out.matrix = product;
  out.det = det;
  out.multipliers = multipliers_from(product.trace(), det);
  return out;
}

}  // namespace fowler
