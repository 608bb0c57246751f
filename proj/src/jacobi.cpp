#include "fowler/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/LU>

namespace fowler {

namespace {

long binomial(long n, long k) {
  if (k < 0 || n < k) return 0;
  k = std::min(k, n - k);
  long out = 1;
  for (long i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Sup of |psi| on [a, b].
double sup_abs(const std::function<Vec2(double)>& f, double a, double b, int samples) {
  double out = 0.0;
  for (int i = 0; i <= samples; ++i) out = std::max(out, std::abs(f(a + (b - a) * i / samples).x()));
  return out;
}

GrowthClass growth_over(const std::function<Vec2(double)>& f, double period, int periods) {
  const double first = sup_abs(f, 0.0, period, 200);
  const double last = sup_abs(f, (periods - 1) * period, periods * period, 200);
  return last > 1.5 * first ? GrowthClass::linear : GrowthClass::periodic;
}

Trajectory sample_field(const std::function<Vec2(double)>& f, const Coefficient& q, double period,
                        const ExplicitFieldOptions& options) {
  const int count = options.span_periods * options.samples_per_period;
  const double end = options.span_periods * period;
  std::vector<double> times;
  std::vector<State> values;
  std::vector<State> ders;
  for (int i = 0; i <= count; ++i) {
    const double t = end * i / count;
    const Vec2 y = f(t);
    State v(2);
    v << y.x(), y.y();
    State d(2);
    d << y.y(), -q(t) * y.x();
    times.push_back(t);
    values.push_back(std::move(v));
    ders.push_back(std::move(d));
  }
  return Trajectory::from_samples(times, values, ders);
}

}  // namespace

ModeIndex mode_index(const Dimension& dim, int j) {
  if (j < 0) throw DomainError("MODE", "spherical harmonic degree must be >= 0");
  const long n = dim.n();
  ModeIndex m;
  m.j = j;
  m.lambda = static_cast<double>(j) * (j + n - 2);
  m.multiplicity = binomial(j + n - 1, n - 1) - binomial(j + n - 3, n - 1);
  return m;
}

std::vector<ModeIndex> eigenvalue_table(const Dimension& dim, int jmax) {
  if (jmax < 0) throw DomainError("MODE", "jmax must be >= 0");
  std::vector<ModeIndex> out;
  for (int j = 0; j <= jmax; ++j) out.push_back(mode_index(dim, j));
  return out;
}

std::vector<double> eigenvalues_with_multiplicity(const Dimension& dim, int jmax) {
  std::vector<double> out;
  for (const ModeIndex& m : eigenvalue_table(dim, jmax)) out.insert(out.end(), m.multiplicity, m.lambda);
  return out;
}

const char* to_string(BasisComponent c) { return c == BasisComponent::tangential ? "tangential" : "normal"; }

const char* to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::periodic:
      return "periodic";
    case GrowthClass::linear:
      return "linear";
    case GrowthClass::exp_growing:
      return "exp_growing";
    case GrowthClass::exp_decaying:
      return "exp_decaying";
  }
  return "periodic";
}

const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::phi1:
      return "phi1";
    case FieldKind::phi2:
      return "phi2";
    case FieldKind::phi3:
      return "phi3";
    case FieldKind::phi4:
      return "phi4";
    case FieldKind::mode_solution:
      return "mode_solution";
  }
  return "mode_solution";
}

ModeOperators mode_operators(const FowlerProfile& profile, const ModeIndex& mode) {
  const Dimension dim = profile.dimension();
  const double n = dim.n();
  const double shift = dim.delta_sq() + mode.lambda;
  const double tan_coeff = n * (n + 2.0) / 4.0;
  const double nor_coeff = dim.coupling();
  // The profile is shared so the coefficients stay valid after `profile` goes away.
  const auto shared = std::make_shared<FowlerProfile>(profile);
  ModeOperators ops;
  ops.q_tan = [shared, dim, shift, tan_coeff](double t) {
    const double v = shared->value(t);
    return tan_coeff * critical_power(dim, v * v) - shift;
  };
  ops.q_nor = [shared, dim, shift, nor_coeff](double t) {
    const double v = shared->value(t);
    return nor_coeff * critical_power(dim, v * v) - shift;
  };
  return ops;
}

Vec2 coupled_zero_order(const Dimension& dim, const Vec2& v0, double lambda, const Vec2& phi) {
  const double norm_sq = v0.squaredNorm();
  const double power = critical_power(dim, norm_sq);
  Vec2 out = -(dim.delta_sq() + lambda) * phi + dim.coupling() * power * phi;
  if (norm_sq > 0.0) {
    out += dim.coupling() * (4.0 / (dim.n() - 2.0)) * power / norm_sq * v0.dot(phi) * v0;
  }
  return out;
}

Vec2 family_difference(const FowlerProfile& minus, const FowlerProfile& plus, double step, double t) {
  return (plus.state(t) - minus.state(t)) / (2.0 * step);
}

double field_residual(const std::function<Vec2(double)>& field, const Coefficient& q, double t0, double t1,
                      int samples, double stencil_step) {
  const double h = stencil_step;
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    const double d2 = (-field(t + 2 * h).y() + 8.0 * field(t + h).y() - 8.0 * field(t - h).y() +
                       field(t - 2 * h).y()) /
                      (12.0 * h);
    worst = std::max(worst, std::abs(d2 + q(t) * field(t).x()));
  }
  return worst;
}

std::array<JacobiField, 4> explicit_fields(const FowlerProfile& profile, double family_step,
                                           const Direction& lambda, const ExplicitFieldOptions& options) {
  if (!(family_step > 0.0)) throw DomainError("DIFFERENCING", "family_step must be positive");
  const Dimension dim = profile.dimension();
  const double eps = profile.eps();
  const double period = profile.period();
  const ModeIndex k0 = mode_index(dim, 0);
  const ModeOperators ops = mode_operators(profile, k0);
  const auto base = std::make_shared<FowlerProfile>(profile_from_necksize(dim, eps, options.cfg));

  const auto make = [&](double e) { return std::make_shared<FowlerProfile>(profile_from_necksize(dim, e, options.cfg)); };
  const auto minus = make(eps - family_step);
  const auto plus = make(eps + family_step);
  {
    const auto half_minus = make(eps - 0.5 * family_step);
    const auto half_plus = make(eps + 0.5 * family_step);
    double scale = 0.0;
    double change = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = period * i / 200.0;
      const Vec2 coarse = family_difference(*minus, *plus, family_step, t);
      const Vec2 fine = family_difference(*half_minus, *half_plus, 0.5 * family_step, t);
      scale = std::max(scale, fine.norm());
      change = std::max(change, (coarse - fine).norm());
    }
    if (!(change <= 1e-2 * scale)) {
      throw DomainError("DIFFERENCING", "d/d eps of the profile family does not converge under step halving");
    }
  }

  // v, w and I = int_0^t v^{-2} over one period.
  const VectorField scalar = scalar_fowler_rhs(dim);
  const VectorField augmented = [scalar](double t, const State& y, State& dydt) {
    State head = y.head(2);
    State dhead(2);
    scalar(t, head, dhead);
    dydt << dhead, 1.0 / (y[0] * y[0]);
  };
  State y0(3);
  y0 << eps, 0.0, 0.0;
  const auto quadrature =
      std::make_shared<Trajectory>(integrate(augmented, y0, {0.0, period}, options.cfg));
  const double i_period = (*quadrature)(period)[2];

  std::array<JacobiField, 4> fields;
  fields[0].kind = FieldKind::phi1;
  fields[0].component = BasisComponent::tangential;
  fields[0].evaluate = [base](double t) {
    const Vec2 s = base->state(t);
    const Dimension d = base->dimension();
    return Vec2(s.y(), (d.delta_sq() - d.coupling() * critical_power(d, s.x() * s.x())) * s.x());
  };
  fields[1].kind = FieldKind::phi2;
  fields[1].component = BasisComponent::tangential;
  fields[1].evaluate = [minus, plus, family_step](double t) {
    return family_difference(*minus, *plus, family_step, t);
  };
  fields[2].kind = FieldKind::phi3;
  fields[2].component = BasisComponent::normal;
  fields[2].evaluate = [base](double t) { return base->state(t); };
  fields[3].kind = FieldKind::phi4;
  fields[3].component = BasisComponent::normal;
  fields[3].evaluate = [quadrature, period, i_period](double t) {
    const double copies = std::floor(t / period);
    const double local = std::clamp(t - copies * period, 0.0, period);
    const State y = (*quadrature)(local);
    const double integral = copies * i_period + y[2];
    return Vec2(y[0] * integral, y[1] * integral + 1.0 / y[0]);
  };

  for (JacobiField& f : fields) {
    const bool tangential = f.component == BasisComponent::tangential;
    const Coefficient& q = tangential ? ops.q_tan : ops.q_nor;
    f.mode = k0;
    f.basis = tangential ? lambda.lambda() : lambda.lambda_bar();
    f.residual = field_residual(f.evaluate, q, 0.5 * period, 1.5 * period, options.residual_samples,
                                options.stencil_step);
    f.growth = growth_over(f.evaluate, period, options.span_periods);
    f.samples = sample_field(f.evaluate, q, period, options);
  }
  return fields;
}

double initial_data_determinant(const std::array<JacobiField, 4>& fields) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int k = 0; k < 4; ++k) {
    Vec2 row = fields[k].evaluate(0.0);
    const double norm = row.norm();
    if (norm > 0.0) row /= norm;
    const int offset = k < 2 ? 0 : 2;
    m(k, offset) = row.x();
    m(k, offset + 1) = row.y();
  }
  return m.determinant();
}

std::pair<GrowthClass, GrowthClass> classify_monodromy(const Monodromy& m) {
  const bool unit = std::all_of(m.multipliers.begin(), m.multipliers.end(), [](const std::complex<double>& mu) {
    return std::abs(std::abs(mu) - 1.0) <= kUnitModulusBand;
  });
  if (!unit) return {GrowthClass::exp_growing, GrowthClass::exp_decaying};
  const double trace = m.trace();
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  if (std::abs(trace - 2.0) <= kTraceBand) {
    const bool defective = (m.matrix - id).norm() > kDefectBand;
    return {GrowthClass::periodic, defective ? GrowthClass::linear : GrowthClass::periodic};
  }
  if (std::abs(trace + 2.0) <= kTraceBand) {
    const bool defective = (m.matrix + id).norm() > kDefectBand;
    return {GrowthClass::periodic, defective ? GrowthClass::linear : GrowthClass::periodic};
  }
  return {GrowthClass::periodic, GrowthClass::periodic};
}

std::pair<MonodromyReport, MonodromyReport> floquet_classify(const FowlerProfile& profile, const ModeIndex& mode,
                                                             const IntegratorConfig& cfg) {
  const ModeOperators ops = mode_operators(profile, mode);
  MonodromyReport tan;
  tan.mode = mode;
  tan.component = BasisComponent::tangential;
  tan.monodromy = monodromy(ops.q_tan, profile.period(), cfg);
  tan.classes = classify_monodromy(tan.monodromy);
  MonodromyReport nor;
  nor.mode = mode;
  nor.component = BasisComponent::normal;
  nor.monodromy = monodromy(ops.q_nor, profile.period(), cfg);
  nor.classes = classify_monodromy(nor.monodromy);
  return {tan, nor};
}

}  // namespace fowler
