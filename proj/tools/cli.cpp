#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fowler/classifier.hpp"
#include "fowler/fowler_profile.hpp"
#include "fowler/jacobi.hpp"
#include "fowler/pohozaev.hpp"
#include "json.hpp"

namespace fowlerlab {

using nlohmann::json;
using fowler::CylState;
using fowler::Dimension;
using fowler::DomainError;
using fowler::Vec2;

namespace {

const std::vector<std::string> kExperiments = {"profile", "floquet", "pohozaev", "classify", "perturbed", "sweep"};

[[noreturn]] void fail(std::string code, std::string message) {
  throw ValidationFailure{std::move(code), std::move(message)};
}

Vec2 read_vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) fail("SCHEMA", std::string(what) + " must be an array of two numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

fowler::AffineRadial read_affine(const json& j) {
  fowler::AffineRadial a;
  if (j.is_number()) {
    a.c = j.get<double>();
  } else {
    a.c = j.value("c", 0.0);
    a.d = j.value("d", 0.0);
  }
  return a;
}

fowler::PotentialSpec read_potential(const json& j) {
  if (j.contains("scaled_identity")) return fowler::PotentialSpec::scaled_identity(j["scaled_identity"].get<double>());
  fowler::PotentialSpec p;
  const char* names[2][2] = {{"A11", "A12"}, {"A21", "A22"}};
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      if (j.contains(names[i][k])) p.entries[i][k] = read_affine(j[names[i][k]]);
    }
  }
  return p;
}

InitialCondition read_initial(const json& j) {
  InitialCondition ic;
  const std::string kind = j.value("kind", "fowler");
  if (kind == "fowler") {
    ic.kind = InitialCondition::Kind::fowler;
    ic.eps = j.value("eps", ic.eps);
  } else if (kind == "bubble") {
    ic.kind = InitialCondition::Kind::bubble;
    ic.center = j.value("center", ic.center);
  } else if (kind == "state") {
    ic.kind = InitialCondition::Kind::state;
    if (!j.contains("v") || !j.contains("w")) fail("SCHEMA", "state initial condition needs v and w");
    ic.v = read_vec2(j["v"], "initial.v");
    ic.w = read_vec2(j["w"], "initial.w");
  } else {
    fail("SCHEMA", "unknown initial condition kind '" + kind + "'");
  }
  if (j.contains("lambda")) ic.lambda = read_vec2(j["lambda"], "initial.lambda");
  if (j.contains("angle")) {
    const double a = j["angle"].get<double>();
    ic.lambda = Vec2(std::cos(a), std::sin(a));
  }
  return ic;
}

SweepSpec read_sweep(const json& j, const Dimension& dim) {
  SweepSpec s;
  s.quantity = j.value("quantity", "");
  s.periods = j.value("periods", s.periods);
  if (j.contains("eps")) s.eps = j["eps"].get<std::vector<double>>();
  if (j.contains("eps_range")) {
    const json& r = j["eps_range"];
    const double from = r.at("from").get<double>();
    const double to = r.at("to").get<double>();
    const int count = r.at("count").get<int>();
    const double scale = r.value("relative_to_cylinder", false) ? fowler::cylinder_necksize(dim) : 1.0;
    for (int i = 0; i < count; ++i) {
      const double x = count == 1 ? from : from + (to - from) * i / (count - 1);
      s.eps.push_back(scale * x);
    }
  }
  return s;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("OUTPUT", "cannot open '" + path + "' for writing");
  f << text;
  if (!f) fail("OUTPUT", "failed writing '" + path + "'");
}

json complex_pair(const std::array<std::complex<double>, 2>& mu) {
  json a = json::array();
  for (const auto& m : mu) a.push_back({{"re", m.real()}, {"im", m.imag()}});
  return a;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double x : values) {
    if (!first) line += ',';
    line += format_double(x);
    first = false;
  }
  line += '\n';
  return line;
}

double required_eps(const Scenario& s) {
  const Dimension dim(s.n);
  if (s.eps) return *s.eps;
  return fowler::necksize_from_energy(dim, *s.energy);
}

// ---- experiments ----------------------------------------------------------

std::string run_profile(const Scenario& s) {
  const Dimension dim(s.n);
  const double eps = required_eps(s);
  const fowler::FowlerProfile profile = fowler::profile_from_necksize(dim, eps, s.cfg);
  const double span = s.periods * profile.period();
  fowler::State y0(2);
  y0 << eps, 0.0;
  const fowler::Trajectory traj = fowler::integrate(fowler::scalar_fowler_rhs(dim), y0, {0.0, span}, s.cfg);
  const int count = s.periods * s.samples_per_period;

  if (s.format == "json") {
    json rows = json::array();
    for (int i = 0; i <= count; ++i) {
      const double t = span * i / count;
      const fowler::State y = traj(t);
      rows.push_back({{"t", t}, {"v", y[0]}, {"w", y[1]}, {"H_scalar", fowler::scalar_hamiltonian(dim, y[0], y[1])}});
    }
    json doc = {{"n", s.n},
                {"eps", eps},
                {"period", profile.period()},
                {"energy", profile.energy()},
                {"max_value", profile.max_value()},
                {"samples", rows}};
    return doc.dump(2) + "\n";
  }
  std::string text = "t,v,w,H_scalar\n";
  for (int i = 0; i <= count; ++i) {
    const double t = span * i / count;
    const fowler::State y = traj(t);
    text += csv_row({t, y[0], y[1], fowler::scalar_hamiltonian(dim, y[0], y[1])});
  }
  return text;
}

std::string run_floquet(const Scenario& s) {
  const Dimension dim(s.n);
  const fowler::FowlerProfile profile = fowler::profile_from_necksize(dim, required_eps(s), s.cfg);
  json out = json::array();
  for (const fowler::ModeIndex& mode : fowler::eigenvalue_table(dim, s.jmax)) {
    const auto [tan, nor] = fowler::floquet_classify(profile, mode, s.cfg);
    for (const fowler::MonodromyReport* r : {&tan, &nor}) {
      out.push_back({{"j", mode.j},
                     {"lambda", mode.lambda},
                     {"multiplicity", mode.multiplicity},
                     {"component", fowler::to_string(r->component)},
                     {"trace", r->monodromy.trace()},
                     {"det", r->monodromy.det},
                     {"multipliers", complex_pair(r->monodromy.multipliers)},
                     {"class", {fowler::to_string(r->classes.first), fowler::to_string(r->classes.second)}}});
    }
  }
  return out.dump(2) + "\n";
}

std::string run_pohozaev(const Scenario& s) {
  const Dimension dim(s.n);
  const fowler::PerturbedRun run =
      fowler::run_perturbed(dim, initial_state(dim, s.initial), s.potential, s.t_end, s.cfg);
  const double sigma = dim.sigma_sphere();
  if (s.format == "json") {
    json values = json::array();
    for (std::size_t k = 0; k < run.times.size(); ++k) {
      values.push_back({{"r", std::exp(-run.times[k])}, {"P", sigma * run.psi[k]}});
    }
    json doc = {{"n", s.n}, {"truncated", run.truncated}, {"values", values}};
    try {
      const fowler::PohozaevReport report = fowler::p_invariant(run);
      doc["limit_estimate"] = report.limit_estimate;
      doc["cauchy_spread"] = report.cauchy_spread;
      doc["sign"] = fowler::to_string(report.sign);
    } catch (const DomainError& e) {
      doc["invariant_error"] = e.code();
    }
    doc["removability"] = fowler::to_string(fowler::removability_classify(run));
    return doc.dump(2) + "\n";
  }
  std::string text = "r,P\n";
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    text += csv_row({std::exp(-run.times[k]), sigma * run.psi[k]});
  }
  return text;
}

json component_names(const fowler::ClassificationReport& r) {
  json a = json::array();
  for (fowler::ComponentSign c : r.components) {
    a.push_back(c == fowler::ComponentSign::positive ? "positive" : c == fowler::ComponentSign::zero ? "zero" : "mixed");
  }
  return a;
}

std::string run_classify(const Scenario& s) {
  const Dimension dim(s.n);
  const fowler::Trajectory traj = fowler::integrate_limit(dim, initial_state(dim, s.initial), s.t_end, s.cfg);
  const fowler::ClassificationReport r = fowler::classify(traj);
  json doc = {{"n", s.n},
              {"wronskian_mean", r.wronskian_mean},
              {"wronskian_spread", r.wronskian_spread},
              {"max_angular_deviation", r.max_angular_deviation},
              {"c1", r.c1},
              {"c2", r.c2},
              {"components", component_names(r)},
              {"truncated", r.truncated},
              {"residual", fowler::limit_residual(dim, traj)}};
  doc["direction"] = r.direction ? json{r.direction->lambda().x(), r.direction->lambda().y()} : json(nullptr);
  doc["eta"] = r.eta ? json(*r.eta) : json(nullptr);
  return doc.dump(2) + "\n";
}

json fit_summary(const Scenario& s, const fowler::PerturbedRun& run) {
  json doc = {{"n", s.n}, {"truncated", run.truncated}};
  try {
    const fowler::AsymptoticFit fit = fowler::asymptotic_fit(run, s.window_count, s.window_length, s.cfg);
    json windows = json::array();
    for (const fowler::WindowError& w : fit.windows) windows.push_back({{"tau", w.tau}, {"err", w.error}});
    doc["eps_star"] = fit.eps_star;
    doc["T_star"] = fit.T_star;
    doc["lambda_star"] = {fit.lambda_star.lambda().x(), fit.lambda_star.lambda().y()};
    doc["alpha"] = fit.alpha ? json(*fit.alpha) : json(nullptr);
    doc["exact_model"] = fit.exact_model;
    doc["burn_in"] = fit.burn_in;
    doc["decreasing_windows"] = fit.decreasing_windows;
    doc["model_period"] = fit.model_period;
    doc["windows"] = windows;
  } catch (const DomainError& e) {
    doc["fit_error"] = e.code();
    doc["fit_message"] = e.what();
  }
  try {
    const fowler::PohozaevReport report = fowler::p_invariant(run);
    doc["P_invariant"] = report.limit_estimate;
    doc["P_sign"] = fowler::to_string(report.sign);
  } catch (const DomainError& e) {
    doc["P_invariant"] = nullptr;
    doc["P_error"] = e.code();
  }
  doc["removability"] = fowler::to_string(fowler::removability_classify(run));
  return doc;
}

std::pair<std::string, std::string> run_perturbed(const Scenario& s) {
  const Dimension dim(s.n);
  const fowler::PerturbedRun run =
      fowler::run_perturbed(dim, initial_state(dim, s.initial), s.potential, s.t_end, s.cfg);
  const std::string summary = fit_summary(s, run).dump(2) + "\n";
  if (s.format == "json") return {summary, ""};
  std::string text = "t,v1,v2,w1,w2,Psi,w_avg\n";
  const auto& states = run.trajectory.states();
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const fowler::State& y = states[k];
    text += csv_row({run.times[k], y[0], y[1], y[2], y[3], run.psi[k], run.w_avg[k]});
  }
  return {text, summary};
}

std::string render_sweep(const SweepTable& table, const std::string& format) {
  if (format == "json") {
    json rows = json::array();
    for (const SweepRow& row : table.rows) {
      json r = {{"eps", row.eps}, {"status", row.status}};
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        r[table.columns[c]] = row.values.empty() ? json(nullptr) : json(row.values[c]);
      }
      rows.push_back(r);
    }
    return rows.dump(2) + "\n";
  }
  std::string text = "eps";
  for (const std::string& c : table.columns) text += "," + c;
  text += ",status\n";
  for (const SweepRow& row : table.rows) {
    text += format_double(row.eps);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      text += ",";
      if (!row.values.empty()) text += format_double(row.values[c]);
    }
    text += "," + row.status + "\n";
  }
  return text;
}

void emit_error(std::ostream& err, const std::string& code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

bool SweepTable::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; });
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("SCHEMA", std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("schema")) fail("SCHEMA", "scenario must be an object with \"schema\": 1");
    if (j["schema"] != 1) fail("SCHEMA", "unsupported scenario schema " + j["schema"].dump());
    Scenario s;
    s.experiment = j.value("experiment", "");
    s.n = j.value("n", s.n);
    if (j.contains("eps")) s.eps = j["eps"].get<double>();
    if (j.contains("energy")) s.energy = j["energy"].get<double>();
    s.periods = j.value("periods", s.periods);
    s.samples_per_period = j.value("samples_per_period", s.samples_per_period);
    s.jmax = j.value("jmax", s.jmax);
    s.t_end = j.value("t_end", s.t_end);
    if (j.contains("initial")) s.initial = read_initial(j["initial"]);
    if (j.contains("potential")) s.potential = read_potential(j["potential"]);
    if (j.contains("fit")) {
      s.window_count = j["fit"].value("windows", s.window_count);
      s.window_length = j["fit"].value("window_length", s.window_length);
    }
    if (j.contains("tolerances")) {
      s.cfg.rel_tol = j["tolerances"].value("rel", s.cfg.rel_tol);
      s.cfg.abs_tol = j["tolerances"].value("abs", s.cfg.abs_tol);
    }
    if (j.contains("sweep")) {
      if (s.n < 3) fail("DIMENSION_RANGE", "n must be >= 3");
      s.sweep = read_sweep(j["sweep"], Dimension(s.n));
    }
    if (j.contains("outputs")) {
      s.out = j["outputs"].value("out", "");
      s.fit_out = j["outputs"].value("fit", "");
    }
    s.format = j.value("format", s.format);
    return s;
  } catch (const json::exception& e) {
    fail("SCHEMA", std::string("malformed scenario: ") + e.what());
  }
}

fowler::CylState initial_state(const Dimension& dim, const InitialCondition& ic) {
  CylState s;
  s.t = 0.0;
  switch (ic.kind) {
    case InitialCondition::Kind::fowler: {
      const Vec2 lambda = fowler::Direction::from_vector(ic.lambda).lambda();
      s.v = ic.eps * lambda;
      break;
    }
    case InitialCondition::Kind::bubble: {
      const Vec2 lambda = fowler::Direction::from_vector(ic.lambda).lambda();
      const double v = std::pow(std::cosh(ic.center), -dim.delta());
      s.v = v * lambda;
      s.w = dim.delta() * std::tanh(ic.center) * v * lambda;
      break;
    }
    case InitialCondition::Kind::state:
      s.v = ic.v;
      s.w = ic.w;
      break;
  }
  return s;
}

void validate(const Scenario& s) {
  if (std::find(kExperiments.begin(), kExperiments.end(), s.experiment) == kExperiments.end()) {
    fail("SCHEMA", "unknown experiment '" + s.experiment + "'");
  }
  if (s.n < 3) fail("DIMENSION_RANGE", "n must be >= 3");
  const Dimension dim(s.n);
  try {
    s.cfg.validate();
  } catch (const DomainError& e) {
    fail(e.code(), e.what());
  }
  if (s.format != "csv" && s.format != "json") fail("FORMAT", "format must be csv or json");

  const double eps_cyl = fowler::cylinder_necksize(dim);
  const auto check_profile_parameter = [&] {
    if (s.eps.has_value() == s.energy.has_value()) fail("PARAMETER", "give exactly one of eps and energy");
    if (s.eps && !(*s.eps > 0.0 && *s.eps < eps_cyl)) {
      fail("NECKSIZE_RANGE", "eps must lie in (0, " + format_double(eps_cyl) + ")");
    }
    if (s.energy && !(*s.energy > fowler::cylinder_energy(dim) && *s.energy < 0.0)) {
      fail("ENERGY_RANGE", "energy must lie in (" + format_double(fowler::cylinder_energy(dim)) + ", 0)");
    }
  };
  const auto check_initial = [&] {
    const InitialCondition& ic = s.initial;
    if (ic.kind != InitialCondition::Kind::state) {
      try {
        (void)fowler::Direction::from_vector(ic.lambda);
      } catch (const DomainError& e) {
        fail(e.code(), e.what());
      }
    }
    if (ic.kind == InitialCondition::Kind::fowler && !(ic.eps > 0.0 && ic.eps < eps_cyl)) {
      fail("NECKSIZE_RANGE", "initial eps must lie in (0, " + format_double(eps_cyl) + ")");
    }
    if (ic.kind == InitialCondition::Kind::state &&
        (ic.v.x() < 0.0 || ic.v.y() < 0.0 || !ic.v.allFinite() || !ic.w.allFinite())) {
      fail("INITIAL_STATE", "initial V must be finite with nonnegative components");
    }
    if (!(s.t_end > 0.0)) fail("SPAN", "t_end must be positive");
  };
  const auto check_potential = [&] {
    if (s.n > 5) fail("DIMENSION_RANGE", "the perturbed system is only supported for 3 <= n <= 5");
    const fowler::ValidationReport report = fowler::validate_potential(dim, s.potential);
    if (!report.valid()) fail(report.issues.front().code, report.issues.front().message);
  };

  if (s.experiment == "profile") {
    check_profile_parameter();
    if (s.periods < 1) fail("PARAMETER", "periods must be >= 1");
    if (s.samples_per_period < 2) fail("PARAMETER", "samples_per_period must be >= 2");
  } else if (s.experiment == "floquet") {
    check_profile_parameter();
    if (s.jmax < 0) fail("PARAMETER", "jmax must be >= 0");
  } else if (s.experiment == "classify") {
    check_initial();
  } else if (s.experiment == "pohozaev" || s.experiment == "perturbed") {
    check_initial();
    check_potential();
    if (s.experiment == "perturbed") {
      if (s.window_count < 3 || !(s.window_length > 0.0)) {
        fail("FIT_WINDOWS", "need at least 3 windows of positive length");
      }
      if (s.window_count * s.window_length > 2.0 * s.t_end / 3.0) {
        fail("FIT_WINDOWS", "windows must fit in the first two thirds of the run");
      }
    }
  } else if (s.experiment == "sweep") {
    if (!s.sweep) fail("SCHEMA", "sweep experiment needs a sweep block");
    if (s.sweep->quantity != "pohozaev" && s.sweep->quantity != "period") {
      fail("SCHEMA", "sweep quantity must be pohozaev or period");
    }
    if (s.sweep->eps.empty()) fail("EMPTY_GRID", "sweep grid is empty");
    if (s.sweep->periods < 1) fail("PARAMETER", "sweep periods must be >= 1");
    if (s.sweep->quantity == "pohozaev") check_potential();
  }
}

SweepTable run_sweep(const Scenario& s, unsigned jobs) {
  if (!s.sweep || s.sweep->eps.empty()) fail("EMPTY_GRID", "sweep grid is empty");
  const Dimension dim(s.n);
  const SweepSpec& spec = *s.sweep;
  SweepTable table;
  if (spec.quantity == "pohozaev") {
    table.columns = {"P_invariant", "cauchy_spread"};
  } else {
    table.columns = {"period", "normalized_period"};
  }
  table.rows.resize(spec.eps.size());

  const auto evaluate = [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.eps = spec.eps[i];
    try {
      const fowler::FowlerProfile profile = fowler::profile_from_necksize(dim, row.eps, s.cfg);
      if (spec.quantity == "period") {
        row.values = {profile.period(), profile.period() * std::sqrt(dim.n() - 2.0) / (2.0 * std::numbers::pi)};
      } else {
        InitialCondition ic = s.initial;
        ic.kind = InitialCondition::Kind::fowler;
        ic.eps = row.eps;
        const double t_end = std::max(spec.periods * profile.period(), 6.0);
        const fowler::PerturbedRun run =
            fowler::run_perturbed(dim, initial_state(dim, ic), s.potential, t_end, s.cfg);
        const fowler::PohozaevReport report = fowler::p_invariant(run);
        row.values = {report.limit_estimate, report.cauchy_spread};
      }
    } catch (const DomainError& e) {
      row.values.clear();
      row.status = "error:" + e.code();
    } catch (const std::exception& e) {
      row.values.clear();
      row.status = "error:INTEGRATION";
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(spec.eps.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < spec.eps.size(); i = next++) evaluate(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return table;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for singular solutions of coupled critical systems", "fowlerlab"};
  app.require_subcommand(1);

  struct Flags {
    std::string scenario;
    int n = 4;
    double eps = 0.0;
    double energy = 0.0;
    int periods = 1;
    int samples = 200;
    int jmax = 2;
    double t_end = 0.0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    std::string out;
    std::string fit_out;
    std::string format;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string ic;
    double angle = 0.0;
    std::vector<double> v;
    std::vector<double> w;
    double center = 0.0;
    int windows = 0;
    double window_length = 0.0;
  } flags;

  std::vector<CLI::App*> subs;
  for (const std::string& name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--scenario", flags.scenario, "scenario JSON file");
    sub->add_option("--n", flags.n, "dimension n >= 3");
    sub->add_option("--eps", flags.eps, "necksize");
    sub->add_option("--energy", flags.energy, "scalar energy H0 (alternative to --eps)");
    sub->add_option("--periods", flags.periods, "number of periods");
    sub->add_option("--samples", flags.samples, "samples per period");
    sub->add_option("--jmax", flags.jmax, "largest spherical harmonic degree");
    sub->add_option("--t-end", flags.t_end, "end of the cylindrical time span");
    sub->add_option("--rel-tol", flags.rel_tol, "relative tolerance");
    sub->add_option("--abs-tol", flags.abs_tol, "absolute tolerance");
    sub->add_option("--out", flags.out, "output path (default stdout)");
    sub->add_option("--fit-out", flags.fit_out, "fit summary JSON path");
    sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", flags.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--ic", flags.ic, "initial condition kind")->check(CLI::IsMember({"fowler", "bubble", "state"}));
    sub->add_option("--angle", flags.angle, "angle of Lambda in [0, pi/2]");
    sub->add_option("--v", flags.v, "initial V")->expected(2);
    sub->add_option("--w", flags.w, "initial W")->expected(2);
    sub->add_option("--center", flags.center, "peak time of the bubble initial condition");
    sub->add_option("--windows", flags.windows, "number of fit windows");
    sub->add_option("--window-length", flags.window_length, "length of each fit window");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = nullptr;
  for (CLI::App* candidate : subs) {
    if (candidate->parsed()) sub = candidate;
  }
  const auto given = [sub](const char* name) { return sub->count(name) > 0; };

  try {
    Scenario s;
    if (given("--scenario")) {
      std::ifstream in(flags.scenario, std::ios::binary);
      if (!in) {
        emit_error(err, "MISSING_INPUT", "cannot read scenario file '" + flags.scenario + "'");
        return kMissingInput;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      s = parse_scenario(buffer.str());
      if (!s.experiment.empty() && s.experiment != sub->get_name()) {
        fail("SCHEMA", "scenario experiment '" + s.experiment + "' does not match subcommand '" + sub->get_name() + "'");
      }
    }
    s.experiment = sub->get_name();
    if (given("--n")) s.n = flags.n;
    if (given("--eps")) {
      s.eps = flags.eps;
      s.initial.eps = flags.eps;
    }
    if (given("--energy")) s.energy = flags.energy;
    if (given("--periods")) s.periods = flags.periods;
    if (given("--samples")) s.samples_per_period = flags.samples;
    if (given("--jmax")) s.jmax = flags.jmax;
    if (given("--t-end")) s.t_end = flags.t_end;
    if (given("--rel-tol")) s.cfg.rel_tol = flags.rel_tol;
    if (given("--abs-tol")) s.cfg.abs_tol = flags.abs_tol;
    if (given("--out")) s.out = flags.out;
    if (given("--fit-out")) s.fit_out = flags.fit_out;
    if (given("--format")) s.format = flags.format;
    if (given("--ic")) {
      s.initial.kind = flags.ic == "fowler"   ? InitialCondition::Kind::fowler
                       : flags.ic == "bubble" ? InitialCondition::Kind::bubble
                                              : InitialCondition::Kind::state;
    }
    if (given("--angle")) s.initial.lambda = Vec2(std::cos(flags.angle), std::sin(flags.angle));
    if (given("--v")) {
      s.initial.kind = InitialCondition::Kind::state;
      s.initial.v = Vec2(flags.v[0], flags.v[1]);
    }
    if (given("--w")) s.initial.w = Vec2(flags.w[0], flags.w[1]);
    if (given("--center")) s.initial.center = flags.center;
    if (given("--windows")) s.window_count = flags.windows;
    if (given("--window-length")) s.window_length = flags.window_length;

    validate(s);

    if (s.experiment == "profile") {
      write_text(s.out, run_profile(s), out);
    } else if (s.experiment == "floquet") {
      write_text(s.out, run_floquet(s), out);
    } else if (s.experiment == "pohozaev") {
      write_text(s.out, run_pohozaev(s), out);
    } else if (s.experiment == "classify") {
      write_text(s.out, run_classify(s), out);
    } else if (s.experiment == "perturbed") {
      const auto [primary, summary] = run_perturbed(s);
      write_text(s.out, primary, out);
      if (!s.fit_out.empty() && !summary.empty()) write_text(s.fit_out, summary, out);
    } else {
      const SweepTable table = run_sweep(s, flags.jobs);
      write_text(s.out, render_sweep(table, s.format), out);
      if (table.any_failed()) return kPartialFailure;
    }
    return kOk;
  } catch (const ValidationFailure& v) {
    emit_error(err, v.code, v.message);
    return kValidation;
  } catch (const DomainError& e) {
    emit_error(err, e.code(), e.what());
    return kValidation;
  } catch (const fowler::IntegrationError& e) {
    emit_error(err, "INTEGRATION", e.what());
    return kValidation;
  }
}

}  // namespace fowlerlab
