#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fowler/core.hpp"
#include "fowler/integrator.hpp"
#include "fowler/perturbed.hpp"

namespace fowlerlab {

enum ExitCode : int {
  kOk = 0,
  kPartialFailure = 1,
  kValidation = 2,
  kUsage = 64,
  kMissingInput = 66,
};

struct InitialCondition {
  enum class Kind { fowler, bubble, state };
  Kind kind = Kind::fowler;
  double eps = 0.3;
  double center = 2.0;  // bubble peak time
  fowler::Vec2 lambda = fowler::Vec2(1.0, 1.0).normalized();
  fowler::Vec2 v = fowler::Vec2::Zero();
  fowler::Vec2 w = fowler::Vec2::Zero();
};

struct SweepSpec {
  std::string quantity;  // "pohozaev" or "period"
  std::vector<double> eps;
  int periods = 4;
};

struct Scenario {
  std::string experiment;
  int n = 4;
  std::optional<double> eps;
  std::optional<double> energy;
  int periods = 1;
  int samples_per_period = 200;
  int jmax = 2;
  double t_end = 40.0;
  InitialCondition initial;
  fowler::PotentialSpec potential;
  int window_count = 15;
  double window_length = 1.0;
  fowler::IntegratorConfig cfg;
  std::optional<SweepSpec> sweep;
  std::string out;
  std::string fit_out;
  std::string format = "csv";
};

/// Raised for malformed or inadmissible scenarios; `code` ends up in the
/// error JSON on stderr.
struct ValidationFailure {
  std::string code;
  std::string message;
};

/// Parses a scenario document ("schema": 1). Throws ValidationFailure.
Scenario parse_scenario(const std::string& text);

/// Checks every precondition of the experiment. Throws ValidationFailure.
void validate(const Scenario& scenario);

fowler::CylState initial_state(const fowler::Dimension& dim, const InitialCondition& ic);

struct SweepRow {
  double eps = 0.0;
  std::vector<double> values;
  std::string status = "ok";
};

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  bool any_failed() const;
};

/// Runs every grid point on up to `jobs` worker threads; rows keep grid order.
SweepTable run_sweep(const Scenario& scenario, unsigned jobs);

std::string format_double(double x);

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fowlerlab
