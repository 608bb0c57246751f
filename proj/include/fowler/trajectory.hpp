#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace fowler {

using State = Eigen::VectorXd;

struct Interval {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
};

class OutOfSpan : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Piecewise-polynomial solution of an ODE with dense (continuous) output.
///
/// Each segment stores the 7th-order Dormand-Prince interpolant in its nested
/// form
///   y(x) = y0 + x (F0 + (1-x)(F1 + x (F2 + (1-x)(F3 + ...)))),  x = (t - t0)/h,
/// which also represents cubic Hermite segments when F3..F6 vanish. Evaluation
/// outside the span throws; there is no extrapolation.
class Trajectory {
 public:
  static constexpr int kDenseTerms = 7;

  struct Segment {
    double t_old = 0.0;
    double h = 0.0;  // may be negative for segments produced by backward integration
    State y_old;
    std::array<State, kDenseTerms> f;

    double lo() const { return h >= 0.0 ? t_old : t_old + h; }
    double hi() const { return h >= 0.0 ? t_old + h : t_old; }
  };

  Trajectory() = default;

  /// Assembles a trajectory from dense segments and node data. Segments may be
  /// given in either time order; nodes are sorted on the way in.
  Trajectory(std::vector<Segment> segments, std::vector<double> node_times,
             std::vector<State> node_states, std::vector<State> node_derivatives);

  /// Cubic Hermite interpolation of sampled values and derivatives.
  static Trajectory from_samples(const std::vector<double>& times, const std::vector<State>& values,
                                 const std::vector<State>& derivatives);

  Interval span() const { return span_; }
  double t_begin() const { return span_.begin; }
  double t_end() const { return span_.end; }
  bool empty() const { return segments_.empty(); }
  Eigen::Index dimension() const { return segments_.empty() ? 0 : segments_.front().y_old.size(); }

  State operator()(double t) const;
  double component(double t, Eigen::Index i) const;
  /// Time derivative of the interpolant.
  State derivative(double t) const;

  const std::vector<double>& times() const { return node_times_; }
  const std::vector<State>& states() const { return node_states_; }
  const std::vector<State>& derivatives() const { return node_derivatives_; }
  std::size_t size() const { return node_times_.size(); }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Set when integration stopped before reaching the requested end because a
  /// stop condition fired (for example a blow-up or positivity guard).
  bool truncated() const { return truncated_; }
  void mark_truncated(bool value) { truncated_ = value; }

  /// Image under the linear map y -> map * y with time relabelled t -> t - shift.
  Trajectory mapped(const Eigen::MatrixXd& map, double time_shift = 0.0) const;

  /// Repeats the piece on [t_begin, t_begin + period] to cover `span`. The
  /// trajectory must cover exactly one period.
  Trajectory periodic_extension(double period, Interval span) const;

 private:
  const Segment& locate(double t) const;

  std::vector<Segment> segments_;
  std::vector<double> node_times_;
  std::vector<State> node_states_;
  std::vector<State> node_derivatives_;
  Interval span_{};
  bool truncated_ = false;
};

}  // namespace fowler
