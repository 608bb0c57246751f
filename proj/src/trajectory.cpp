#include "fowler/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fowler {

namespace {

bool within(double t, Interval span) {
  const double slack = 1e-13 * (1.0 + std::abs(t));
  return t >= span.begin - slack && t <= span.end + slack;
}

}  // namespace

Trajectory::Trajectory(std::vector<Segment> segments, std::vector<double> node_times,
                       std::vector<State> node_states, std::vector<State> node_derivatives)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw std::invalid_argument("trajectory needs at least one segment");
  }
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& a, const Segment& b) { return a.lo() < b.lo(); });
  span_ = {segments_.front().lo(), segments_.back().hi()};

  std::vector<std::size_t> order(node_times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return node_times[a] < node_times[b]; });
  node_times_.reserve(order.size());
  node_states_.reserve(order.size());
  node_derivatives_.reserve(order.size());
  for (std::size_t k : order) {
    node_times_.push_back(node_times[k]);
    node_states_.push_back(std::move(node_states[k]));
    node_derivatives_.push_back(std::move(node_derivatives[k]));
  }
}

Trajectory Trajectory::from_samples(const std::vector<double>& times,
                                    const std::vector<State>& values,
                                    const std::vector<State>& derivatives) {
  if (times.size() < 2 || values.size() != times.size() || derivatives.size() != times.size()) {
    throw std::invalid_argument("from_samples needs >= 2 consistent samples");
  }
  std::vector<Segment> segs;
  segs.reserve(times.size() - 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    if (!(h > 0.0)) throw std::invalid_argument("sample times must be strictly increasing");
    Segment s;
    s.t_old = times[k];
    s.h = h;
    s.y_old = values[k];
    const State dy = values[k + 1] - values[k];
    s.f[0] = dy;
    s.f[1] = h * derivatives[k] - dy;
    s.f[2] = 2.0 * dy - h * (derivatives[k + 1] + derivatives[k]);
    for (int j = 3; j < kDenseTerms; ++j) s.f[j] = State::Zero(dy.size());
    segs.push_back(std::move(s));
  }
  return Trajectory(std::move(segs), times, values, derivatives);
}

const Trajectory::Segment& Trajectory::locate(double t) const {
  if (segments_.empty() || !within(t, span_)) {
    throw OutOfSpan("time " + std::to_string(t) + " outside trajectory span [" +
                    std::to_string(span_.begin) + ", " + std::to_string(span_.end) + "]");
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const Segment& s) { return value < s.lo(); });
  if (it == segments_.begin()) return segments_.front();
  return *std::prev(it);
}

State Trajectory::operator()(double t) const {
  const Segment& s = locate(t);
  const double x = (t - s.t_old) / s.h;
  State y = State::Zero(s.y_old.size());
  for (int k = kDenseTerms - 1; k >= 0; --k) {
    y += s.f[k];
    // F_k with even k is multiplied by x, odd k by (1 - x).
    y *= (k % 2 == 0) ? x : (1.0 - x);
  }
  return y + s.y_old;
}

double Trajectory::component(double t, Eigen::Index i) const { return (*this)(t)[i]; }

State Trajectory::derivative(double t) const {
  const Segment& s = locate(t);
  const double x = (t - s.t_old) / s.h;
  const Eigen::Index n = s.y_old.size();
  State y = State::Zero(n);
  State dy = State::Zero(n);
  for (int k = kDenseTerms - 1; k >= 0; --k) {
    y += s.f[k];
    if (k % 2 == 0) {
      dy = dy * x + y;
      y *= x;
    } else {
      dy = dy * (1.0 - x) - y;
      y *= (1.0 - x);
    }
  }
  return dy / s.h;
}

Trajectory Trajectory::mapped(const Eigen::MatrixXd& map, double time_shift) const {
  std::vector<Segment> segs;
  segs.reserve(segments_.size());
  for (const Segment& s : segments_) {
    Segment m;
    m.t_old = s.t_old - time_shift;
    m.h = s.h;
    m.y_old = map * s.y_old;
    for (int k = 0; k < kDenseTerms; ++k) m.f[k] = map * s.f[k];
    segs.push_back(std::move(m));
  }
  std::vector<double> times;
  std::vector<State> states;
  std::vector<State> ders;
  times.reserve(node_times_.size());
  for (std::size_t k = 0; k < node_times_.size(); ++k) {
    times.push_back(node_times_[k] - time_shift);
    states.push_back(map * node_states_[k]);
    ders.push_back(map * node_derivatives_[k]);
  }
  Trajectory out(std::move(segs), std::move(times), std::move(states), std::move(ders));
  out.span_ = {span_.begin - time_shift, span_.end - time_shift};
  out.truncated_ = truncated_;
  return out;
}

Trajectory Trajectory::periodic_extension(double period, Interval span) const {
  if (!(period > 0.0) || !(span.end > span.begin)) {
    throw std::invalid_argument("periodic_extension needs a positive period and a nondegenerate span");
  }
  if (std::abs(span_.length() - period) > 1e-9 * (1.0 + period)) {
    throw std::invalid_argument("periodic_extension requires a trajectory covering exactly one period");
  }
  const double base = span_.begin;
  const auto first = static_cast<long>(std::floor((span.begin - base) / period));
  const auto last = static_cast<long>(std::floor((span.end - base) / period));
  std::vector<Segment> segs;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<State> ders;
  for (long copy = first; copy <= last; ++copy) {
    const double offset = static_cast<double>(copy) * period;
    for (const Segment& s : segments_) {
      if (s.hi() + offset < span.begin || s.lo() + offset > span.end) continue;
      Segment c = s;
      c.t_old += offset;
      segs.push_back(std::move(c));
    }
    for (std::size_t k = 0; k < node_times_.size(); ++k) {
      const double t = node_times_[k] + offset;
      // Skip the duplicated endpoint shared by consecutive copies.
      if (k + 1 == node_times_.size() && copy != last) continue;
      if (t < span.begin || t > span.end) continue;
      times.push_back(t);
      states.push_back(node_states_[k]);
      ders.push_back(node_derivatives_[k]);
    }
  }
  Trajectory out(std::move(segs), std::move(times), std::move(states), std::move(ders));
  out.span_ = span;
  return out;
}

}  // namespace fowler
