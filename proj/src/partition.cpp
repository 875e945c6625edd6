#include "spaql/partition.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace spaql {

namespace {

// [center - r, center + r), closed when center + r reaches the upper bound.
inline bool in_interval(double center, double radius, double x) {
  const double lo = center - radius;
  const double hi = center + radius;
  return x >= lo && (x < hi || (hi >= 1.0 && x <= hi));
}

}  // namespace

bool state_in_ball(const Ball& ball, double state) {
  return in_interval(ball.center_state, ball.radius, state);
}

bool contains(const Ball& ball, Point p) {
  return in_interval(ball.center_state, ball.radius, p.state) &&
         in_interval(ball.center_action, ball.radius, p.action);
}

bool should_split(const Ball& ball, double d_max) {
  const double ratio = d_max / ball.radius;
  return static_cast<double>(ball.visit_count) >= ratio * ratio;
}

PartitionTree::PartitionTree(double initial_q, double d_max) : d_max_(d_max) {
  Ball root_ball;
  root_ball.q_estimate = initial_q;
  balls_.push_back(root_ball);
}

PartitionTree new_partition(double initial_q) {
  if (!(initial_q >= 0.0)) {
    throw std::invalid_argument("new_partition: initial_q must be non-negative");
  }
  return PartitionTree(initial_q, 1.0);
}

void PartitionTree::relevant_balls(double state, std::vector<BallId>& out) const {
  out.clear();
  // Each level admits at most two children per visited node, so an explicit
  // stack of modest size suffices.
  BallId stack[256];
  int top = 0;
  stack[top++] = root();
  while (top > 0) {
    const BallId id = stack[--top];
    const Ball& b = ball(id);
    if (b.is_leaf()) {
      out.push_back(id);
      continue;
    }
    // Push in reverse so children pop in order 0..3.
    for (int k = 3; k >= 0; --k) {
      const BallId child = b.first_child + k;
      if (state_in_ball(ball(child), state)) {
        if (top == static_cast<int>(std::size(stack))) {
          throw std::length_error("relevant_balls: partition too deep");
        }
        stack[top++] = child;
      }
    }
  }
}

std::vector<BallId> PartitionTree::relevant_balls(double state) const {
  std::vector<BallId> out;
  relevant_balls(state, out);
  return out;
}

BallId PartitionTree::locate(Point p) const {
  BallId id = root();
  while (!ball(id).is_leaf()) {
    const Ball& b = ball(id);
    BallId next = kNoBall;
    for (int k = 0; k < 4; ++k) {
      if (contains(ball(b.first_child + k), p)) {
        next = b.first_child + k;
        break;
      }
    }
    if (next == kNoBall) return kNoBall;
    id = next;
  }
  return contains(ball(id), p) ? id : kNoBall;
}

BallId PartitionTree::select_greedy(double state) const {
  BallId best = kNoBall;
  double best_q = -std::numeric_limits<double>::infinity();
  BallId stack[256];
  int top = 0;
  stack[top++] = root();
  while (top > 0) {
    const BallId id = stack[--top];
    const Ball& b = ball(id);
    if (b.is_leaf()) {
      if (best == kNoBall || b.q_estimate > best_q) {
        best = id;
        best_q = b.q_estimate;
      }
      continue;
    }
    for (int k = 3; k >= 0; --k) {
      const BallId child = b.first_child + k;
      if (state_in_ball(ball(child), state)) stack[top++] = child;
    }
  }
  return best;
}

double PartitionTree::max_relevant_q(double state) const {
  return ball(select_greedy(state)).q_estimate;
}

double PartitionTree::value_estimate(double state, int horizon) const {
  return std::min(static_cast<double>(horizon), max_relevant_q(state));
}

void PartitionTree::split(BallId id) {
  if (!ball(id).is_leaf()) {
    throw std::logic_error("split: ball already has children");
  }
  const Ball parent = ball(id);
  const double half = parent.radius / 2.0;
  const auto first = static_cast<BallId>(balls_.size());
  for (int k = 0; k < 4; ++k) {
    Ball child;
    child.center_state = parent.center_state + ((k & 2) ? half : -half);
    child.center_action = parent.center_action + ((k & 1) ? half : -half);
    child.radius = half;
    child.q_estimate = parent.q_estimate;
    child.visit_count = parent.visit_count;
    child.depth = parent.depth + 1;
    balls_.push_back(child);
  }
  ball(id).first_child = first;
  ++split_count_;
}

bool PartitionTree::should_split(BallId id) const {
  return spaql::should_split(ball(id), d_max_);
}

std::vector<BallId> PartitionTree::leaves() const {
  std::vector<BallId> out;
  out.reserve(static_cast<std::size_t>(num_arms()));
  std::vector<BallId> stack{root()};
  while (!stack.empty()) {
    const BallId id = stack.back();
    stack.pop_back();
    const Ball& b = ball(id);
    if (b.is_leaf()) {
      out.push_back(id);
    } else {
      for (int k = 3; k >= 0; --k) stack.push_back(b.first_child + k);
    }
  }
  return out;
}

std::vector<LeafRecord> PartitionTree::export_geometry() const {
  std::vector<LeafRecord> out;
  for (BallId id : leaves()) {
    const Ball& b = ball(id);
    out.push_back({b.center_state, b.center_action, b.radius, b.q_estimate, b.visit_count});
  }
  return out;
}

void write_geometry_csv(std::ostream& os, const std::vector<LeafRecord>& leaves) {
  const auto old_precision = os.precision(12);
  os << "center_state,center_action,radius,q,visits\n";
  for (const auto& r : leaves) {
    os << r.center_state << ',' << r.center_action << ',' << r.radius << ','
       << r.q_estimate << ',' << r.visit_count << '\n';
  }
  os.precision(old_precision);
}

}  // namespace spaql
