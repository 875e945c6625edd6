#ifndef SPAQL_PARTITION_HPP
#define SPAQL_PARTITION_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace spaql {

/// A state-action pair in the unit square.
struct Point {
  double state = 0.0;
  double action = 0.0;
};

using BallId = std::int32_t;
inline constexpr BallId kNoBall = -1;

/// One square region of the discretization. Under the max metric a ball of
/// radius r around (cs, ca) is the square [cs-r, cs+r) x [ca-r, ca+r).
struct Ball {
  double center_state = 0.5;
  double center_action = 0.5;
  double radius = 0.5;
  double q_estimate = 0.0;
  std::int64_t visit_count = 0;
  BallId first_child = kNoBall;  // children occupy [first_child, first_child + 4)
  std::int32_t depth = 0;

  bool is_leaf() const { return first_child == kNoBall; }

  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Flat record of a leaf, used for geometry export.
struct LeafRecord {
  double center_state;
  double center_action;
  double radius;
  double q_estimate;
  std::int64_t visit_count;
};

/// Adaptive quadtree discretization of [0,1]^2.
///
/// Balls live in a contiguous arena and are addressed by BallId; the root is
/// always id 0. Children of a ball are stored contiguously in the order
/// (-,-), (-,+), (+,-), (+,+) relative to the parent's (state, action) center.
/// Copying a tree yields a fully independent tree.
class PartitionTree {
 public:
  explicit PartitionTree(double initial_q = 0.0, double d_max = 1.0);

  static constexpr BallId root() { return 0; }

  const Ball& ball(BallId id) const { return balls_[static_cast<std::size_t>(id)]; }
  Ball& ball(BallId id) { return balls_[static_cast<std::size_t>(id)]; }

  double d_max() const { return d_max_; }
  std::int64_t split_count() const { return split_count_; }
  std::int64_t num_arms() const { return 1 + 3 * split_count_; }
  std::size_t size() const { return balls_.size(); }

  /// Appends the ids of every leaf whose state interval contains `state`, in
  /// depth-first child order. `out` is cleared first.
  void relevant_balls(double state, std::vector<BallId>& out) const;
  std::vector<BallId> relevant_balls(double state) const;

  /// The leaf containing `p`. Exactly one exists for any p in [0,1]^2.
  BallId locate(Point p) const;

  /// Relevant leaf with the largest Q; ties go to the first in traversal order.
  BallId select_greedy(double state) const;

  /// Largest Q over the relevant leaves, uncapped.
  double max_relevant_q(double state) const;

  /// min(horizon, max relevant Q).
  double value_estimate(double state, int horizon) const;

  /// Replaces a leaf by four half-radius children inheriting its Q and visits.
  /// Throws std::logic_error if the ball already has children.
  void split(BallId id);

  /// Visit threshold (d_max / r)^2.
  bool should_split(BallId id) const;

  /// Leaves in depth-first child order.
  std::vector<LeafRecord> export_geometry() const;
  std::vector<BallId> leaves() const;

  friend bool operator==(const PartitionTree& a, const PartitionTree& b) = default;

 private:
  std::vector<Ball> balls_;
  double d_max_;
  std::int64_t split_count_ = 0;
};

PartitionTree new_partition(double initial_q);

/// Half-open membership, closed on the side touching the global upper bound 1.
bool contains(const Ball& ball, Point p);
bool state_in_ball(const Ball& ball, double state);
bool should_split(const Ball& ball, double d_max);

/// Writes the geometry CSV (`center_state,center_action,radius,q,visits`).
void write_geometry_csv(std::ostream& os, const std::vector<LeafRecord>& leaves);

}  // namespace spaql

#endif  // SPAQL_PARTITION_HPP
