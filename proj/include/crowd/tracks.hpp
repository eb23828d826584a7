#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "crowd/error.hpp"

namespace crowd {

using AgentId = long;
using FrameId = long;

enum class Axis { X, Y };

inline const char* axis_name(Axis a) { return a == Axis::X ? "X" : "Y"; }

struct TrackPoint {
  FrameId frame = 0;
  AgentId agent = 0;
  double x = 0;
  double y = 0;
};

// Trajectories for one scene. Immutable once built; every agent covers a
// contiguous frame interval with no interior gaps.
class TrackSet {
 public:
  static TrackSet from_points(const std::vector<TrackPoint>& points);

  const std::vector<AgentId>& agents() const { return agent_ids_; }
  std::size_t agent_count() const { return agent_ids_.size(); }
  FrameId first_frame() const { return first_frame_; }
  FrameId last_frame() const { return last_frame_; }

  bool has_agent(AgentId id) const;
  FrameId track_first(AgentId id) const;
  FrameId track_last(AgentId id) const;
  bool has(AgentId id, FrameId frame) const;
  bool covers(AgentId id, FrameId from, FrameId to) const;
  double coord(AgentId id, FrameId frame, Axis axis) const;
  Eigen::Vector2d position(AgentId id, FrameId frame) const;

  std::vector<AgentId> agents_at(FrameId frame) const;
  std::vector<AgentId> agents_covering(FrameId from, FrameId to) const;
  std::vector<TrackPoint> points() const;  // frame-major order

 private:
  struct Track {
    FrameId first = 0;
    std::vector<double> x, y;
    FrameId last() const { return first + static_cast<FrameId>(x.size()) - 1; }
  };

  const Track& track(AgentId id) const;

  std::map<AgentId, Track> tracks_;
  std::vector<AgentId> agent_ids_;
  FrameId first_frame_ = 0;
  FrameId last_frame_ = 0;
};

enum class TrackFormat { Csv, Json };

TrackSet load_tracks(std::istream& in, TrackFormat format);
void save_tracks(std::ostream& out, const TrackSet& tracks, TrackFormat format);

// One axis over the last `length` frames ending at end_frame; row r holds the
// positions of agent_order[r] in chronological order.
struct AxisWindow {
  std::vector<AgentId> agent_order;
  Axis axis = Axis::X;
  Eigen::MatrixXd positions;  // agents x length
  FrameId end_frame = 0;
  int length = 0;
};

AxisWindow make_window(const TrackSet& tracks, const std::vector<AgentId>& agents,
                       FrameId end_frame, int length, Axis axis);

struct NeighborConfig {
  double frames_per_unknown = 2.5;
  double max_radius = std::numeric_limits<double>::infinity();
  double default_radius = 1.0;  // radius reported when no neighbor is kept
};

struct NeighborSelection {
  std::vector<AgentId> neighbors;  // sorted by distance, ties by id
  double radius = 0;
};

// Nearest other agents that fit the frame budget:
// frames_per_unknown * (|neighbors| + 2) <= budget_frames, where the +2 counts
// the self coefficient and the bias. Agents beyond max_radius are excluded.
// The relation is intentionally per-agent and not symmetric. When `candidates`
// is given, only those agents are considered.
NeighborSelection select_neighbors(const TrackSet& tracks, AgentId agent, FrameId frame,
                                   int budget_frames, const NeighborConfig& config,
                                   const std::vector<AgentId>* candidates = nullptr);

struct NeighborGraph {
  std::map<AgentId, std::vector<AgentId>> neighbors;
  std::map<AgentId, double> radii;
};

NeighborGraph build_neighbor_graph(const TrackSet& tracks, const std::vector<AgentId>& agents,
                                   FrameId frame, int budget_frames,
                                   const NeighborConfig& config);

}  // namespace crowd
