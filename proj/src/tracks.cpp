#include "crowd/tracks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace crowd {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

long parse_long(const std::string& s, std::size_t line_no, const char* what) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(Errc::Parse,
                "line " + std::to_string(line_no) + ": invalid " + what + " '" + s + "'");
  if (v < 0)
    throw Error(Errc::Parse,
                "line " + std::to_string(line_no) + ": " + what + " must be non-negative");
  return v;
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(Errc::Parse,
                "line " + std::to_string(line_no) + ": invalid " + what + " '" + s + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

TrackSet TrackSet::from_points(const std::vector<TrackPoint>& points) {
  if (points.empty()) throw Error(Errc::InsufficientData, "no agents");

  std::map<AgentId, std::vector<std::pair<FrameId, Eigen::Vector2d>>> by_agent;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(Errc::InvalidArgument, "non-finite position for agent " +
                                             std::to_string(p.agent) + " at frame " +
                                             std::to_string(p.frame));
    by_agent[p.agent].emplace_back(p.frame, Eigen::Vector2d(p.x, p.y));
  }

  TrackSet out;
  out.first_frame_ = std::numeric_limits<FrameId>::max();
  out.last_frame_ = std::numeric_limits<FrameId>::min();
  for (auto& [id, rows] : by_agent) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Track t;
    t.first = rows.front().first;
    FrameId expect = t.first;
    for (const auto& [frame, pos] : rows) {
      if (frame == expect - 1)
        throw Error(Errc::DuplicateEntry, "duplicate entry for agent " + std::to_string(id) +
                                              " at frame " + std::to_string(frame));
      if (frame > expect)
        throw Error(Errc::FrameGap, "agent " + std::to_string(id) + " is missing frame " +
                                        std::to_string(expect));
      t.x.push_back(pos.x());
      t.y.push_back(pos.y());
      expect = frame + 1;
    }
    out.first_frame_ = std::min(out.first_frame_, t.first);
    out.last_frame_ = std::max(out.last_frame_, t.last());
    out.agent_ids_.push_back(id);
    out.tracks_.emplace(id, std::move(t));
  }
  if (out.last_frame_ <= out.first_frame_)
    throw Error(Errc::InsufficientData, "fewer than 2 frames");
  return out;
}

const TrackSet::Track& TrackSet::track(AgentId id) const {
  auto it = tracks_.find(id);
  if (it == tracks_.end())
    throw Error(Errc::MissingData, "unknown agent " + std::to_string(id));
  return it->second;
}

bool TrackSet::has_agent(AgentId id) const { return tracks_.count(id) > 0; }

FrameId TrackSet::track_first(AgentId id) const { return track(id).first; }

FrameId TrackSet::track_last(AgentId id) const { return track(id).last(); }

bool TrackSet::has(AgentId id, FrameId frame) const {
  auto it = tracks_.find(id);
  if (it == tracks_.end()) return false;
  return frame >= it->second.first && frame <= it->second.last();
}

bool TrackSet::covers(AgentId id, FrameId from, FrameId to) const {
  auto it = tracks_.find(id);
  if (it == tracks_.end()) return false;
  return it->second.first <= from && it->second.last() >= to;
}

double TrackSet::coord(AgentId id, FrameId frame, Axis axis) const {
  const Track& t = track(id);
  if (frame < t.first || frame > t.last())
    throw Error(Errc::MissingData, "agent " + std::to_string(id) + " has no frame " +
                                       std::to_string(frame));
  std::size_t i = static_cast<std::size_t>(frame - t.first);
  return axis == Axis::X ? t.x[i] : t.y[i];
}

Eigen::Vector2d TrackSet::position(AgentId id, FrameId frame) const {
  return {coord(id, frame, Axis::X), coord(id, frame, Axis::Y)};
}

std::vector<AgentId> TrackSet::agents_at(FrameId frame) const {
  std::vector<AgentId> out;
  for (const auto& [id, t] : tracks_)
    if (frame >= t.first && frame <= t.last()) out.push_back(id);
  return out;
}

std::vector<AgentId> TrackSet::agents_covering(FrameId from, FrameId to) const {
  std::vector<AgentId> out;
  for (const auto& [id, t] : tracks_)
    if (t.first <= from && t.last() >= to) out.push_back(id);
  return out;
}

std::vector<TrackPoint> TrackSet::points() const {
  std::vector<TrackPoint> out;
  for (FrameId f = first_frame_; f <= last_frame_; ++f)
    for (const auto& [id, t] : tracks_)
      if (f >= t.first && f <= t.last()) {
        std::size_t i = static_cast<std::size_t>(f - t.first);
        out.push_back({f, id, t.x[i], t.y[i]});
      }
  return out;
}

TrackSet load_tracks(std::istream& in, TrackFormat format) {
  std::vector<TrackPoint> points;
  if (format == TrackFormat::Csv) {
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty()) continue;
      if (!saw_header) {
        auto fields = split_csv(t);
        if (fields != std::vector<std::string>{"frame", "agent_id", "x", "y"})
          throw Error(Errc::Parse,
                      "line " + std::to_string(line_no) + ": expected header frame,agent_id,x,y");
        saw_header = true;
        continue;
      }
      auto fields = split_csv(t);
      if (fields.size() != 4)
        throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                     std::to_string(fields.size()));
      TrackPoint p;
      p.frame = parse_long(fields[0], line_no, "frame");
      p.agent = parse_long(fields[1], line_no, "agent_id");
      p.x = parse_double(fields[2], line_no, "x");
      p.y = parse_double(fields[3], line_no, "y");
      points.push_back(p);
    }
    if (!saw_header) throw Error(Errc::InsufficientData, "no agents");
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Parse, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error(Errc::Parse, "expected a JSON array of track points");
    std::size_t idx = 0;
    for (const auto& item : doc) {
      ++idx;
      try {
        TrackPoint p;
        p.frame = item.at("frame").get<FrameId>();
        p.agent = item.at("agent_id").get<AgentId>();
        p.x = item.at("x").get<double>();
        p.y = item.at("y").get<double>();
        if (p.frame < 0 || p.agent < 0)
          throw Error(Errc::Parse, "entry " + std::to_string(idx) +
                                       ": frame and agent_id must be non-negative");
        points.push_back(p);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Parse, "entry " + std::to_string(idx) + ": " + e.what());
      }
    }
  }
  return TrackSet::from_points(points);
}

void save_tracks(std::ostream& out, const TrackSet& tracks, TrackFormat format) {
  auto points = tracks.points();
  if (format == TrackFormat::Csv) {
    out << "frame,agent_id,x,y\n";
    for (const auto& p : points)
      out << p.frame << ',' << p.agent << ',' << format_double(p.x) << ','
          << format_double(p.y) << '\n';
  } else {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : points)
      doc.push_back({{"frame", p.frame}, {"agent_id", p.agent}, {"x", p.x}, {"y", p.y}});
    out << doc.dump(2) << '\n';
  }
}

AxisWindow make_window(const TrackSet& tracks, const std::vector<AgentId>& agents,
                       FrameId end_frame, int length, Axis axis) {
  if (length < 2) throw Error(Errc::InvalidArgument, "window length must be at least 2");
  if (agents.empty()) throw Error(Errc::InvalidArgument, "window needs at least one agent");
  FrameId start = end_frame - length + 1;
  AxisWindow w;
  w.agent_order = agents;
  w.axis = axis;
  w.end_frame = end_frame;
  w.length = length;
  w.positions.resize(static_cast<Eigen::Index>(agents.size()), length);
  for (std::size_t r = 0; r < agents.size(); ++r) {
    if (!tracks.covers(agents[r], start, end_frame))
      throw Error(Errc::MissingData, "agent " + std::to_string(agents[r]) +
                                         " does not cover frames [" + std::to_string(start) +
                                         ", " + std::to_string(end_frame) + "]");
    for (int c = 0; c < length; ++c)
      w.positions(static_cast<Eigen::Index>(r), c) = tracks.coord(agents[r], start + c, axis);
  }
  return w;
}

NeighborSelection select_neighbors(const TrackSet& tracks, AgentId agent, FrameId frame,
                                   int budget_frames, const NeighborConfig& config,
                                   const std::vector<AgentId>* candidates) {
  if (config.frames_per_unknown <= 0)
    throw Error(Errc::InvalidArgument, "frames_per_unknown must be positive");
  if (static_cast<double>(budget_frames) < 2.0 * config.frames_per_unknown)
    throw Error(Errc::InvalidArgument,
                "frame budget too small for the self coefficient and bias");
  if (!tracks.has(agent, frame))
    throw Error(Errc::MissingData, "agent " + std::to_string(agent) + " not present at frame " +
                                       std::to_string(frame));

  // largest n with frames_per_unknown * (n + 2) <= budget
  int max_neighbors =
      static_cast<int>(std::floor(budget_frames / config.frames_per_unknown - 2.0 + 1e-9));

  Eigen::Vector2d here = tracks.position(agent, frame);
  std::vector<AgentId> pool = candidates ? *candidates : tracks.agents_at(frame);
  std::vector<std::pair<double, AgentId>> ranked;
  for (AgentId other : pool) {
    if (other == agent || !tracks.has(other, frame)) continue;
    double d = (tracks.position(other, frame) - here).norm();
    if (d <= config.max_radius) ranked.emplace_back(d, other);
  }
  std::sort(ranked.begin(), ranked.end());

  NeighborSelection sel;
  int keep = std::min<int>(max_neighbors, static_cast<int>(ranked.size()));
  for (int i = 0; i < keep; ++i) sel.neighbors.push_back(ranked[i].second);
  sel.radius = keep > 0 ? ranked[keep - 1].first : config.default_radius;
  return sel;
}

NeighborGraph build_neighbor_graph(const TrackSet& tracks, const std::vector<AgentId>& agents,
                                   FrameId frame, int budget_frames,
                                   const NeighborConfig& config) {
  NeighborGraph g;
  for (AgentId a : agents) {
    auto sel = select_neighbors(tracks, a, frame, budget_frames, config);
    g.neighbors[a] = std::move(sel.neighbors);
    g.radii[a] = sel.radius;
  }
  return g;
}

}  // namespace crowd
