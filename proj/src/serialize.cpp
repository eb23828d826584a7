#include "crowd/serialize.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace crowd {

using nlohmann::json;

json model_to_json(const InteractionModel& model) {
  model.validate();
  json j;
  j["axis"] = axis_name(model.axis);
  j["agent_order"] = model.agent_order;
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(model.A.size()));
  for (Eigen::Index r = 0; r < model.A.rows(); ++r)
    for (Eigen::Index c = 0; c < model.A.cols(); ++c) a.push_back(model.A(r, c));
  j["A"] = a;
  j["bias"] = std::vector<double>(model.bias.data(), model.bias.data() + model.bias.size());
  return j;
}

InteractionModel model_from_json(const json& j) {
  try {
    InteractionModel m;
    std::string axis = j.at("axis").get<std::string>();
    if (axis != "X" && axis != "Y") throw Error(Errc::Parse, "axis must be X or Y");
    m.axis = axis == "X" ? Axis::X : Axis::Y;
    m.agent_order = j.at("agent_order").get<std::vector<AgentId>>();
    auto a = j.at("A").get<std::vector<double>>();
    auto bias = j.at("bias").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(m.agent_order.size());
    if (static_cast<Eigen::Index>(a.size()) != n * n ||
        static_cast<Eigen::Index>(bias.size()) != n)
      throw Error(Errc::Parse, "model dimensions do not match agent_order");
    m.A.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        m.A(r, c) = a[static_cast<std::size_t>(r * n + c)];
    m.bias = Eigen::Map<Eigen::VectorXd>(bias.data(), n);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad model JSON: ") + e.what());
  }
}

json partition_to_json(const GroupPartition& partition) {
  json j;
  j["frame"] = partition.frame;
  j["groups"] = partition.groups();
  return j;
}

GroupPartition partition_from_json(const json& j) {
  try {
    auto groups = j.at("groups").get<std::vector<std::vector<AgentId>>>();
    return GroupPartition::from_groups(j.at("frame").get<FrameId>(), groups);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad partition JSON: ") + e.what());
  }
}

json activity_to_json(FrameId frame, const std::vector<GroupActivity>& groups,
                      const std::vector<AtomicActivity>& atomic) {
  json j;
  j["frame"] = frame;
  j["groups"] = json::array();
  for (const auto& g : groups) {
    json a;
    a["members"] = g.members;
    a["mu_x"] = g.mu_x ? json(*g.mu_x) : json(nullptr);
    a["mu_y"] = g.mu_y ? json(*g.mu_y) : json(nullptr);
    a["label"] = to_string(g.label);
    j["groups"].push_back(a);
  }
  j["atomic"] = json::array();
  for (const auto& a : atomic)
    j["atomic"].push_back({{"agent", a.agent}, {"label", to_string(a.label)}});
  return j;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["frames"] = spec.frames;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  j["groups"] = json::array();
  for (const auto& g : spec.groups) {
    json gj;
    gj["size"] = g.size;
    gj["pattern"] = to_string(g.pattern);
    gj["anchor"] = {g.anchor.x(), g.anchor.y()};
    if (g.pattern == MotionPattern::Walking) gj["velocity"] = {g.velocity.x(), g.velocity.y()};
    if (g.pattern == MotionPattern::Approaching || g.pattern == MotionPattern::Splitting)
      gj["rate"] = g.rate;
    gj["spacing"] = g.spacing;
    j["groups"].push_back(gj);
  }
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  try {
    ScenarioSpec spec;
    spec.frames = j.at("frames").get<int>();
    spec.noise_sigma = j.value("noise_sigma", 0.0);
    spec.seed = j.value("seed", static_cast<uint64_t>(0));
    for (const auto& gj : j.at("groups")) {
      GroupSpec g;
      g.size = gj.at("size").get<int>();
      g.pattern = pattern_from_string(gj.at("pattern").get<std::string>());
      auto anchor = gj.at("anchor").get<std::vector<double>>();
      if (anchor.size() != 2) throw Error(Errc::Parse, "anchor must have 2 coordinates");
      g.anchor = {anchor[0], anchor[1]};
      if (gj.contains("velocity")) {
        auto v = gj.at("velocity").get<std::vector<double>>();
        if (v.size() != 2) throw Error(Errc::Parse, "velocity must have 2 coordinates");
        g.velocity = {v[0], v[1]};
      }
      if (gj.contains("rate")) g.rate = gj.at("rate").get<double>();
      g.spacing = gj.value("spacing", 1.0);
      spec.groups.push_back(g);
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad scenario JSON: ") + e.what());
  }
}

json truth_to_json(const LabeledScene& scene) {
  json j;
  j["frames"] = scene.tracks.last_frame() - scene.tracks.first_frame() + 1;
  j["partition"] = partition_to_json(scene.partition);
  std::vector<std::string> labels;
  for (ActivityLabel l : scene.activities) labels.emplace_back(to_string(l));
  j["activities"] = labels;
  return j;
}

void truth_from_json(const json& j, GroupPartition& partition,
                     std::vector<ActivityLabel>& activities) {
  try {
    partition = partition_from_json(j.at("partition"));
    activities.clear();
    for (const auto& name : j.at("activities"))
      activities.push_back(activity_from_string(name.get<std::string>()));
    if (static_cast<int>(activities.size()) != partition.group_count())
      throw Error(Errc::Parse, "activity list does not match the group count");
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad ground-truth JSON: ") + e.what());
  }
}

json forest_to_json(const Forest& forest) {
  if (!forest.trained()) throw Error(Errc::InvalidArgument, "forest is untrained");
  json j;
  j["num_trees"] = static_cast<int>(forest.trees.size());
  j["m"] = forest.m;
  j["class_count"] = forest.class_count;
  j["seed"] = forest.seed;
  j["oob_error"] = forest.oob_error;
  j["importance"] = forest.importance;
  j["trees"] = json::array();
  for (const Tree& t : forest.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"leaf_class", n.leaf_class}});
    j["trees"].push_back(nodes);
  }
  return j;
}

Forest forest_from_json(const json& j) {
  try {
    Forest forest;
    forest.m = j.at("m").get<int>();
    forest.class_count = j.at("class_count").get<int>();
    forest.seed = j.at("seed").get<uint64_t>();
    forest.oob_error = j.at("oob_error").get<double>();
    auto imp = j.at("importance").get<std::vector<double>>();
    if (imp.size() != kFeatureCount) throw Error(Errc::Parse, "importance must have 15 entries");
    std::copy(imp.begin(), imp.end(), forest.importance.begin());
    for (const auto& tj : j.at("trees")) {
      Tree t;
      for (const auto& nj : tj) {
        TreeNode n;
        n.feature = nj.at("feature").get<int>();
        n.threshold = nj.at("threshold").get<double>();
        n.left = nj.at("left").get<int>();
        n.right = nj.at("right").get<int>();
        n.leaf_class = nj.at("leaf_class").get<int>();
        if (n.feature >= kFeatureCount || (n.feature < 0 && n.leaf_class < 0))
          throw Error(Errc::Parse, "malformed tree node");
        t.nodes.push_back(n);
      }
      if (t.nodes.empty()) throw Error(Errc::Parse, "empty tree");
      forest.trees.push_back(std::move(t));
    }
    if (forest.trees.empty()) throw Error(Errc::Parse, "forest has no trees");
    if (static_cast<int>(forest.trees.size()) != j.at("num_trees").get<int>())
      throw Error(Errc::Parse, "num_trees does not match the tree list");
    return forest;
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad forest JSON: ") + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, path + ": " + e.what());
  }
}

}  // namespace crowd
