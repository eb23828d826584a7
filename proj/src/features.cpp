#include "crowd/features.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace crowd {

std::array<double, kFeatureCount> CrowdFeatures::vector() const {
  std::array<double, kFeatureCount> v{};
  v[0] = gd;
  for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(1 + i)] = lam_hist_x[static_cast<std::size_t>(i)];
  for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(4 + i)] = lam_hist_y[static_cast<std::size_t>(i)];
  for (int i = 0; i < 8; ++i) v[static_cast<std::size_t>(7 + i)] = dir_hist[static_cast<std::size_t>(i)];
  return v;
}

CrowdFeatures CrowdFeatures::from_vector(const std::array<double, kFeatureCount>& v,
                                         std::optional<int> label) {
  CrowdFeatures f;
  f.gd = v[0];
  for (int i = 0; i < 3; ++i) f.lam_hist_x[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(1 + i)];
  for (int i = 0; i < 3; ++i) f.lam_hist_y[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(4 + i)];
  for (int i = 0; i < 8; ++i) f.dir_hist[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(7 + i)];
  f.label = label;
  return f;
}

int lambda_bin(double modulus) {
  if (modulus < 0.5) return 0;
  if (modulus < 1.0) return 1;
  return 2;
}

int direction_bin(double dx, double dy) {
  double angle = std::atan2(dy, dx);
  if (angle < 0) angle += 2.0 * M_PI;
  int bin = static_cast<int>(angle / (M_PI / 4.0));
  return bin >= 8 ? 0 : bin;  // 2*pi wraps to the first sector
}

CrowdFeatures extract_features(const TrackSet& tracks, const GroupPartition& partition,
                               const std::vector<GroupActivity>& activities, int agent_count,
                               const FeatureConfig& config) {
  if (partition.labels.empty()) throw Error(Errc::InvalidArgument, "empty partition");
  if (agent_count < 1) throw Error(Errc::InvalidArgument, "agent count must be positive");

  CrowdFeatures f;
  f.gd = static_cast<double>(partition.group_count()) / agent_count;

  for (const auto& ga : activities) {
    ++f.lam_hist_x[static_cast<std::size_t>(lambda_bin(ga.lam_max_x))];
    ++f.lam_hist_y[static_cast<std::size_t>(lambda_bin(ga.lam_max_y))];
  }

  FrameId end = partition.frame;
  FrameId start = end - config.L + 1;
  for (const auto& group : partition.groups()) {
    Eigen::Vector2d mean_disp = Eigen::Vector2d::Zero();
    for (AgentId id : group)
      mean_disp += tracks.position(id, end) - tracks.position(id, start);
    mean_disp /= static_cast<double>(group.size());
    if (mean_disp.norm() <= config.displacement_tol) continue;
    ++f.dir_hist[static_cast<std::size_t>(direction_bin(mean_disp.x(), mean_disp.y()))];
  }
  return f;
}

std::string class_name(int index) {
  if (index < 0 || index >= kCrowdClassCount)
    throw Error(Errc::InvalidArgument, "class index out of range");
  return "C" + std::to_string(index + 1);
}

int class_index(const std::string& name) {
  if (name.size() >= 2 && name[0] == 'C') {
    int v = 0;
    auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    if (ec == std::errc() && p == name.data() + name.size() && v >= 1 && v <= kCrowdClassCount)
      return v - 1;
  }
  throw Error(Errc::Parse, "unknown class '" + name + "' (expected C1..C8)");
}

namespace {

const char* kHeader =
    "gd,lamx_0,lamx_1,lamx_2,lamy_0,lamy_1,lamy_2,"
    "dir_0,dir_1,dir_2,dir_3,dir_4,dir_5,dir_6,dir_7,class";

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<CrowdFeatures> load_features_csv(std::istream& in) {
  std::vector<CrowdFeatures> out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;  // header row
    }
    std::stringstream ss(t);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != kFeatureCount + 1 && fields.size() != kFeatureCount)
      throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(kFeatureCount) +
                                   " features (+ optional class), got " +
                                   std::to_string(fields.size()) + " fields");
    std::array<double, kFeatureCount> v{};
    for (int i = 0; i < kFeatureCount; ++i) {
      const std::string& s = fields[static_cast<std::size_t>(i)];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v[static_cast<std::size_t>(i)]);
      if (ec != std::errc() || p != s.data() + s.size())
        throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": invalid number '" + s + "'");
    }
    std::optional<int> label;
    if (fields.size() == kFeatureCount + 1 && !fields.back().empty())
      label = class_index(fields.back());
    out.push_back(CrowdFeatures::from_vector(v, label));
  }
  if (!saw_header) throw Error(Errc::Parse, "empty feature CSV");
  return out;
}

void save_features_csv(std::ostream& out, const std::vector<CrowdFeatures>& rows) {
  out << kHeader << '\n';
  for (const auto& f : rows) {
    auto v = f.vector();
    for (int i = 0; i < kFeatureCount; ++i) {
      char buf[40];
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v[static_cast<std::size_t>(i)]);
      (void)ec;
      out.write(buf, p - buf);
      out << ',';
    }
    out << (f.label ? class_name(*f.label) : "") << '\n';
  }
}

}  // namespace crowd
