#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "crowd/activity.hpp"
#include "crowd/grouping.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

inline constexpr int kFeatureCount = 15;
inline constexpr int kCrowdClassCount = 8;

// Scene descriptor: group density, one eigenvalue histogram per axis and one
// direction histogram, 1 + 2*3 + 8 = 15 values.
struct CrowdFeatures {
  double gd = 0;
  std::array<double, 3> lam_hist_x{};
  std::array<double, 3> lam_hist_y{};
  std::array<double, 8> dir_hist{};
  std::optional<int> label;  // class index 0..7 (C1..C8)

  std::array<double, kFeatureCount> vector() const;
  static CrowdFeatures from_vector(const std::array<double, kFeatureCount>& v,
                                   std::optional<int> label);
};

struct FeatureConfig {
  int L = 25;                      // window for the displacement direction
  double displacement_tol = 1e-9;  // groups below this mean displacement skip dir_hist
};

// Eigenvalue bins: [0, 0.5), [0.5, 1.0), [1.0, inf). Direction bins: eight
// 45-degree sectors counterclockwise from +x.
int lambda_bin(double modulus);
int direction_bin(double dx, double dy);

CrowdFeatures extract_features(const TrackSet& tracks, const GroupPartition& partition,
                               const std::vector<GroupActivity>& activities, int agent_count,
                               const FeatureConfig& config);

std::string class_name(int index);     // 0 -> "C1"
int class_index(const std::string&);   // "C1" -> 0

// CSV with the 15 feature columns plus a trailing `class` column.
std::vector<CrowdFeatures> load_features_csv(std::istream& in);
void save_features_csv(std::ostream& out, const std::vector<CrowdFeatures>& rows);

}  // namespace crowd
