#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "crowd/dynamics.hpp"
#include "crowd/grouping.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

enum class ActivityLabel { Stationary, Stopping, Approaching, Walking, Splitting };

const char* to_string(ActivityLabel label);
ActivityLabel activity_from_string(const std::string& name);

struct ActivityBands {
  double one_lo = 0.995;
  double one_hi = 1.005;
  double zero_hi = 0.5;
  double coeff_rel_tol = 1e-6;  // |c|, |d| below coeff_rel_tol * |x0| count as zero

  bool in_one(double modulus) const { return modulus > one_lo && modulus < one_hi; }
  bool in_zero(double modulus) const { return modulus < zero_hi; }
  void validate() const;
};

struct ActivityConfig {
  int L = 25;
  double r1 = 1.0;
  ActivityBands bands;
  double cond_bound = 1e8;
};

// Eq.-5-style fit for one group: least squares plus the temporal smoothness
// term, no sparsity and no neighborhood restriction. Returns the X and Y axis
// models. Without a previous estimate the smoothness term shrinks toward zero;
// rank-deficient directions resolve to the minimum-deviation solution.
std::pair<InteractionModel, InteractionModel> estimate_group_model(
    const TrackSet& tracks, const std::vector<AgentId>& group, FrameId end_frame, int L, double r1,
    const std::pair<InteractionModel, InteractionModel>* prev = nullptr);

// Largest-modulus eigenvalue whose mode contributes velocity: a mode inside
// the one-band counts only through d (its c term is a constant position), any
// other mode counts through c or d. nullopt when every motion mode is silent.
std::optional<std::complex<double>> deciding_eigenvalue(const ModalDecomposition& decomp,
                                                        const ActivityBands& bands,
                                                        double x0_norm);

ActivityLabel classify_group_axis(const std::optional<std::complex<double>>& mu,
                                  const ActivityBands& bands);

// Priority merge: Splitting > Walking > Approaching > Stationary.
ActivityLabel merge_axis_activity(ActivityLabel ax, ActivityLabel ay);

struct AtomicActivity {
  AgentId agent = 0;
  double mu_x = 0, b_x = 0;
  double mu_y = 0, b_y = 0;
  ActivityLabel label_x = ActivityLabel::Stationary;
  ActivityLabel label_y = ActivityLabel::Stationary;
  ActivityLabel label = ActivityLabel::Stationary;
};

// Scalar fit x(k+1) = mu x(k) + b per axis; the smoothness reference is the
// identity dynamics (mu=1, b=0), so a constant track resolves to exactly that
// and reads as stationary. Axis merge: Walking > Stopping > Stationary.
AtomicActivity classify_atomic(const TrackSet& tracks, AgentId agent, FrameId end_frame,
                               const ActivityConfig& config);

struct GroupActivity {
  int group_id = 0;
  std::vector<AgentId> members;
  std::optional<double> mu_x, mu_y;  // deciding eigenvalue modulus per axis
  double lam_max_x = 0, lam_max_y = 0;
  ActivityLabel label_x = ActivityLabel::Stationary;
  ActivityLabel label_y = ActivityLabel::Stationary;
  ActivityLabel label = ActivityLabel::Stationary;
  bool atomic = false;  // singleton classified with the atomic rules
};

// Group re-estimation + modal analysis for every group of the partition.
// Singletons keep the atomic vocabulary (a lone agent can be Stopping).
std::vector<GroupActivity> classify_groups(const TrackSet& tracks,
                                           const GroupPartition& partition,
                                           const ActivityConfig& config);

}  // namespace crowd
