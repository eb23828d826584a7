#include "crowd/pipeline.hpp"

namespace crowd {

ActivityConfig PipelineConfig::activity() const {
  ActivityConfig a;
  a.L = estimator.L;
  a.r1 = estimator.r1;
  a.bands = bands;
  a.cond_bound = grouping.cond_bound;
  return a;
}

FeatureConfig PipelineConfig::features() const {
  FeatureConfig f;
  f.L = estimator.L;
  f.displacement_tol = displacement_tol;
  return f;
}

void PipelineConfig::validate() const {
  estimator.validate();
  bands.validate();
  if (grouping.c <= 0) throw Error(Errc::InvalidArgument, "grouping.c must be positive");
  if (grouping.significance < 0)
    throw Error(Errc::InvalidArgument, "significance threshold must be non-negative");
  if (forest_m < 1 || forest_m > kFeatureCount)
    throw Error(Errc::InvalidArgument, "forest.m must be between 1 and 15");
  if (forest_trees < 1) throw Error(Errc::InvalidArgument, "forest.trees must be positive");
  if (stride < 1) throw Error(Errc::InvalidArgument, "stride must be positive");
}

std::vector<FrameId> evaluation_instants(const TrackSet& tracks, int L, int stride) {
  std::vector<FrameId> out;
  FrameId earliest = tracks.first_frame() + L - 1;
  for (FrameId n = tracks.first_frame() - 1 + stride; n <= tracks.last_frame(); n += stride)
    if (n >= earliest && !tracks.agents_covering(n - L + 1, n).empty()) out.push_back(n);
  return out;
}

Analyzer::Analyzer(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
}

InstantResult Analyzer::run_instant(const TrackSet& tracks, FrameId frame) {
  SceneModel model =
      estimate_scene(tracks, frame, prev_ ? &*prev_ : nullptr, config_.estimator);

  InstantResult result;
  result.frame = frame;
  result.excluded = model.excluded;
  result.partition = detect_groups(tracks, model, config_.grouping);

  ActivityConfig act = config_.activity();
  result.groups = classify_groups(tracks, result.partition, act);
  for (AgentId id : model.model_x.agent_order)
    result.atomic.push_back(classify_atomic(tracks, id, frame, act));

  result.features =
      extract_features(tracks, result.partition, result.groups,
                       static_cast<int>(model.model_x.agent_order.size()), config_.features());

  prev_ = std::move(model);
  return result;
}

std::vector<InstantResult> analyze_tracks(const TrackSet& tracks, const PipelineConfig& config) {
  Analyzer analyzer(config);
  auto instants = evaluation_instants(tracks, config.estimator.L, config.stride);
  if (instants.empty()) throw Error(Errc::InsufficientData, "no evaluation instants");
  std::vector<InstantResult> out;
  out.reserve(instants.size());
  for (FrameId n : instants) out.push_back(analyzer.run_instant(tracks, n));
  return out;
}

}  // namespace crowd
