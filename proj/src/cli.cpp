#include "crowd/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crowd/metrics.hpp"
#include "crowd/pipeline.hpp"
#include "crowd/serialize.hpp"

namespace crowd {

namespace {

using nlohmann::json;

TrackFormat format_of(const std::string& path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? TrackFormat::Json
                                                                     : TrackFormat::Csv;
}

TrackSet load_tracks_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  return load_tracks(in, format_of(path));
}

json instant_to_json(const InstantResult& r) {
  json line;
  line["frame"] = r.frame;
  line["partition"] = partition_to_json(r.partition);
  line["activity"] = activity_to_json(r.frame, r.groups, r.atomic);
  line["features"] = r.features.vector();
  if (!r.excluded.empty()) line["excluded"] = r.excluded;
  return line;
}

class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path == "-") {
      stream_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(Errc::Io, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

int cmd_analyze(const std::string& tracks_path, const std::string& out_path,
                const PipelineConfig& cfg) {
  TrackSet tracks = load_tracks_file(tracks_path);
  auto instants = evaluation_instants(tracks, cfg.estimator.L, cfg.stride);
  if (instants.empty()) throw Error(Errc::InsufficientData, "no evaluation instants");

  OutStream out(out_path);
  Analyzer analyzer(cfg);
  for (FrameId n : instants) {
    try {
      InstantResult r = analyzer.run_instant(tracks, n);
      out.get() << instant_to_json(r).dump() << '\n';
      out.get().flush();
    } catch (const std::exception& e) {
      out.get() << json({{"truncated", true}, {"error", e.what()}}).dump() << '\n';
      out.get().flush();
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}

int cmd_validate(const std::string& tracks_path, const std::string& out_path, int k_max,
                 const PipelineConfig& cfg) {
  TrackSet tracks = load_tracks_file(tracks_path);
  auto curve = validation_curve(tracks, cfg.estimator, k_max);
  OutStream out(out_path);
  out.get() << "k,mean_abs_error_x,mean_abs_error_y,mean_abs_error\n";
  for (const auto& p : curve)
    out.get() << p.k << ',' << p.x << ',' << p.y << ',' << p.combined << '\n';
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path,
              std::string truth_path, bool seed_given, uint64_t seed) {
  ScenarioSpec spec = scenario_from_json(read_json_file(spec_path));
  if (seed_given) spec.seed = seed;
  LabeledScene scene = generate(spec);
  {
    std::ofstream out(out_path);
    if (!out) throw Error(Errc::Io, "cannot write " + out_path);
    save_tracks(out, scene.tracks, format_of(out_path));
  }
  if (truth_path.empty()) truth_path = out_path + ".truth.json";
  write_json_file(truth_path, truth_to_json(scene));
  return 0;
}

int cmd_train_forest(const std::string& data_path, const std::string& out_path,
                     const PipelineConfig& cfg, uint64_t seed) {
  std::ifstream in(data_path);
  if (!in) throw Error(Errc::Io, "cannot read " + data_path);
  auto rows = load_features_csv(in);
  Forest forest = train_forest(rows, cfg.forest_trees, cfg.forest_m, seed);
  write_json_file(out_path, forest_to_json(forest));
  std::cerr << "trained " << forest.trees.size() << " trees, oob_error=" << forest.oob_error
            << '\n';
  return 0;
}

int cmd_classify(const std::string& features_path, const std::string& tracks_path,
                 const std::string& forest_path, const std::string& out_path,
                 const PipelineConfig& cfg) {
  Forest forest = forest_from_json(read_json_file(forest_path));

  std::vector<std::pair<json, CrowdFeatures>> inputs;  // key, features
  if (!features_path.empty()) {
    std::ifstream in(features_path);
    if (!in) throw Error(Errc::Io, "cannot read " + features_path);
    auto rows = load_features_csv(in);
    for (std::size_t i = 0; i < rows.size(); ++i)
      inputs.emplace_back(json{{"index", i}}, rows[i]);
  } else {
    TrackSet tracks = load_tracks_file(tracks_path);
    for (const auto& r : analyze_tracks(tracks, cfg))
      inputs.emplace_back(json{{"frame", r.frame}}, r.features);
  }

  json out = json::array();
  for (auto& [key, feats] : inputs) {
    ForestPrediction p = predict_forest(forest, feats);
    json row = key;
    row["class"] = class_name(p.cls);
    row["votes"] = p.votes;
    out.push_back(row);
  }
  OutStream os(out_path);
  os.get() << out.dump(2) << '\n';
  return 0;
}

ActivityLabel fold_stopping(ActivityLabel l) {
  // agent-level scoring folds the atomic vocabulary into the 4-class taxonomy
  return l == ActivityLabel::Stopping ? ActivityLabel::Approaching : l;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& out_path) {
  GroupPartition truth;
  std::vector<ActivityLabel> truth_acts;
  truth_from_json(read_json_file(truth_path), truth, truth_acts);
  std::map<AgentId, ActivityLabel> truth_by_agent;
  {
    auto groups = truth.groups();
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (AgentId id : groups[g]) truth_by_agent[id] = truth_acts[g];
  }

  std::ifstream in(pred_path);
  if (!in) throw Error(Errc::Io, "cannot read " + pred_path);

  json instants = json::array();
  double sum_nmi = 0, sum_purity = 0, sum_ri = 0;
  std::vector<ActivityLabel> pred_labels, true_labels;
  int count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::Parse, std::string("bad analyze record: ") + e.what());
    }
    if (rec.value("truncated", false))
      throw Error(Errc::Parse, "prediction stream is truncated: " + rec.value("error", ""));

    GroupPartition pred = partition_from_json(rec.at("partition"));
    GroupPartition truth_at = truth;
    truth_at.frame = pred.frame;

    double v_nmi = nmi(pred, truth_at);
    double v_pur = purity(pred, truth_at);
    double v_ri = rand_index(pred, truth_at);
    sum_nmi += v_nmi;
    sum_purity += v_pur;
    sum_ri += v_ri;
    ++count;
    instants.push_back({{"frame", pred.frame},
                        {"nmi", v_nmi},
                        {"purity", v_pur},
                        {"rand_index", v_ri}});

    for (const auto& a : rec.at("activity").at("groups")) {
      ActivityLabel l = fold_stopping(activity_from_string(a.at("label").get<std::string>()));
      for (const auto& member : a.at("members")) {
        AgentId id = member.get<AgentId>();
        auto it = truth_by_agent.find(id);
        if (it == truth_by_agent.end())
          throw Error(Errc::AgentMismatch, "agent " + std::to_string(id) + " has no ground truth");
        pred_labels.push_back(l);
        true_labels.push_back(fold_stopping(it->second));
      }
    }
  }
  if (count == 0) throw Error(Errc::InsufficientData, "prediction stream is empty");

  ActivityScore score = score_activities(pred_labels, true_labels);
  json out;
  out["instants"] = instants;
  out["mean"] = {{"nmi", sum_nmi / count},
                 {"purity", sum_purity / count},
                 {"rand_index", sum_ri / count}};
  json conf = json::array();
  for (const auto& row : score.confusion) conf.push_back(row);
  out["activity"] = {{"confusion", conf},
                     {"accuracy", score.accuracy},
                     {"classes", {"Stationary", "Approaching", "Walking", "Splitting"}},
                     {"agents_scored", score.total}};
  OutStream os(out_path);
  os.get() << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"crowd trajectory analysis"};
  app.fallthrough();
  app.set_config("--config", "", "configuration file (INI/TOML-style keys)");
  app.require_subcommand(1);

  PipelineConfig cfg;
  uint64_t seed = 0;
  app.add_option("--L", cfg.estimator.L, "estimation window length in frames (2..30)");
  app.add_option("--r1", cfg.estimator.r1, "temporal smoothness weight");
  app.add_option("--r2", cfg.estimator.r2, "sparsity weight");
  app.add_option("--frames_per_unknown", cfg.estimator.neighbors.frames_per_unknown,
                 "frame budget per unknown coefficient");
  app.add_option("--max_radius", cfg.estimator.neighbors.max_radius,
                 "hard cap on neighbor distance (scene units)");
  app.add_option("--default_radius", cfg.estimator.neighbors.default_radius,
                 "radius reported for isolated agents");
  app.add_option("--solver.max_iters", cfg.estimator.solver.max_iters, "solver iteration cap");
  app.add_option("--solver.tol", cfg.estimator.solver.tol, "solver objective tolerance");
  app.add_option("--grouping.c", cfg.grouping.c, "relative clustering threshold");
  app.add_option("--grouping.significance", cfg.grouping.significance,
                 "eigenvalue modulus significance threshold");
  app.add_option("--bands.one_lo", cfg.bands.one_lo, "lower edge of the one-band");
  app.add_option("--bands.one_hi", cfg.bands.one_hi, "upper edge of the one-band");
  app.add_option("--bands.zero_hi", cfg.bands.zero_hi, "upper edge of the zero-band");
  app.add_option("--bands.coeff_tol", cfg.bands.coeff_rel_tol,
                 "relative tolerance for treating modal coefficients as zero");
  app.add_option("--stride", cfg.stride, "frames between evaluation instants");
  app.add_option("--forest.trees", cfg.forest_trees, "number of trees");
  app.add_option("--forest.m", cfg.forest_m, "features sampled per split");
  auto* seed_opt = app.add_option("--seed", seed, "seed for all randomness");

  std::string tracks_path, out_path = "-", spec_path, truth_path, data_path, forest_path,
              features_path, pred_path;
  int k_max = 30;

  CLI::App* analyze = app.add_subcommand("analyze", "detect groups and classify activities");
  analyze->add_option("tracks", tracks_path, "track CSV/JSON file")->required();
  analyze->add_option("--out", out_path, "output JSONL path, - for stdout");

  CLI::App* validate = app.add_subcommand("validate", "k-step prediction error curve");
  validate->add_option("tracks", tracks_path, "track CSV/JSON file")->required();
  validate->add_option("--k-max", k_max, "largest prediction horizon");
  validate->add_option("--out", out_path, "output CSV path, - for stdout");

  CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic scene");
  synth->add_option("--spec", spec_path, "scenario JSON")->required();
  synth->add_option("--out", out_path, "output track file")->required();
  synth->add_option("--truth", truth_path, "ground-truth sidecar path");

  CLI::App* train = app.add_subcommand("train-forest", "train the crowd classifier");
  train->add_option("--data", data_path, "feature CSV with class column")->required();
  train->add_option("--out", out_path, "forest JSON path")->required();

  CLI::App* classify = app.add_subcommand("classify", "predict the crowd class");
  classify->add_option("--features", features_path, "feature CSV");
  classify->add_option("--tracks", tracks_path, "track file (features extracted internally)");
  classify->add_option("--forest", forest_path, "trained forest JSON")->required();
  classify->add_option("--out", out_path, "output JSON path, - for stdout");

  CLI::App* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--pred", pred_path, "analyze output (JSONL)")->required();
  eval->add_option("--truth", truth_path, "ground-truth sidecar JSON")->required();
  eval->add_option("--out", out_path, "output JSON path, - for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.validate();
    if (analyze->parsed()) return cmd_analyze(tracks_path, out_path, cfg);
    if (validate->parsed()) return cmd_validate(tracks_path, out_path, k_max, cfg);
    if (synth->parsed())
      return cmd_synth(spec_path, out_path, truth_path, seed_opt->count() > 0, seed);
    if (train->parsed()) return cmd_train_forest(data_path, out_path, cfg, seed);
    if (classify->parsed()) {
      if (features_path.empty() == tracks_path.empty())
        throw Error(Errc::InvalidArgument, "classify needs exactly one of --features or --tracks");
      return cmd_classify(features_path, tracks_path, forest_path, out_path, cfg);
    }
    if (eval->parsed()) return cmd_eval(pred_path, truth_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace crowd
