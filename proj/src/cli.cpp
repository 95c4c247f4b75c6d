#include "aiscene/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "aiscene/checkpoint.hpp"
#include "aiscene/config.hpp"
#include "aiscene/errors.hpp"
#include "aiscene/kitti_io.hpp"
#include "aiscene/manifest.hpp"
#include "aiscene/metrics.hpp"
#include "aiscene/mixing.hpp"
#include "aiscene/synthetic.hpp"
#include "aiscene/trainer.hpp"

namespace aiscene::cli {
namespace fs = std::filesystem;

namespace {

std::string keys_footer() {
  std::ostringstream s;
  s << "Config keys (JSON file via --config, or --set key=value):\n";
  for (const auto& [k, d] : train_config_keys()) {
    s << "  " << std::left << std::setw(22) << k << d << '\n';
  }
  return s.str();
}

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.path, "training/augmentation config (JSON)");
  cmd->add_option("--set", args.overrides, "override a config key: key=value");
  cmd->footer(keys_footer());
}

TrainConfig resolve_config(const ConfigArgs& args) {
  Json doc = args.path.empty() ? Json(TrainConfig{}) : load_json(args.path);
  apply_overrides(doc, args.overrides);
  TrainConfig config;
  from_json(doc, config);
  config.validate();
  return config;
}

LabelSchema schema_from(const std::string& path) {
  if (path.empty()) return synthetic_schema();
  return load_json(path).get<LabelSchema>();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string scene_name(std::size_t i) {
  std::ostringstream s;
  s << std::setw(6) << std::setfill('0') << i;
  return s.str();
}

std::string log_line(const IterationLog& l) {
  Json j{{"step", l.step},
         {"loss_s", l.loss_s},
         {"loss_l", l.loss_l},
         {"loss_u", l.loss_u},
         {"loss_c", l.loss_c},
         {"loss", l.loss_total},
         {"erase_fraction", l.erase_fraction},
         {"pool_sizes",
          {{"labeled_patches", l.labeled_patches},
           {"labeled_instances", l.labeled_instances},
           {"pseudo_patches", l.pseudo_patches},
           {"pseudo_instances", l.pseudo_instances}}}};
  return j.dump();
}

void print_miou(std::ostream& out, const MiouResult& r, const LabelSchema& schema) {
  out << std::left << std::setw(20) << "class" << "IoU\n";
  for (std::size_t c = 0; c < schema.num_classes(); ++c) {
    if (schema.is_ignore(ClassId{static_cast<std::uint16_t>(c)})) continue;
    out << std::left << std::setw(20) << schema.names()[c];
    const double v = r.per_class[static_cast<Eigen::Index>(c)];
    if (std::isnan(v)) {
      out << "n/a\n";
    } else {
      out << std::fixed << std::setprecision(4) << v << '\n';
    }
  }
  out << std::left << std::setw(20) << "mIoU" << std::fixed
      << std::setprecision(4) << r.miou << '\n';
  out.unsetf(std::ios::fixed);
}

Json miou_json(const MiouResult& r, const LabelSchema& schema) {
  Json per = Json::object();
  for (std::size_t c = 0; c < schema.num_classes(); ++c) {
    const double v = r.per_class[static_cast<Eigen::Index>(c)];
    per[schema.names()[c]] = std::isnan(v) ? Json() : Json(v);
  }
  return Json{{"per_class", per}, {"miou", r.miou}};
}

// Fixed RGB colors of the SemanticKITTI training classes, looked up by
// class name; other names cycle through the same table by class id.
std::array<int, 3> class_color(const LabelSchema& schema, ClassId c) {
  static const std::map<std::string, std::array<int, 3>> kNamed{
      {"unlabeled", {0, 0, 0}},         {"car", {100, 150, 245}},
      {"bicycle", {100, 230, 245}},     {"motorcycle", {30, 60, 150}},
      {"truck", {80, 30, 180}},         {"other-vehicle", {100, 80, 250}},
      {"person", {255, 30, 30}},        {"bicyclist", {255, 40, 200}},
      {"motorcyclist", {150, 30, 90}},  {"road", {255, 0, 255}},
      {"parking", {255, 150, 255}},     {"sidewalk", {75, 0, 75}},
      {"other-ground", {175, 0, 75}},   {"building", {255, 200, 0}},
      {"fence", {255, 120, 50}},        {"vegetation", {0, 175, 0}},
      {"trunk", {135, 60, 0}},          {"terrain", {150, 240, 80}},
      {"pole", {255, 240, 150}},        {"traffic-sign", {255, 0, 0}},
  };
  if (c.value < schema.num_classes()) {
    auto it = kNamed.find(schema.names()[c.value]);
    if (it != kNamed.end()) return it->second;
  }
  auto it = kNamed.begin();
  std::advance(it, c.value % kNamed.size());
  return it->second;
}

// --- subcommands ----------------------------------------------------------

struct GenSynthArgs {
  std::string spec_path;
  std::string schema_path;
  std::size_t count = 200;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_synth(const GenSynthArgs& a, std::ostream& out) {
  SyntheticSpec spec = synthetic_benchmark_spec();
  if (!a.spec_path.empty()) from_json(load_json(a.spec_path), spec);
  const LabelSchema schema = schema_from(a.schema_path);
  const fs::path dir(a.out);
  ensure_dir(dir / "scenes");
  DatasetManifest manifest;
  manifest.schema = schema;
  for (std::size_t i = 0; i < a.count; ++i) {
    const std::uint64_t scene_seed = a.seed * 1000003ull + i;
    const Scene s = generate_synthetic_scene(spec, scene_seed)
                        .with_id(SceneId{static_cast<std::uint32_t>(i)});
    SceneFiles f{s.id(), fs::path("scenes") / (scene_name(i) + ".bin"),
                 fs::path("scenes") / (scene_name(i) + ".label")};
    save_scene(s, dir / f.bin, dir / *f.label);
    manifest.scenes.push_back(f);
  }
  manifest.extra["synthetic"] = spec;
  manifest.extra["generator_seed"] = a.seed;
  save_dataset_manifest(manifest, dir / "dataset.json");
  out << "wrote " << a.count << " scenes to " << (dir / "dataset.json").string() << '\n';
  return kOk;
}

struct SplitArgs {
  std::string dataset;
  double ratio = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const DatasetManifest manifest = load_dataset_manifest(a.dataset);
  const Dataset split = split_dataset(load_dataset(manifest), a.ratio, a.seed);
  save_split_manifest(split, a.dataset, a.ratio, a.seed, a.out);
  out << "labeled " << split.labeled_ids().size() << " / unlabeled "
      << split.unlabeled_ids().size() << " -> " << a.out << '\n';
  return kOk;
}

struct PoolsArgs {
  std::string split;
  ConfigArgs config;
  std::string out;
};

int cmd_pools(const PoolsArgs& a, std::ostream& out) {
  const TrainConfig config = resolve_config(a.config);
  DatasetManifest manifest;
  const Dataset ds = load_split(a.split, &manifest);
  std::vector<const Scene*> labeled;
  for (std::size_t i : ds.labeled_ids()) labeled.push_back(&ds.training_scene(i));
  const Pools pools =
      build_labeled_pools(labeled, config.grid, config.pool, ds.schema());
  save_pool_manifest(pools, config.grid, config.pool, manifest.scenes, a.out);
  out << "patches " << pools.patches.total_size() << ", instances "
      << pools.instances.total_size() << " -> " << a.out << '\n';
  return kOk;
}

struct AugmentArgs {
  std::string split;
  std::string pools;
  ConfigArgs config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_augment(const AugmentArgs& a, std::ostream& out) {
  const TrainConfig config = resolve_config(a.config);
  const Dataset ds = load_split(a.split);
  const LoadedPools loaded = load_pool_manifest(a.pools, ds.schema());
  const fs::path dir(a.out);
  ensure_dir(dir);
  DatasetManifest manifest;
  manifest.schema = ds.schema();
  for (std::size_t i : ds.labeled_ids()) {
    const Scene& scene = ds.training_scene(i);
    const std::uint64_t mask_seed =
        a.seed.value_or(config.mix.seed) * 1000003ull + scene.id().value;
    const AugmentedScene aug = mix_and_fill(
        as_augmented(scene), loaded.pools, loaded.grid, config.mix, ds.schema(),
        mask_seed, config.components.mix_patch, config.components.ins_fill);
    const std::string name = scene_name(scene.id().value);
    SceneFiles f{scene.id(), name + ".bin", name + ".label"};
    save_scene(aug.scene, dir / f.bin, dir / *f.label);
    save_provenance(aug.origin, dir / (name + ".prov"));
    manifest.scenes.push_back(f);
  }
  save_dataset_manifest(manifest, dir / "dataset.json");
  out << "augmented " << manifest.scenes.size() << " scenes -> " << dir.string() << '\n';
  return kOk;
}

struct TrainArgs {
  std::string split;
  ConfigArgs config;
  std::optional<std::uint64_t> seed;
  std::string eval_dataset;
  std::string out;
};

int cmd_train(const TrainArgs& a, bool supervised, std::ostream& out) {
  TrainConfig config = resolve_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (supervised) config = supervised_only(config);
  const Dataset ds = load_split(a.split);
  const ToySegmentor model(ds.schema().num_classes());
  const fs::path dir(a.out);
  ensure_dir(dir);
  save_json(Json(config), dir / "config.json");
  const std::uint64_t hash = config_hash(config);

  std::ofstream log(dir / "log.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot write " + (dir / "log.jsonl").string());
  const TrainingRun run = train(
      ds, model, config, [&](const IterationLog& l) { log << log_line(l) << '\n'; });
  log.flush();
  if (!log) throw IoError("write failed: " + (dir / "log.jsonl").string());
  save_checkpoint({run.state, hash}, dir / "checkpoint_final.bin");

  if (!a.eval_dataset.empty()) {
    const Dataset eval = load_dataset(load_dataset_manifest(a.eval_dataset));
    std::vector<const Scene*> scenes;
    for (std::size_t i = 0; i < eval.size(); ++i) scenes.push_back(&eval.evaluation_scene(i));
    const MiouResult r = evaluate_miou(model, run.state.student, scenes, eval.schema());
    save_json(miou_json(r, eval.schema()), dir / "eval.json");
    print_miou(out, r, eval.schema());
  }
  out << "trained " << config.iterations << " iterations -> " << dir.string() << '\n';
  return kOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string split;
  std::string segmentor = "toy";
  std::string which = "student";
  std::string json_out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.dataset.empty() == a.split.empty()) {
    throw PreconditionError("eval: give exactly one of --dataset or --split");
  }
  const Dataset ds = a.split.empty() ? load_dataset(load_dataset_manifest(a.dataset))
                                     : load_split(a.split);
  std::vector<const Scene*> scenes;
  for (std::size_t i = 0; i < ds.size(); ++i) scenes.push_back(&ds.evaluation_scene(i));

  MiouResult r;
  if (a.segmentor == "oracle") {
    const OracleSegmentor model(ds.schema().num_classes());
    r = evaluate_miou(model, ParamVector(), scenes, ds.schema());
  } else if (a.segmentor == "toy") {
    if (a.checkpoint.empty()) throw PreconditionError("eval: --checkpoint required");
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    const ToySegmentor model(ds.schema().num_classes());
    const ParamVector& params = a.which == "teacher" ? ck.state.teacher : ck.state.student;
    r = evaluate_miou(model, params, scenes, ds.schema());
  } else {
    throw PreconditionError("eval: unknown segmentor '" + a.segmentor + "'");
  }
  print_miou(out, r, ds.schema());
  if (!a.json_out.empty()) save_json(miou_json(r, ds.schema()), a.json_out);
  return kOk;
}

struct StatsArgs {
  std::string log;
  std::size_t window = 50;
  std::string out;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  std::ifstream in(a.log);
  if (!in) throw IoError("cannot open " + a.log);
  std::vector<std::pair<std::uint64_t, double>> series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      series.emplace_back(j.at("step").get<std::uint64_t>(),
                          j.at("erase_fraction").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(a.log + ": " + e.what());
    }
  }
  if (a.window < 1) throw PreconditionError("stats: window must be >= 1");
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::trunc);
    if (!file) throw IoError("cannot write " + a.out);
  }
  std::ostream& sink = a.out.empty() ? out : file;
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i].second;
    if (i >= a.window) acc -= series[i - a.window].second;
    const double avg = acc / static_cast<double>(std::min(i + 1, a.window));
    sink << Json{{"step", series[i].first},
                 {"erase_fraction", series[i].second},
                 {"moving_average", avg}}
                .dump()
         << '\n';
  }
  return kOk;
}

struct PlyArgs {
  std::string bin;
  std::string label;
  std::string schema;
  std::string out;
};

int cmd_export_ply(const PlyArgs& a, std::ostream& out) {
  const LabelSchema schema = schema_from(a.schema);
  std::optional<fs::path> label;
  if (!a.label.empty()) label = a.label;
  const Scene s = load_scene_kitti(a.bin, label, schema);
  std::ofstream ply(a.out, std::ios::trunc);
  if (!ply) throw IoError("cannot write " + a.out);
  ply << "ply\nformat ascii 1.0\nelement vertex " << s.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property float intensity\nproperty uchar red\nproperty uchar green\n"
         "property uchar blue\nproperty ushort label\nend_header\n";
  ply << std::setprecision(9);
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    const ClassId c = s.has_labels() ? s.labels()[static_cast<std::size_t>(p)] : ClassId{0};
    const auto rgb = s.has_labels() ? class_color(schema, c) : std::array<int, 3>{200, 200, 200};
    ply << s.coords()(p, 0) << ' ' << s.coords()(p, 1) << ' ' << s.coords()(p, 2)
        << ' ' << s.feats()(p, 0) << ' ' << rgb[0] << ' ' << rgb[1] << ' '
        << rgb[2] << ' ' << c.value << '\n';
  }
  if (!ply) throw IoError("write failed: " + a.out);
  out << "wrote " << s.size() << " points -> " << a.out << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Semi-supervised LiDAR segmentation toolkit"};
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* c_gen = app.add_subcommand("gen-synth", "generate a synthetic labeled dataset");
  c_gen->add_option("--spec", gen.spec_path, "synthetic spec JSON (default: benchmark recipe)");
  c_gen->add_option("--schema", gen.schema_path, "label schema JSON (default: synthetic schema)");
  c_gen->add_option("--count", gen.count, "number of scenes");
  c_gen->add_option("--seed", gen.seed, "generator seed");
  c_gen->add_option("--out", gen.out, "output directory")->required();

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "sample a labeled/unlabeled split");
  c_split->add_option("--dataset", split.dataset, "dataset manifest")->required();
  c_split->add_option("--ratio", split.ratio, "labeled fraction in (0, 1]");
  c_split->add_option("--seed", split.seed, "sampling seed");
  c_split->add_option("--out", split.out, "split manifest to write")->required();

  PoolsArgs pools;
  auto* c_pools = app.add_subcommand("pools", "build persistent labeled pools");
  c_pools->add_option("--split", pools.split, "split manifest")->required();
  add_config_args(c_pools, pools.config);
  c_pools->add_option("--out", pools.out, "pool manifest to write")->required();

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "MixPatch + InsFill the labeled scenes offline");
  c_aug->add_option("--split", aug.split, "split manifest")->required();
  c_aug->add_option("--pools", aug.pools, "pool manifest")->required();
  add_config_args(c_aug, aug.config);
  c_aug->add_option("--seed", aug.seed, "overrides mix_seed");
  c_aug->add_option("--out", aug.out, "output directory")->required();

  TrainArgs tssl;
  auto* c_tssl = app.add_subcommand("train-ssl", "teacher-student training");
  TrainArgs tsup;
  auto* c_tsup = app.add_subcommand("train-sup", "labeled-only baseline training");
  for (auto [cmd, t] : {std::pair{c_tssl, &tssl}, std::pair{c_tsup, &tsup}}) {
    cmd->add_option("--split", t->split, "split manifest")->required();
    add_config_args(cmd, t->config);
    cmd->add_option("--seed", t->seed, "overrides the config seed");
    cmd->add_option("--eval-dataset", t->eval_dataset, "dataset manifest to evaluate at the end");
    cmd->add_option("--out", t->out, "output directory")->required();
  }

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "per-class IoU and mIoU");
  c_eval->add_option("--checkpoint", ev.checkpoint, "checkpoint file");
  c_eval->add_option("--dataset", ev.dataset, "dataset manifest (all scenes)");
  c_eval->add_option("--split", ev.split, "split manifest (all scenes, ground truth)");
  c_eval->add_option("--segmentor", ev.segmentor, "toy | oracle");
  c_eval->add_option("--params", ev.which, "student | teacher");
  c_eval->add_option("--json", ev.json_out, "also write results as JSON");

  StatsArgs st;
  auto* c_stats = app.add_subcommand("stats", "erase-fraction time series from a training log");
  c_stats->add_option("--log", st.log, "log.jsonl from train-ssl")->required();
  c_stats->add_option("--window", st.window, "moving-average window");
  c_stats->add_option("--out", st.out, "write here instead of stdout");

  PlyArgs ply;
  auto* c_ply = app.add_subcommand("export-ply", "write a class-colored PLY point cloud");
  c_ply->add_option("--bin", ply.bin, "point file")->required();
  c_ply->add_option("--label", ply.label, "label file");
  c_ply->add_option("--schema", ply.schema, "label schema JSON (default: synthetic schema)");
  c_ply->add_option("--out", ply.out, "PLY file to write")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_gen) return cmd_gen_synth(gen, out);
    if (*c_split) return cmd_split(split, out);
    if (*c_pools) return cmd_pools(pools, out);
    if (*c_aug) return cmd_augment(aug, out);
    if (*c_tssl) return cmd_train(tssl, false, out);
    if (*c_tsup) return cmd_train(tsup, true, out);
    if (*c_eval) return cmd_eval(ev, out);
    if (*c_stats) return cmd_stats(st, out);
    if (*c_ply) return cmd_export_ply(ply, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace aiscene::cli
