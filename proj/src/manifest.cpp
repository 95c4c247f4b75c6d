#include "aiscene/manifest.hpp"

#include <set>

#include "aiscene/errors.hpp"
#include "aiscene/kitti_io.hpp"

namespace aiscene {
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
  return p.is_absolute() ? p : base_dir / p;
}

Json scene_files_json(const SceneFiles& f) {
  Json j{{"id", f.id.value}, {"bin", f.bin.generic_string()}};
  j["label"] = f.label ? Json(f.label->generic_string()) : Json();
  return j;
}

SceneFiles scene_files_from(const Json& j, const fs::path& base_dir) {
  SceneFiles f;
  f.id = SceneId{j.at("id").get<std::uint32_t>()};
  f.bin = resolve(base_dir, j.at("bin").get<std::string>());
  if (j.contains("label") && !j.at("label").is_null()) {
    f.label = resolve(base_dir, j.at("label").get<std::string>());
  }
  return f;
}

template <typename Fn>
auto with_format_errors(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_dataset_manifest(const DatasetManifest& manifest, const fs::path& path) {
  Json doc;
  doc["schema"] = manifest.schema;
  Json scenes = Json::array();
  for (const auto& f : manifest.scenes) scenes.push_back(scene_files_json(f));
  doc["scenes"] = scenes;
  for (const auto& [k, v] : manifest.extra.items()) doc[k] = v;
  save_json(doc, path);
}

DatasetManifest load_dataset_manifest(const fs::path& path) {
  const Json doc = load_json(path);
  return with_format_errors(path, [&] {
    DatasetManifest m;
    m.schema = doc.at("schema").get<LabelSchema>();
    const fs::path dir = path.parent_path();
    for (const auto& s : doc.at("scenes")) m.scenes.push_back(scene_files_from(s, dir));
    for (const auto& [k, v] : doc.items()) {
      if (k != "schema" && k != "scenes") m.extra[k] = v;
    }
    return m;
  });
}

Dataset load_dataset(const DatasetManifest& manifest) {
  std::vector<Dataset::ScenePtr> scenes;
  scenes.reserve(manifest.scenes.size());
  for (const auto& f : manifest.scenes) {
    scenes.push_back(std::make_shared<const Scene>(
        load_scene_kitti(f.bin, f.label, manifest.schema, f.id)));
  }
  return Dataset(std::move(scenes), manifest.schema);
}

void save_split_manifest(const Dataset& split, const fs::path& dataset_manifest,
                         double ratio, std::uint64_t seed, const fs::path& path) {
  Json doc;
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  doc["dataset"] = fs::relative(fs::absolute(dataset_manifest), fs::absolute(base))
                       .generic_string();
  doc["ratio"] = ratio;
  doc["seed"] = seed;
  doc["labeled"] = split.labeled_ids();
  doc["unlabeled"] = split.unlabeled_ids();
  save_json(doc, path);
}

Dataset load_split(const fs::path& path, DatasetManifest* manifest_out) {
  const Json doc = load_json(path);
  return with_format_errors(path, [&] {
    const fs::path ds_path = resolve(path.parent_path(), doc.at("dataset").get<std::string>());
    DatasetManifest manifest = load_dataset_manifest(ds_path);
    Dataset all = load_dataset(manifest);
    Dataset out(all.scenes(), all.schema(),
                doc.at("labeled").get<std::vector<std::size_t>>(),
                doc.at("unlabeled").get<std::vector<std::size_t>>());
    if (manifest_out) *manifest_out = std::move(manifest);
    return out;
  });
}

void save_pool_manifest(const Pools& pools, const GridSpec& grid,
                        const PoolConfig& config,
                        const std::vector<SceneFiles>& sources,
                        const fs::path& path) {
  Json doc;
  doc["grid"] = grid;
  doc["tau_min"] = config.tau_min;
  doc["pool_capacity"] =
      config.capacity_per_index ? Json(*config.capacity_per_index) : Json();
  doc["pool_seed"] = config.seed;

  std::set<SceneId> used;
  Json patches = Json::array();
  for (std::uint32_t j = 0; j < pools.patches.num_indices(); ++j) {
    for (const Patch& p : pools.patches.at(PatchIndex{j})) {
      patches.push_back(Json{{"index", j},
                             {"scene", p.source_scene.value},
                             {"points", p.source_point}});
      used.insert(p.source_scene);
    }
  }
  Json instances = Json::array();
  for (std::uint32_t j = 0; j < pools.instances.num_indices(); ++j) {
    for (const Instance& in : pools.instances.at(PatchIndex{j})) {
      instances.push_back(Json{{"index", j},
                               {"scene", in.source_scene.value},
                               {"class", in.class_id.value},
                               {"points", in.source_point}});
      used.insert(in.source_scene);
    }
  }
  const fs::path base = fs::absolute(path).parent_path();
  Json scenes = Json::array();
  for (const auto& f : sources) {
    if (!used.contains(f.id)) continue;
    SceneFiles rel = f;
    rel.bin = fs::relative(fs::absolute(f.bin), base);
    if (f.label) rel.label = fs::relative(fs::absolute(*f.label), base);
    scenes.push_back(scene_files_json(rel));
    used.erase(f.id);
  }
  if (!used.empty()) {
    throw PreconditionError("pool manifest: entry references a scene without files");
  }
  doc["scenes"] = scenes;
  doc["patches"] = patches;
  doc["instances"] = instances;
  save_json(doc, path);
}

LoadedPools load_pool_manifest(const fs::path& path, const LabelSchema& schema) {
  const Json doc = load_json(path);
  return with_format_errors(path, [&] {
    LoadedPools out;
    out.grid = doc.at("grid").get<GridSpec>();
    out.grid.validate();
    out.config.tau_min = doc.at("tau_min").get<std::size_t>();
    if (!doc.at("pool_capacity").is_null()) {
      out.config.capacity_per_index = doc.at("pool_capacity").get<std::size_t>();
    }
    out.config.seed = doc.at("pool_seed").get<std::uint64_t>();

    std::map<SceneId, Scene> scenes;
    for (const auto& s : doc.at("scenes")) {
      const SceneFiles f = scene_files_from(s, path.parent_path());
      scenes.emplace(f.id, load_scene_kitti(f.bin, f.label, schema, f.id));
    }
    auto source = [&](const Json& e) -> const Scene& {
      auto it = scenes.find(SceneId{e.at("scene").get<std::uint32_t>()});
      if (it == scenes.end()) throw FormatError(path.string() + ": unknown scene id");
      return it->second;
    };
    auto gather = [&](const Scene& scene, const std::vector<std::uint32_t>& rows) {
      SceneBuilder b(scene.feature_dim(), true);
      b.reserve(rows.size());
      for (std::uint32_t r : rows) {
        if (r >= scene.size()) throw FormatError(path.string() + ": point row out of range");
        b.append(scene, r);
      }
      return std::move(b).build(scene.id());
    };
    const std::uint32_t t = out.grid.num_patches();
    out.pools = {PatchPool(t, PoolScope::persistent_labeled),
                 InstancePool(t, PoolScope::persistent_labeled)};
    // Entries are restored verbatim, so no reservoir replacement happens here.
    Rng unused(0);
    for (const auto& e : doc.at("patches")) {
      Patch p;
      p.index = PatchIndex{e.at("index").get<std::uint32_t>()};
      if (p.index.value >= t) throw FormatError(path.string() + ": patch index out of range");
      const Scene& s = source(e);
      p.source_scene = s.id();
      p.source_point = e.at("points").get<std::vector<std::uint32_t>>();
      p.points = gather(s, p.source_point);
      out.pools.patches.insert(std::move(p), std::nullopt, unused);
    }
    for (const auto& e : doc.at("instances")) {
      Instance in;
      in.index = PatchIndex{e.at("index").get<std::uint32_t>()};
      if (in.index.value >= t) throw FormatError(path.string() + ": instance index out of range");
      in.class_id = ClassId{e.at("class").get<std::uint16_t>()};
      const Scene& s = source(e);
      in.source_scene = s.id();
      in.source_point = e.at("points").get<std::vector<std::uint32_t>>();
      in.points = gather(s, in.source_point).with_labels(
          Scene::Labels(in.source_point.size(), in.class_id));
      out.pools.instances.insert(std::move(in), std::nullopt, unused);
    }
    return out;
  });
}

}  // namespace aiscene
