#include "aiscene/config.hpp"

#include <fstream>
#include <set>

#include "aiscene/errors.hpp"

namespace aiscene {
namespace {

const char* shape_name(ObjectShape s) {
  switch (s) {
    case ObjectShape::box: return "box";
    case ObjectShape::cylinder: return "cylinder";
    case ObjectShape::blob: return "blob";
  }
  return "box";
}

ObjectShape shape_from(const std::string& s) {
  if (s == "box") return ObjectShape::box;
  if (s == "cylinder") return ObjectShape::cylinder;
  if (s == "blob") return ObjectShape::blob;
  throw FormatError("unknown object shape '" + s + "'");
}

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& what) {
  if (!j.is_object()) throw FormatError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw FormatError(what + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Range range_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw FormatError("range must be a [min, max] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void to_json(Json& j, const LabelSchema& schema) {
  Json things = Json::array();
  for (ClassId c : schema.thing_class_ids()) things.push_back(c.value);
  j = Json{{"names", schema.names()}, {"things", things}};
  j["ignore"] = schema.ignore_class() ? Json(schema.ignore_class()->value) : Json();
  if (!schema.raw_map().empty()) {
    Json raw = Json::object();
    for (const auto& [k, v] : schema.raw_map()) raw[std::to_string(k)] = v.value;
    j["raw_map"] = raw;
  }
}

void from_json(const Json& j, LabelSchema& schema) {
  try {
    check_keys(j, {"names", "things", "ignore", "raw_map"}, "schema");
    auto names = j.at("names").get<std::vector<std::string>>();
    std::set<ClassId> things;
    if (j.contains("things")) {
      for (const auto& t : j.at("things")) things.insert(ClassId{t.get<std::uint16_t>()});
    }
    std::optional<ClassId> ignore;
    if (j.contains("ignore") && !j.at("ignore").is_null()) {
      ignore = ClassId{j.at("ignore").get<std::uint16_t>()};
    }
    std::map<std::uint32_t, ClassId> raw;
    if (j.contains("raw_map")) {
      for (const auto& [k, v] : j.at("raw_map").items()) {
        raw[static_cast<std::uint32_t>(std::stoul(k))] = ClassId{v.get<std::uint16_t>()};
      }
    }
    schema = LabelSchema(std::move(names), std::move(things), ignore, std::move(raw));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("schema: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("schema: raw_map keys must be integers");
  }
}

void to_json(Json& j, const GridSpec& grid) {
  j = Json{{"n", grid.n},
           {"x_range", {grid.x_range.min, grid.x_range.max}},
           {"y_range", {grid.y_range.min, grid.y_range.max}}};
}

void from_json(const Json& j, GridSpec& grid) {
  check_keys(j, {"n", "x_range", "y_range"}, "grid");
  read_opt(j, "n", grid.n);
  if (j.contains("x_range")) grid.x_range = range_from(j.at("x_range"));
  if (j.contains("y_range")) grid.y_range = range_from(j.at("y_range"));
}

void to_json(Json& j, const SyntheticSpec& spec) {
  Json objects = Json::array();
  for (const auto& o : spec.objects) {
    objects.push_back(Json{{"class", o.id.value},
                           {"shape", shape_name(o.shape)},
                           {"expected_count", o.expected_count},
                           {"size", {o.size.x(), o.size.y(), o.size.z()}},
                           {"base_height", o.base_height},
                           {"intensity", {o.intensity_mean, o.intensity_sigma}},
                           {"points_scale", o.points_scale},
                           {"random_yaw", o.random_yaw}});
  }
  j = Json{{"extent", spec.extent},
           {"ground_z", spec.ground_z},
           {"ground_class", spec.ground_class.value},
           {"ground_points", spec.ground_points},
           {"ground_intensity", {spec.ground_intensity_mean, spec.ground_intensity_sigma}},
           {"objects", objects},
           {"points_per_instance", {spec.min_points_per_instance, spec.max_points_per_instance}},
           {"clutter_points", spec.clutter_points},
           {"clutter_class", spec.clutter_class.value},
           {"noise_sigma", spec.noise_sigma},
           {"seed", spec.seed}};
}

void from_json(const Json& j, SyntheticSpec& spec) {
  try {
    check_keys(j,
               {"extent", "ground_z", "ground_class", "ground_points",
                "ground_intensity", "objects", "points_per_instance",
                "clutter_points", "clutter_class", "noise_sigma", "seed"},
               "synthetic spec");
    read_opt(j, "extent", spec.extent);
    read_opt(j, "ground_z", spec.ground_z);
    if (j.contains("ground_class")) spec.ground_class = ClassId{j.at("ground_class").get<std::uint16_t>()};
    read_opt(j, "ground_points", spec.ground_points);
    if (j.contains("ground_intensity")) {
      spec.ground_intensity_mean = j.at("ground_intensity").at(0).get<double>();
      spec.ground_intensity_sigma = j.at("ground_intensity").at(1).get<double>();
    }
    if (j.contains("objects")) {
      spec.objects.clear();
      for (const auto& o : j.at("objects")) {
        check_keys(o,
                   {"class", "shape", "expected_count", "size", "base_height",
                    "intensity", "points_scale", "random_yaw"},
                   "synthetic object");
        SyntheticObjectClass obj;
        obj.id = ClassId{o.at("class").get<std::uint16_t>()};
        if (o.contains("shape")) obj.shape = shape_from(o.at("shape").get<std::string>());
        read_opt(o, "expected_count", obj.expected_count);
        if (o.contains("size")) {
          const auto s = o.at("size").get<std::vector<double>>();
          if (s.size() != 3) throw FormatError("object size needs 3 values");
          obj.size = {s[0], s[1], s[2]};
        }
        read_opt(o, "base_height", obj.base_height);
        if (o.contains("intensity")) {
          obj.intensity_mean = o.at("intensity").at(0).get<double>();
          obj.intensity_sigma = o.at("intensity").at(1).get<double>();
        }
        read_opt(o, "points_scale", obj.points_scale);
        read_opt(o, "random_yaw", obj.random_yaw);
        spec.objects.push_back(obj);
      }
    }
    if (j.contains("points_per_instance")) {
      spec.min_points_per_instance = j.at("points_per_instance").at(0).get<int>();
      spec.max_points_per_instance = j.at("points_per_instance").at(1).get<int>();
    }
    read_opt(j, "clutter_points", spec.clutter_points);
    if (j.contains("clutter_class")) spec.clutter_class = ClassId{j.at("clutter_class").get<std::uint16_t>()};
    read_opt(j, "noise_sigma", spec.noise_sigma);
    read_opt(j, "seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("synthetic spec: ") + e.what());
  }
}

void to_json(Json& j, const TrainConfig& c) {
  j = Json{{"tau_s", c.tau_s},
           {"ema_alpha", c.ema.alpha},
           {"lambda_u", c.weights.lambda_u},
           {"lambda_l", c.weights.lambda_l},
           {"consistency_weight", c.weights.consistency_weight},
           {"grid", c.grid},
           {"tau_min", c.pool.tau_min},
           {"pool_capacity", c.pool.capacity_per_index ? Json(*c.pool.capacity_per_index) : Json()},
           {"pool_seed", c.pool.seed},
           {"rho_mix", c.mix.rho_mix},
           {"p_fill", c.mix.p_fill},
           {"context_radius", c.mix.context_radius ? Json(*c.mix.context_radius) : Json()},
           {"context_min_points", c.mix.context_min_points},
           {"mix_seed", c.mix.seed},
           {"components",
            {{"pt_erase", c.components.pt_erase},
             {"mix_patch", c.components.mix_patch},
             {"ins_fill", c.components.ins_fill}}},
           {"learning_rate", c.learning_rate},
           {"batch_size", c.batch_size},
           {"iterations", c.iterations},
           {"seed", c.seed},
           {"workers", c.workers}};
}

void from_json(const Json& j, TrainConfig& c) {
  try {
    std::set<std::string> allowed;
    for (const auto& [k, d] : train_config_keys()) {
      allowed.insert(k.substr(0, k.find('.')));
    }
    check_keys(j, allowed, "train config");
    read_opt(j, "tau_s", c.tau_s);
    read_opt(j, "ema_alpha", c.ema.alpha);
    read_opt(j, "lambda_u", c.weights.lambda_u);
    read_opt(j, "lambda_l", c.weights.lambda_l);
    read_opt(j, "consistency_weight", c.weights.consistency_weight);
    if (j.contains("grid")) from_json(j.at("grid"), c.grid);
    read_opt(j, "tau_min", c.pool.tau_min);
    if (j.contains("pool_capacity")) {
      const auto& v = j.at("pool_capacity");
      c.pool.capacity_per_index =
          v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
    }
    read_opt(j, "pool_seed", c.pool.seed);
    read_opt(j, "rho_mix", c.mix.rho_mix);
    read_opt(j, "p_fill", c.mix.p_fill);
    if (j.contains("context_radius")) {
      const auto& v = j.at("context_radius");
      c.mix.context_radius =
          v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    }
    read_opt(j, "context_min_points", c.mix.context_min_points);
    read_opt(j, "mix_seed", c.mix.seed);
    if (j.contains("components")) {
      const auto& s = j.at("components");
      check_keys(s, {"pt_erase", "mix_patch", "ins_fill"}, "components");
      read_opt(s, "pt_erase", c.components.pt_erase);
      read_opt(s, "mix_patch", c.components.mix_patch);
      read_opt(s, "ins_fill", c.components.ins_fill);
    }
    read_opt(j, "learning_rate", c.learning_rate);
    read_opt(j, "batch_size", c.batch_size);
    read_opt(j, "iterations", c.iterations);
    read_opt(j, "seed", c.seed);
    read_opt(j, "workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("train config: ") + e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void apply_overrides(Json& doc, std::span<const std::string> overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw PreconditionError("override '" + item + "' is not key=value");
    }
    std::string pointer = "/" + item.substr(0, eq);
    for (char& ch : pointer) {
      if (ch == '.') ch = '/';
    }
    const std::string text = item.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      value = text;
    }
    doc[Json::json_pointer(pointer)] = value;
  }
}

std::uint64_t config_hash(const TrainConfig& config) {
  const std::string text = Json(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::pair<std::string, std::string>> train_config_keys() {
  return {
      {"tau_s", "confidence threshold for pseudo-labels and erasure (0.9)"},
      {"ema_alpha", "teacher EMA decay rate (0.99)"},
      {"lambda_u", "weight of the augmented unlabeled loss (1)"},
      {"lambda_l", "weight of the augmented labeled loss (1)"},
      {"consistency_weight", "teacher/student consistency weight (0 = off)"},
      {"grid.n", "BEV splits per axis; T = n^2 patches (18)"},
      {"grid.x_range", "BEV x range in meters ([-50, 50])"},
      {"grid.y_range", "BEV y range in meters ([-50, 50])"},
      {"tau_min", "minimum points per pooled patch or instance (5)"},
      {"pool_capacity", "optional per-index pool cap with reservoir replacement (null)"},
      {"pool_seed", "seed of the pool reservoir sampler (0)"},
      {"rho_mix", "fraction of patches replaced by MixPatch (0.5)"},
      {"p_fill", "per-index InsFill attempt probability (0.5)"},
      {"context_radius", "InsFill context radius in meters (null = 2 x cell side)"},
      {"context_min_points", "InsFill minimum context points (10)"},
      {"mix_seed", "seed for offline augmentation masks (0)"},
      {"components.pt_erase", "enable point erasure (true)"},
      {"components.mix_patch", "enable MixPatch (true)"},
      {"components.ins_fill", "enable InsFill (true)"},
      {"learning_rate", "gradient descent step size"},
      {"batch_size", "labeled/unlabeled scenes per iteration (2)"},
      {"iterations", "training iterations (2000)"},
      {"seed", "training seed (0)"},
      {"workers", "worker threads for per-scene work (1)"},
  };
}

}  // namespace aiscene
