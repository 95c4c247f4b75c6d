#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aiscene/schema.hpp"
#include "aiscene/synthetic.hpp"
#include "aiscene/trainer.hpp"

namespace aiscene {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const LabelSchema& schema);
void from_json(const Json& j, LabelSchema& schema);
void to_json(Json& j, const GridSpec& grid);
void from_json(const Json& j, GridSpec& grid);
void to_json(Json& j, const SyntheticSpec& spec);
void from_json(const Json& j, SyntheticSpec& spec);
void to_json(Json& j, const TrainConfig& config);
/// Missing keys keep their defaults; unknown keys raise FormatError.
void from_json(const Json& j, TrainConfig& config);

/// Reads a JSON document; IoError if unreadable, FormatError if unparsable.
Json load_json(const std::filesystem::path& path);
void save_json(const Json& doc, const std::filesystem::path& path);

/// Applies `key=value` overrides. Dotted keys address nested objects
/// (grid.n=12); values are parsed as JSON and fall back to plain strings.
void apply_overrides(Json& doc, std::span<const std::string> overrides);

/// 64-bit FNV-1a of the canonical JSON text of `config`.
std::uint64_t config_hash(const TrainConfig& config);

/// (key, description) for every training config key, for --help output.
std::vector<std::pair<std::string, std::string>> train_config_keys();


}  // namespace aiscene
