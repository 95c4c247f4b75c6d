#include "aiscene/schema.hpp"

#include "aiscene/errors.hpp"

namespace aiscene {

LabelSchema::LabelSchema(std::vector<std::string> names,
                         std::set<ClassId> thing_ids,
                         std::optional<ClassId> ignore,
                         std::map<std::uint32_t, ClassId> raw_map)
    : names_(std::move(names)),
      things_(std::move(thing_ids)),
      ignore_(ignore),
      raw_map_(std::move(raw_map)) {
  for (ClassId c : things_) {
    if (!contains(c)) {
      throw PreconditionError("thing class id " + std::to_string(c.value) +
                              " outside schema");
    }
  }
  if (ignore_) {
    if (!contains(*ignore_)) {
      throw PreconditionError("ignore class id outside schema");
    }
    if (things_.contains(*ignore_)) {
      throw PreconditionError("ignore class cannot be a thing class");
    }
  }
  for (const auto& [raw, c] : raw_map_) {
    if (!contains(c)) {
      throw PreconditionError("raw label " + std::to_string(raw) +
                              " maps outside schema");
    }
  }
}

ClassKind LabelSchema::kind(ClassId id) const {
  if (is_ignore(id)) return ClassKind::ignore;
  if (is_thing(id)) return ClassKind::thing;
  return ClassKind::stuff;
}

ClassId LabelSchema::remap_raw(std::uint32_t raw) const {
  const ClassId fallback = ignore_.value_or(ClassId{0});
  if (raw_map_.empty()) {
    return raw < names_.size() ? ClassId{static_cast<std::uint16_t>(raw)}
                               : fallback;
  }
  auto it = raw_map_.find(raw);
  return it == raw_map_.end() ? fallback : it->second;
}

std::vector<ClassId> LabelSchema::evaluated_classes() const {
  std::vector<ClassId> out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    ClassId id{static_cast<std::uint16_t>(c)};
    if (!is_ignore(id)) out.push_back(id);
  }
  return out;
}

}  // namespace aiscene
