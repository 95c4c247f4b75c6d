#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aiscene/types.hpp"

namespace aiscene {

enum class ClassKind { stuff, thing, ignore };

/// Class vocabulary of a dataset: names, which classes are countable
/// "things", the (at most one) ignore class, and an optional table mapping
/// raw on-disk label values to training class ids.
class LabelSchema {
 public:
  LabelSchema() = default;
  /// Throws PreconditionError if `thing_ids` or `ignore` fall outside
  /// [0, names.size()) or if the ignore class is also a thing class.
  LabelSchema(std::vector<std::string> names, std::set<ClassId> thing_ids,
              std::optional<ClassId> ignore,
              std::map<std::uint32_t, ClassId> raw_map = {});

  std::size_t num_classes() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::set<ClassId>& thing_class_ids() const { return things_; }
  std::optional<ClassId> ignore_class() const { return ignore_; }
  const std::map<std::uint32_t, ClassId>& raw_map() const { return raw_map_; }

  ClassKind kind(ClassId id) const;
  bool is_thing(ClassId id) const { return things_.contains(id); }
  bool is_ignore(ClassId id) const { return ignore_ && *ignore_ == id; }
  bool contains(ClassId id) const { return id.value < names_.size(); }

  /// Maps a raw 16-bit semantic label to a training class. With an empty
  /// table raw values are taken as class ids directly. Anything unknown or
  /// out of range lands on the ignore class (class 0 if there is none).
  ClassId remap_raw(std::uint32_t raw) const;

  /// Ids of the classes that take part in evaluation (all but ignore).
  std::vector<ClassId> evaluated_classes() const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::set<ClassId> things_;
  std::optional<ClassId> ignore_;
  std::map<std::uint32_t, ClassId> raw_map_;
};

}  // namespace aiscene
