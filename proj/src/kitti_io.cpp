#include "aiscene/kitti_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "aiscene/errors.hpp"

namespace aiscene {
namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path,
                 const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 24));
}

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

void put_f32(std::vector<unsigned char>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

constexpr std::size_t kPointRecord = 16;
constexpr std::size_t kLabelRecord = 4;
constexpr std::size_t kOriginRecord = 12;

}  // namespace

Scene load_scene_kitti(const std::filesystem::path& bin_path,
                       const std::optional<std::filesystem::path>& label_path,
                       const LabelSchema& schema, SceneId id) {
  const auto bytes = read_bytes(bin_path);
  if (bytes.size() % kPointRecord != 0) {
    throw FormatError(bin_path.string() + ": size " +
                      std::to_string(bytes.size()) +
                      " is not a multiple of 16 bytes");
  }
  const auto m = static_cast<Eigen::Index>(bytes.size() / kPointRecord);
  Scene::Coords coords(m, 3);
  Scene::Features feats(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const unsigned char* rec = bytes.data() + i * kPointRecord;
    coords(i, 0) = get_f32(rec);
    coords(i, 1) = get_f32(rec + 4);
    coords(i, 2) = get_f32(rec + 8);
    feats(i, 0) = get_f32(rec + 12);
  }

  std::optional<Scene::Labels> labels;
  if (label_path) {
    const auto lbytes = read_bytes(*label_path);
    if (lbytes.size() % kLabelRecord != 0) {
      throw FormatError(label_path->string() +
                        ": size is not a multiple of 4 bytes");
    }
    if (static_cast<Eigen::Index>(lbytes.size() / kLabelRecord) != m) {
      throw ConsistencyError(label_path->string() + ": " +
                             std::to_string(lbytes.size() / kLabelRecord) +
                             " labels for " + std::to_string(m) + " points");
    }
    labels.emplace();
    labels->reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::uint32_t raw = get_u32(lbytes.data() + i * kLabelRecord);
      labels->push_back(schema.remap_raw(raw & 0xFFFFu));
    }
  }
  return Scene(id, std::move(coords), std::move(feats), std::move(labels));
}

void save_scene(const Scene& scene, const std::filesystem::path& bin_path,
                const std::optional<std::filesystem::path>& label_path) {
  if (scene.has_labels() != label_path.has_value()) {
    throw PreconditionError(
        "save_scene: label path must be given exactly for labeled scenes");
  }
  if (scene.feature_dim() > 1) {
    throw PreconditionError("save_scene: format stores one feature column");
  }
  const Eigen::Index m = scene.size();
  std::vector<unsigned char> bytes;
  bytes.reserve(static_cast<std::size_t>(m) * kPointRecord);
  for (Eigen::Index i = 0; i < m; ++i) {
    put_f32(bytes, scene.coords()(i, 0));
    put_f32(bytes, scene.coords()(i, 1));
    put_f32(bytes, scene.coords()(i, 2));
    put_f32(bytes, scene.feature_dim() == 1 ? scene.feats()(i, 0) : 0.0f);
  }
  write_bytes(bin_path, bytes);

  if (label_path) {
    std::vector<unsigned char> lbytes;
    lbytes.reserve(static_cast<std::size_t>(m) * kLabelRecord);
    for (ClassId c : scene.labels()) put_u32(lbytes, c.value);
    write_bytes(*label_path, lbytes);
  }
}

void save_provenance(const Provenance& origin,
                     const std::filesystem::path& path) {
  std::vector<unsigned char> bytes;
  bytes.reserve(origin.size() * kOriginRecord);
  for (const PointOrigin& o : origin) {
    put_u32(bytes, o.scene.value);
    put_u32(bytes, o.point);
    put_u32(bytes, static_cast<std::uint32_t>(o.branch));
  }
  write_bytes(path, bytes);
}

Provenance load_provenance(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() % kOriginRecord != 0) {
    throw FormatError(path.string() + ": size is not a multiple of 12 bytes");
  }
  Provenance out;
  out.reserve(bytes.size() / kOriginRecord);
  for (std::size_t off = 0; off < bytes.size(); off += kOriginRecord) {
    const std::uint32_t tag = get_u32(bytes.data() + off + 8);
    if (tag > 2) throw FormatError(path.string() + ": bad branch tag");
    out.push_back({SceneId{get_u32(bytes.data() + off)},
                   get_u32(bytes.data() + off + 4), static_cast<Branch>(tag)});
  }
  return out;
}

}  // namespace aiscene
