#include "aiscene/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "aiscene/errors.hpp"

namespace aiscene {
namespace {

constexpr std::array<char, 8> kMagic{'A', 'I', 'S', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& path) {
  const auto& s = checkpoint.state;
  if (s.student.size() != s.teacher.size()) {
    throw ConsistencyError("checkpoint: student and teacher sizes differ");
  }
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  put_u64(bytes, checkpoint.config_hash);
  put_u64(bytes, s.step);
  put_u64(bytes, static_cast<std::uint64_t>(s.student.size()));
  for (const ParamVector* v : {&s.student, &s.teacher}) {
    for (double x : *v) put_u64(bytes, std::bit_cast<std::uint64_t>(x));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 8 + 3 * 8;
  if (bytes.size() < kHeader ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError(path.string() + ": not a checkpoint");
  }
  Checkpoint out;
  out.config_hash = get_u64(bytes.data() + 8);
  out.state.step = get_u64(bytes.data() + 16);
  const std::uint64_t n = get_u64(bytes.data() + 24);
  if (bytes.size() != kHeader + 16 * n) {
    throw FormatError(path.string() + ": truncated checkpoint");
  }
  const unsigned char* p = bytes.data() + kHeader;
  for (ParamVector* v : {&out.state.student, &out.state.teacher}) {
    v->resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i, p += 8) {
      (*v)[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(get_u64(p));
    }
  }
  return out;
}

}  // namespace aiscene
