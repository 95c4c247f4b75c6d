#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>

namespace aiscene {

/// Semantic class identifier within a LabelSchema.
struct ClassId {
  std::uint16_t value{0};

  friend constexpr auto operator<=>(ClassId, ClassId) = default;
};

/// Row-major linear index of a BEV grid cell: row * n + col.
struct PatchIndex {
  std::uint32_t value{0};

  friend constexpr auto operator<=>(PatchIndex, PatchIndex) = default;
};

/// Opaque scene identifier, carried through pools and provenance records.
struct SceneId {
  std::uint32_t value{0};

  friend constexpr auto operator<=>(SceneId, SceneId) = default;
};

/// Every stochastic operation takes this engine explicitly.
using Rng = std::mt19937_64;

/// Per-point class probabilities, one row per point.
template <typename Scalar>
using BasicPointProbs =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PointProbs = BasicPointProbs<double>;

/// Derives an independent engine from a base seed and a stream tag.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace aiscene

template <>
struct std::hash<aiscene::ClassId> {
  std::size_t operator()(aiscene::ClassId c) const noexcept { return c.value; }
};
