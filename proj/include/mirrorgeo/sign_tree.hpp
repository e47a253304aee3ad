#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

/// Complete binary tree of dual vectors x_i(e_1..e_{i-1}). Level i (1-based) holds 2^{i-1}
/// nodes indexed by the sign path, where e_j = -1 sets bit j-1 of the path index.
struct SignTree {
  static constexpr std::size_t kMaxDepth = 24;

  std::size_t depth = 0;
  std::size_t dim = 0;
  std::vector<Vec> nodes;
  std::optional<Vec> root;

  SignTree() = default;
  SignTree(std::size_t depth_, std::size_t dim_) : depth(depth_), dim(dim_) {
    if (depth_ > kMaxDepth) throw InvalidArgument("SignTree: depth exceeds the memory cap");
    nodes.assign((std::size_t{1} << depth_) - 1, Vec(dim_, 0.0));
  }

  /// Every node equal to x.
  static SignTree constant(std::size_t depth_, const Vec& x) {
    SignTree t(depth_, x.size());
    for (Vec& n : t.nodes) n = x;
    return t;
  }

  static std::size_t index(std::size_t level, std::uint64_t path) {
    return (std::size_t{1} << (level - 1)) - 1 + static_cast<std::size_t>(path);
  }
  Vec& node(std::size_t level, std::uint64_t path) { return nodes.at(index(level, path)); }
  const Vec& node(std::size_t level, std::uint64_t path) const {
    return nodes.at(index(level, path));
  }
};

}  // namespace mirrorgeo
