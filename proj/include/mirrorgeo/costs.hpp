#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/regularizers.hpp"
#include "mirrorgeo/sign_tree.hpp"
#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

/// w -> <x, w>.
struct LinearCost {
  Vec x;
};

/// w -> |<x, w> - y| with |y| <= b.
struct AbsLossCost {
  Vec x;
  double y;
  double b;
};

/// w -> max(0, 1 - y <x, w>) with y = +-1.
struct HingeCost {
  Vec x;
  double y;
};

class CostFunction {
 public:
  using Kind = std::variant<LinearCost, AbsLossCost, HingeCost>;

  static CostFunction linear(Vec x);
  static CostFunction abs_loss(Vec x, double y, double b);
  static CostFunction hinge(Vec x, double y);

  const Kind& kind() const { return kind_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }
  const Vec& data() const;
  std::size_t dim() const { return data().size(); }
  bool is_linear() const { return as<LinearCost>() != nullptr; }

  double value(std::span<const double> w) const;
  /// Linear: x. AbsLoss: sign(<x,w> - y) x with sign(0) = +1. Hinge: -y x on the active side.
  Vec subgradient(std::span<const double> w) const;
  std::string describe() const;

 private:
  explicit CostFunction(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Replays a fixed sequence.
struct FixedAdversary {
  std::vector<CostFunction> costs;
};

/// Linear cost at the support point of X in the direction w_t.
struct SignGreedyAdversary {
  BallSpec x_ball;
};

/// Linear cost at a uniformly drawn extreme point of X.
struct RandomVertexAdversary {
  BallSpec x_ball;
  std::uint64_t seed;
};

/// Linear cost e_t x_t(e_1..e_{t-1}) along a uniformly drawn sign path.
struct TreeReplayAdversary {
  SignTree tree;
  std::uint64_t seed;
};

/// Stateful cost generator; one instance per run.
class Adversary {
 public:
  using Kind =
      std::variant<FixedAdversary, SignGreedyAdversary, RandomVertexAdversary, TreeReplayAdversary>;

  static Adversary fixed(std::vector<CostFunction> costs);
  static Adversary sign_greedy(BallSpec x_ball);
  static Adversary random_vertex(BallSpec x_ball, std::uint64_t seed);
  static Adversary tree_replay(SignTree tree, std::uint64_t seed);

  /// Cost for round t >= 1 given the learner's current point. Throws InvalidArgument once a
  /// fixed sequence or tree is exhausted.
  CostFunction next_cost(std::span<const double> w_t, long t);
  const Kind& kind() const { return kind_; }
  std::string describe() const;
  /// Sign path drawn so far by a tree replay (bit j-1 set when e_j = -1).
  std::uint64_t path() const { return path_; }

 private:
  explicit Adversary(Kind kind, std::uint64_t seed);
  Kind kind_;
  std::mt19937_64 rng_;
  std::vector<Vec> vertices_;  // cached extreme points for RandomVertex
  std::uint64_t path_ = 0;
};

/// Uniform extreme point of X: random signs on l_inf, random +-e_i on l1, listed vertices of
/// small polytopes, and a normalized Gaussian direction on the boundary otherwise.
Vec random_extreme_point(const BallSpec& x_ball, std::mt19937_64& rng,
                         const std::vector<Vec>* vertices = nullptr);

struct ValueOrderingReport {
  double linear_regret;
  double abs_loss_regret;
  /// 2 (sup_W Psi / n)^{1/q}, shared by both runs.
  double bound;
  bool linear_within_bound;
  bool abs_loss_within_bound;
};

/// Runs mirror descent against Linear(x_t) and AbsLoss(x_t, 0, 1) on one x-sequence of random
/// extreme points of X and checks both regrets against the shared upper bound. Only the bound
/// is asserted: equality of the game values says nothing about single runs.
ValueOrderingReport class_value_ordering_check(const GeometryPair& pair, const Regularizer& reg,
                                               long n, std::uint64_t seed);

}  // namespace mirrorgeo
