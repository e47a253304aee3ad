#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

class BallSpec;

struct LpBall {
  Exponent p;
};

/// l_r norm of the l_q norms of the columns. Column j occupies flat indices [j*rows, (j+1)*rows).
struct GroupBall {
  Exponent q;
  Exponent r;
  std::size_t rows;
  std::size_t cols;
};

/// l_p norm of singular values of a row-major rows x cols matrix.
struct SchattenBall {
  Exponent p;
  std::size_t rows;
  std::size_t cols;
};

/// Convex hull of {+v_i, -v_i}.
struct VertexHullBall {
  std::vector<Vec> vertices;
};

/// Probability simplex. Norm computations use the l1 ball, its symmetric hull; membership and
/// the linear oracle use the simplex itself.
struct SimplexBall {};

/// Unit ball of the sum of two gauges.
struct Interp1Ball {
  std::shared_ptr<const BallSpec> a;
  std::shared_ptr<const BallSpec> b;
};

/// Unit ball of the infimal convolution of two gauges, i.e. conv(A u B).
struct Interp2Ball {
  std::shared_ptr<const BallSpec> a;
  std::shared_ptr<const BallSpec> b;
};

/// Immutable description of a centrally symmetric convex body radius * K.
class BallSpec {
 public:
  using Kind = std::variant<LpBall, GroupBall, SchattenBall, VertexHullBall, SimplexBall,
                            Interp1Ball, Interp2Ball>;

  static BallSpec lp(Exponent p, std::size_t dim, double radius = 1.0);
  static BallSpec lp(double p, std::size_t dim, double radius = 1.0) {
    return lp(Exponent(p), dim, radius);
  }
  static BallSpec group(Exponent q, Exponent r, std::size_t rows, std::size_t cols,
                        double radius = 1.0);
  static BallSpec schatten(Exponent p, std::size_t rows, std::size_t cols, double radius = 1.0);
  static BallSpec vertex_hull(std::vector<Vec> vertices, double radius = 1.0);
  static BallSpec simplex(std::size_t dim);
  static BallSpec interp1(const BallSpec& a, const BallSpec& b, double radius = 1.0);
  static BallSpec interp2(const BallSpec& a, const BallSpec& b, double radius = 1.0);

  const Kind& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double radius() const { return radius_; }
  BallSpec with_radius(double radius) const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }
  bool is_simplex() const { return as<SimplexBall>() != nullptr; }

  /// Round-trippable text form, e.g. "lp(2)*0.5", "interp1(lp(1);lp(2))".
  std::string describe() const;

 private:
  BallSpec(Kind kind, std::size_t dim, double radius);
  Kind kind_;
  std::size_t dim_;
  double radius_;
};

struct GeometryPair {
  BallSpec w_ball;
  BallSpec x_ball;

  GeometryPair(BallSpec w, BallSpec x);
  std::size_t dim() const { return w_ball.dim(); }
};

/// Minkowski functional of the ball; kUnboundedGauge outside the span of a vertex hull.
double gauge_norm(const BallSpec& b, std::span<const double> v);

/// sup{<x, v> : gauge(v) <= 1}.
double dual_norm(const BallSpec& b, std::span<const double> x);

/// sup{<x, v> : v in the body}. Differs from dual_norm only for the simplex.
double support_function(const BallSpec& b, std::span<const double> x);

/// A maximizer of <x, v> over the body. Ties resolve to the lexicographically first vertex with
/// + before -; x = 0 is treated as the all-ones direction.
Vec support_point(const BallSpec& b, std::span<const double> x);

/// Linear minimization oracle: argmin of <g, v> over the body.
Vec lmo(const BallSpec& b, std::span<const double> g);

/// s with <s, v> = gauge(v) and dual_norm(s) <= 1; zero at v = 0.
Vec gauge_subgradient(const BallSpec& b, std::span<const double> v);

bool contains(const BallSpec& b, std::span<const double> v, double tol);

/// Nonincreasing singular values of a row-major rows x cols matrix.
Vec schatten_singular_values(std::span<const double> flat, std::size_t rows, std::size_t cols);

/// Extreme points of polytope bodies (l1, l_inf, simplex, vertex hulls, polyhedral group
/// balls), or nullopt when the body is not a polytope or has more than `limit` vertices.
std::optional<std::vector<Vec>> extreme_points(const BallSpec& b, std::size_t limit = 1u << 16);

/// Dual ball for the families with a closed-form dual; nullopt otherwise.
std::optional<BallSpec> dual_ball(const BallSpec& b);

/// Random point of the body with gauge uniform in [0, 1].
Vec sample_in_ball(const BallSpec& b, std::mt19937_64& rng);

/// Upper bound on the Euclidean radius of the body.
double euclidean_radius_bound(const BallSpec& b);

/// Parses the text produced by describe(); `dim` fixes the ambient dimension of lp/simplex.
BallSpec parse_ball(const std::string& text, std::size_t dim);

}  // namespace mirrorgeo
