#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

/// r in (1, 2]: ||w||_r^2 / (2(r-1)).  r > 2: (2^r / r) ||w||_r^r.
struct PsiR {
  double r;
};

/// sum_i w_i log(d w_i) on the simplex; zero at the uniform point, log d at a vertex.
struct EntropyPsi {};

/// ||w||_2^2 / 2.
struct EuclideanHalfSq {};

/// ||w||_{q,r}^2 / (q + r - 2), columns laid out as in GroupBall.
struct GroupSquared {
  double q;
  double r;
  std::size_t rows;
  std::size_t cols;
};

/// ||w||_{W,q}^2 / (2(q-1)) with ||w||_{W,q} = min{||a||_q : sum_i a_i v_i = w}.
struct VertexHullSquared {
  double q;
  std::vector<Vec> vertices;
};

/// PsiR applied to the singular values of a row-major rows x cols matrix.
struct SchattenPsiR {
  double r;
  std::size_t rows;
  std::size_t cols;
};

/// Psi = scale * Psi_0 for one of the kinds above. Immutable.
class Regularizer {
 public:
  using Kind =
      std::variant<PsiR, EntropyPsi, EuclideanHalfSq, GroupSquared, VertexHullSquared, SchattenPsiR>;

  /// Q-uniformly convex w.r.t. scale^{1/Q} ||.||_r, Q = max(r, 2).
  static Regularizer psi_r(double r, std::size_t dim, double scale = 1.0);
  static Regularizer entropy(std::size_t dim);
  static Regularizer euclidean(std::size_t dim, double scale = 1.0);
  /// Strongly convex w.r.t. a multiple of ||.||_{q,r}; the multiple is recorded in the
  /// convexity norm. Requires q, r in (1, 2].
  static Regularizer group_squared(double q, double r, std::size_t rows, std::size_t cols,
                                   double scale = 1.0);
  /// Requires q in (1, 2] and vertices spanning the space.
  static Regularizer vertex_hull_squared(double q, std::vector<Vec> vertices, double scale = 1.0);
  /// Uniform convexity is not certified for this kind.
  static Regularizer schatten_psi_r(double r, std::size_t rows, std::size_t cols,
                                    double scale = 1.0);

  /// Same function with a caller-certified convexity norm (e.g. the dual gauge of X).
  Regularizer with_convexity_norm(BallSpec norm) const;

  const Kind& kind() const { return kind_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }
  std::size_t dim() const { return dim_; }
  double scale() const { return scale_; }
  double q_exponent() const { return q_; }
  /// p = q / (q - 1).
  double p_exponent() const { return q_ / (q_ - 1.0); }
  /// Psi(a w + (1-a) w') <= a Psi(w) + (1-a) Psi(w') - a(1-a)/q ||w - w'||^q in this gauge.
  const BallSpec& convexity_norm() const { return norm_; }
  bool certified() const { return certified_; }
  std::string describe() const;

 private:
  Regularizer(Kind kind, std::size_t dim, double scale, double q, BallSpec norm, bool certified);
  Kind kind_;
  std::size_t dim_;
  double scale_;
  double q_;
  BallSpec norm_;
  bool certified_;
};

/// Subgradient floor applied to entropy coordinates before the logarithm.
inline constexpr double kEntropyFloor = 1e-12;

double psi_eval(const Regularizer& reg, std::span<const double> w);
Vec psi_grad(const Regularizer& reg, std::span<const double> w);
Vec psi_conj_grad(const Regularizer& reg, std::span<const double> theta);
/// Psi(a) - Psi(b) - <grad Psi(b), a - b>.
double bregman_divergence(const Regularizer& reg, std::span<const double> a,
                          std::span<const double> b);

struct SupResult {
  double value;
  /// False when the value is only the best point found by search (a lower bound).
  bool certified;
};

/// sup over the ball of Psi. Throws InvalidArgument for dimension mismatch.
SupResult sup_over_ball(const Regularizer& reg, const BallSpec& w_ball);

/// (sup_W Psi)^{(p-1)/p}; p must lie in (1, 2].
double d_p_upper(const Regularizer& reg, const BallSpec& w_ball, double p);

/// d^{Q max(1/q2 - 1/r, 0)} psi_r with q2 = conjugate(p2), convex w.r.t. ||.||_{q2}.
Regularizer scaled_psi_for_lp_pair(Exponent p1, Exponent p2, std::size_t d, double r);

/// 2 max(2, 1/sqrt(2(r-1))) d^{max(1/q2 - 1/r, 0) + max(1/r - 1/p1, 0)} / n^{1/max(r,2)}.
double lp_regret_bound(Exponent p1, Exponent p2, std::size_t d, double r, long n);

/// Grid minimizer of lp_regret_bound over 200 log-spaced r in [1 + 1e-3, r_max] plus r = 2;
/// near-ties go to the candidate closest to 2.
double pick_r(Exponent p1, Exponent p2, std::size_t d, long n, double r_max = 64.0);

/// Group regularizer for W = B_{(q,1)}, X = B_inf on a rows x cols layout, with
/// r = log d / (log d - 1) (r = 2 once log d <= 2), scaled to be 2-uniformly convex w.r.t. l1.
Regularizer group_regularizer_for_linf(double q, std::size_t rows, std::size_t cols);

/// VertexHullSquared with q = log K / (log K - 1) (q = 2 once log K <= 2), scaled to be
/// 2-uniformly convex w.r.t. the dual gauge of X. X must have a closed-form dual ball.
Regularizer vertex_hull_regularizer_for(const std::vector<Vec>& vertices, const BallSpec& x_ball);

}  // namespace mirrorgeo
