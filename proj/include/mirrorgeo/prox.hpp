#pragma once

#include <span>

#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/regularizers.hpp"
#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

enum class ProjectionRoute {
  kIdentity,     // y already in W
  kRadial,       // Psi is a function of the gauge of W
  kNormalize,    // entropy onto the simplex
  kThreshold,    // power regularizer onto l1 or the simplex, thresholding in the dual
  kSeparable,    // power regularizer onto l_s, s in (1, inf], by one-dimensional roots
  kGroup,        // group regularizer, reduced to the column norms
  kSpectral,     // Schatten regularizer onto a Schatten ball, reduced to singular values
  kFrankWolfe,   // generic route; pairwise steps on polytopes
};

const char* to_string(ProjectionRoute route);

struct ProjectionResult {
  Vec point;
  /// Frank-Wolfe duality gap at `point` (an upper bound on the suboptimality).
  double residual = 0.0;
  int iterations = 0;
  ProjectionRoute route = ProjectionRoute::kIdentity;
};

struct ProjectionOptions {
  /// Stop when the gap is at most gap_tol * max(1, |<grad Psi(y), w>|).
  double gap_tol = 1e-9;
  int max_iterations = 10000;
  /// Skip the analytic routes. Used to cross-check them.
  bool force_frank_wolfe = false;
};

/// argmin over the ball of the Bregman divergence B_Psi(w | y).
/// Throws SolverError when Frank-Wolfe exhausts its budget above the gap tolerance, and
/// InvalidArgument for non-finite y, y outside the domain of Psi, or Psi undefined on W.
ProjectionResult bregman_project(const Regularizer& reg, const BallSpec& w_ball,
                                 std::span<const double> y, const ProjectionOptions& opts = {});

/// Same projection with y given through theta = grad Psi(y).
ProjectionResult bregman_project_dual(const Regularizer& reg, const BallSpec& w_ball,
                                      std::span<const double> theta,
                                      const ProjectionOptions& opts = {});

/// grad Psi*(grad Psi(w) - eta g).
Vec dual_step(const Regularizer& reg, std::span<const double> w, std::span<const double> g,
              double eta);

}  // namespace mirrorgeo
