#pragma once

#include "cvembem/geometry/curve.hpp"

#include <utility>
#include <vector>

namespace cvembem::quadrature {

enum class PairRelation { Coincident, Adjacent, Far };

/// Node counts for the boundary double integrals. Coincident and adjacent
/// pairs are integrated in relative coordinates, with the radial variable
/// graded as r = H v^q towards the singular set.
struct SingularRuleOptions {
    int q = 3;
    int far_outer = 9;
    int far_inner = 8;
    int adjacent_radial = 32;
    int adjacent_angular = 32;
    int coincident_radial = 256;
    int coincident_tangential = 9;
};

/// Two partition cells are adjacent only when they share an endpoint.
PairRelation classify_pair(int p, int q, int n_cells);

struct PairNode {
    double xi_outer;
    double xi_inner;
    /// Product of the parameter Jacobians (no arclength factor).
    double weight;
    /// Inner parameter minus outer parameter, free of cancellation.
    double offset;
};

/// Product-type rule for ∫_outer ∫_inner F(t, s) ds dt with a logarithmic
/// singularity at s = t. For adjacent pairs the arcs must share an endpoint.
std::vector<PairNode> q_smoothed_pair_rule(const geometry::ParametricArc& outer, const geometry::ParametricArc& inner,
                                           PairRelation relation, const SingularRuleOptions& options = {});

/// Gauss rule on [0, length] graded towards 0 by u = length·v^q.
/// Returns (u, weight) pairs.
std::vector<std::pair<double, double>> graded_rule(double length, int n, int q);

} // namespace cvembem::quadrature
