#include "cvembem/quadrature/singular.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <cmath>

namespace cvembem::quadrature {

PairRelation classify_pair(int p, int q, int n_cells)
{
    if (p == q) return PairRelation::Coincident;
    const int d = ((q - p) % n_cells + n_cells) % n_cells;
    if (d == 1 || d == n_cells - 1) return PairRelation::Adjacent;
    return PairRelation::Far;
}

std::vector<std::pair<double, double>> graded_rule(double length, int n, int q)
{
    if (q < 1) throw std::invalid_argument("grading exponent q must be >= 1");
    const auto& g = gauss_legendre(n);
    std::vector<std::pair<double, double>> out;
    out.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = 0.5 * (g.nodes[i] + 1.0);
        out.emplace_back(length * std::pow(v, q), 0.5 * g.weights[i] * length * q * std::pow(v, q - 1));
    }
    return out;
}

namespace {

std::vector<PairNode> far_rule(const geometry::ParametricArc& outer, const geometry::ParametricArc& inner, int n_out,
                               int n_in)
{
    const auto& go = gauss_legendre(n_out);
    const auto& gi = gauss_legendre(n_in);
    const double jo = 0.5 * (outer.t1 - outer.t0);
    const double ji = 0.5 * (inner.t1 - inner.t0);
    std::vector<PairNode> nodes;
    nodes.reserve(go.size() * gi.size());
    for (std::size_t a = 0; a < go.size(); ++a)
        for (std::size_t b = 0; b < gi.size(); ++b)
            nodes.push_back({go.nodes[a], gi.nodes[b], go.weights[a] * gi.weights[b] * jo * ji,
                             inner.parameter(gi.nodes[b]) - outer.parameter(go.nodes[a])});
    return nodes;
}

// r = s - t = H v^q, t - t0 = (H - r) τ; both orderings (s > t and s < t)
std::vector<PairNode> coincident_rule(const geometry::ParametricArc& arc, const SingularRuleOptions& opt)
{
    const double h = arc.t1 - arc.t0;
    const auto radial = graded_rule(h, opt.coincident_radial, opt.q);
    const auto& tg = gauss_legendre(opt.coincident_tangential);
    auto xi = [h](double local) { return -1.0 + 2.0 * local / h; };
    std::vector<PairNode> nodes;
    nodes.reserve(2 * radial.size() * tg.size());
    for (const auto& [r, wr] : radial) {
        const double len = h - r;
        for (std::size_t j = 0; j < tg.size(); ++j) {
            const double t = 0.5 * len * (tg.nodes[j] + 1.0);
            const double w = wr * 0.5 * len * tg.weights[j];
            nodes.push_back({xi(t), xi(t + r), w, r});
            nodes.push_back({xi(t + r), xi(t), w, -r});
        }
    }
    return nodes;
}

// a = distance of the outer point from the shared endpoint, b the same for the
// inner point; the square [0,Ho]×[0,Hi] is split along its diagonal into two
// triangles, each collapsed onto the corner (a, b) = (0, 0).
std::vector<PairNode> adjacent_rule(const geometry::ParametricArc& outer, const geometry::ParametricArc& inner,
                                    const SingularRuleOptions& opt)
{
    const double tol = 1e-12 * (1.0 + outer.end().norm());
    const bool inner_follows = (outer.end() - inner.start()).norm() < tol;
    const bool inner_precedes = (outer.start() - inner.end()).norm() < tol;
    if (inner_follows == inner_precedes) throw Error("adjacent pair must share exactly one endpoint");

    const double ho = std::abs(outer.t1 - outer.t0);
    const double hi = std::abs(inner.t1 - inner.t0);
    const auto radial = graded_rule(1.0, opt.adjacent_radial, opt.q);
    const auto& ag = gauss_legendre(opt.adjacent_angular);
    std::vector<PairNode> nodes;
    nodes.reserve(2 * radial.size() * ag.size());
    for (const auto& [rho, wr] : radial) {
        for (std::size_t j = 0; j < ag.size(); ++j) {
            const double w = 0.5 * (ag.nodes[j] + 1.0);
            const double weight = wr * 0.5 * ag.weights[j] * ho * hi * rho;
            for (int half = 0; half < 2; ++half) {
                const double a = half == 0 ? ho * rho : ho * rho * w;
                const double b = half == 0 ? hi * rho * w : hi * rho;
                if (inner_follows)
                    nodes.push_back({1.0 - 2.0 * a / ho, -1.0 + 2.0 * b / hi, weight, a + b});
                else
                    nodes.push_back({-1.0 + 2.0 * a / ho, 1.0 - 2.0 * b / hi, weight, -(a + b)});
            }
        }
    }
    return nodes;
}

} // namespace

std::vector<PairNode> q_smoothed_pair_rule(const geometry::ParametricArc& outer, const geometry::ParametricArc& inner,
                                           PairRelation relation, const SingularRuleOptions& options)
{
    if (options.q < 1) throw std::invalid_argument("smoothing exponent q must be >= 1");
    switch (relation) {
    case PairRelation::Coincident: return coincident_rule(outer, options);
    case PairRelation::Adjacent: return adjacent_rule(outer, inner, options);
    default: return far_rule(outer, inner, options.far_outer, options.far_inner);
    }
}

} // namespace cvembem::quadrature
