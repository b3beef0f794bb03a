#include "cvembem/quadrature/rules.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <algorithm>
#include <cmath>

namespace cvembem::quadrature {

std::vector<EdgePoint> edge_quadrature(const geometry::EdgeGeometry& edge, int n)
{
    const auto& rule = gauss_legendre(n);
    std::vector<EdgePoint> points;
    points.reserve(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double xi = rule.nodes[q];
        const Point t = edge.tangent(xi);
        const double speed = t.norm();
        points.push_back({edge.point(xi), rule.weights[q] * speed, Point(t.y(), -t.x()) / speed, xi});
    }
    return points;
}

int edge_points_for_degree(const geometry::EdgeGeometry& edge, int degree)
{
    const int exact = degree / 2 + 1;
    return edge.curved() ? std::max(16, exact + 4) : exact;
}

MonomialMoments::MonomialMoments(int max_degree, Point center, double scale)
    : max_degree_(max_degree), center_(std::move(center)), scale_(scale),
      data_(static_cast<std::size_t>(max_degree + 1) * (max_degree + 1), 0.0)
{
}

MonomialMoments polygon_monomial_moments(const geometry::CurvedPolygon& polygon, int max_degree, const Point& center,
                                         double scale, int curved_points)
{
    if (max_degree < 0) throw std::invalid_argument("max_degree must be >= 0");
    MonomialMoments m(max_degree, center, scale);
    std::vector<double> xp(max_degree + 2), yp(max_degree + 1);
    for (const auto& edge : polygon.edges) {
        int n = edge_points_for_degree(edge, max_degree + 1);
        if (edge.curved()) n = std::max(n, curved_points);
        for (const auto& p : edge_quadrature(edge, n)) {
            const double x = (p.x.x() - center.x()) / scale;
            const double y = (p.x.y() - center.y()) / scale;
            xp[0] = yp[0] = 1.0;
            for (int i = 1; i <= max_degree + 1; ++i) xp[i] = xp[i - 1] * x;
            for (int i = 1; i <= max_degree; ++i) yp[i] = yp[i - 1] * y;
            const double wn = p.weight * p.normal.x() * scale;
            for (int a = 0; a <= max_degree; ++a)
                for (int b = 0; a + b <= max_degree; ++b) m.at(a, b) += wn * xp[a + 1] * yp[b] / (a + 1);
        }
    }
    return m;
}

PolygonRule polygon_quadrature(const geometry::CurvedPolygon& polygon, int n)
{
    if (n < 1) throw std::invalid_argument("polygon_quadrature: n must be >= 1");
    const Point c = geometry::polygon_centroid(polygon);
    const auto& g = gauss_legendre(n + 1);
    PolygonRule rule;
    for (const auto& edge : polygon.edges) {
        const auto& tau_rule = edge.curved() ? gauss_legendre(std::max(n + 1, 16)) : g;
        for (std::size_t j = 0; j < tau_rule.size(); ++j) {
            const double tau = tau_rule.nodes[j];
            const Point e = edge.point(tau) - c;
            const double jac = cross(e, edge.tangent(tau));
            if (!(jac > 0.0)) throw Error("polygon_quadrature: element is not star-shaped with respect to its centroid");
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double u = 0.5 * (g.nodes[i] + 1.0);
                rule.nodes.push_back(c + u * e);
                rule.weights.push_back(0.5 * g.weights[i] * tau_rule.weights[j] * u * jac);
            }
        }
    }
    return rule;
}

} // namespace cvembem::quadrature
