#pragma once

#include "cvembem/geometry/mesh.hpp"

#include <vector>

namespace cvembem::quadrature {

struct EdgePoint {
    Point x;
    /// Includes the arclength factor, so the weights sum to the edge length.
    double weight;
    /// Unit normal to the right of the direction of travel.
    Point normal;
    /// Local edge coordinate in [-1, 1].
    double xi;
};

std::vector<EdgePoint> edge_quadrature(const geometry::EdgeGeometry& edge, int n);

/// Number of Gauss points used on an edge when integrating polynomials of
/// total degree `degree` over the element boundary.
int edge_points_for_degree(const geometry::EdgeGeometry& edge, int degree);

/// Moments m_ab = ∫_E ((x - c_x)/h)^a ((y - c_y)/h)^b for a + b <= max_degree.
class MonomialMoments {
public:
    MonomialMoments() = default;
    MonomialMoments(int max_degree, Point center, double scale);

    int max_degree() const { return max_degree_; }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }
    double operator()(int a, int b) const { return data_.at(index(a, b)); }
    double& at(int a, int b) { return data_.at(index(a, b)); }

private:
    std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * (max_degree_ + 1) + b; }

    int max_degree_ = 0;
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    std::vector<double> data_;
};

/// Divergence-theorem moments: ∫_E x^a y^b = h/(a+1) ∮ x^(a+1) y^b n_x ds in
/// scaled coordinates. Straight edges get an exact Gauss rule, curved edges
/// at least `curved_points` points.
MonomialMoments polygon_monomial_moments(const geometry::CurvedPolygon& polygon, int max_degree, const Point& center,
                                         double scale, int curved_points = 16);

struct PolygonRule {
    std::vector<Point> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Fan of sub-triangles from the centroid, each mapped from [0,1]×[-1,1]
/// through x = c + u (e(τ) - c) and integrated with (n+1)×(n+1) Gauss points;
/// exact to degree 2n on straight-edge polygons.
PolygonRule polygon_quadrature(const geometry::CurvedPolygon& polygon, int n);

} // namespace cvembem::quadrature
