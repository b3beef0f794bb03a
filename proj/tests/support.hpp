#pragma once

#include "cvembem/geometry/mesh.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using cvembem::Point;
using namespace cvembem::geometry;

inline CurvedPolygon straight_polygon(const std::vector<Point>& pts)
{
    CurvedPolygon p;
    for (std::size_t i = 0; i < pts.size(); ++i) p.edges.push_back({pts[i], pts[(i + 1) % pts.size()], std::nullopt});
    return p;
}

inline CurvedPolygon unit_square() { return straight_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

/// Unit square whose top edge is replaced by a unit-radius arc bulging upwards.
inline CurvedPolygon bulged_square()
{
    auto p = unit_square();
    const Point c(0.5, 1.0 - std::sqrt(3.0) / 2.0);
    p.edges[2].arc = ParametricArc{make_circle(1.0, c), M_PI / 3.0, 2.0 * M_PI / 3.0};
    return p;
}

/// Random convex-ish star-shaped polygon with 3 to 6 vertices, diameter O(scale).
inline CurvedPolygon random_polygon(std::mt19937& rng, double scale = 1.0)
{
    std::uniform_int_distribution<int> nv(3, 6);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    std::uniform_real_distribution<double> shift(-5.0, 5.0);
    const int n = nv(rng);
    const Point c(shift(rng), shift(rng));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * (i + jitter(rng)) / n;
        const double r = scale * (1.0 + jitter(rng));
        pts.push_back(c + r * Point(std::cos(t), std::sin(t)));
    }
    return straight_polygon(pts);
}

/// Adaptive Gauss-Kronrod integral of f over a (curved) polygon star-shaped
/// with respect to `center`: each edge fan x = c + u (e(τ) - c) is integrated
/// adaptively in both directions.
template <class F>
double adaptive_polygon_integral(const CurvedPolygon& poly, const Point& center, F&& f, double tol = 1e-14)
{
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (const auto& e : poly.edges) {
        auto outer = [&](double tau) {
            const Point d = e.point(tau) - center;
            const double jac = cvembem::cross(d, e.tangent(tau));
            auto inner = [&](double u) { return f(Point(center + u * d)) * u * jac; };
            return gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 12, tol);
        };
        total += gauss_kronrod<double, 31>::integrate(outer, -1.0, 1.0, 12, tol);
    }
    return total;
}

} // namespace testing

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace testing {

/// Lagrange basis on equispaced nodes of [-1,1] (degree 1 or 2), written out
/// independently of the library.
inline double reference_lagrange(int degree, int a, double xi)
{
    if (degree == 1) return a == 0 ? 0.5 * (1 - xi) : 0.5 * (1 + xi);
    if (a == 0) return 0.5 * xi * (xi - 1);
    if (a == 1) return 1 - xi * xi;
    return 0.5 * xi * (xi + 1);
}

/// Single-layer block ∫∫ G φ_a(x) φ_b(y) on a circle of radius R between the
/// outer cell [0, h] and the inner cell [m h, (m+1) h] (m = 0: coincident).
/// The integrals run over the offset u = s - t so the logarithm is evaluated
/// from 2R|sin(u/2)| without cancellation; tanh-sinh handles the endpoint
/// singularities. Offsets past half the circle use the symmetric pair so the
/// offset never reaches 2π.
inline double circle_v_offset_oracle(double radius, double h, int m, int degree, int a, int b)
{
    const int n = static_cast<int>(std::lround(2.0 * M_PI / h));
    if (2 * m > n) return circle_v_offset_oracle(radius, h, n - m, degree, b, a);
    boost::math::quadrature::tanh_sinh<double> ts(15);
    const double tol = 1e-15;
    auto g = [radius](double u) { return -std::log(2.0 * radius * std::abs(std::sin(0.5 * u))) / (2.0 * M_PI); };
    auto xi = [h](double local) { return -1.0 + 2.0 * local / h; };
    auto outer = [&](double t) {
        const double fa = reference_lagrange(degree, a, xi(t));
        if (m == 0) {
            auto right = [&](double u) { return g(u) * reference_lagrange(degree, b, xi(t + u)); };
            auto left = [&](double u) { return g(u) * reference_lagrange(degree, b, xi(t - u)); };
            double s = 0.0;
            if (h - t > 0) s += ts.integrate(right, 0.0, h - t, tol);
            if (t > 0) s += ts.integrate(left, 0.0, t, tol);
            return fa * s;
        }
        auto inner = [&](double u) { return g(u) * reference_lagrange(degree, b, xi(t + u - m * h)); };
        return fa * ts.integrate(inner, m * h - t, (m + 1) * h - t, tol);
    };
    return radius * radius * ts.integrate(outer, 0.0, h, tol);
}

inline double circle_v_block_oracle(double radius, double h, bool coincident, int degree, int a, int b)
{
    return circle_v_offset_oracle(radius, h, coincident ? 0 : 1, degree, a, b);
}

} // namespace testing
