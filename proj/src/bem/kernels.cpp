#include "cvembem/bem/bem.hpp"

#include <cmath>

namespace cvembem::bem {

namespace {
constexpr double inv_two_pi = 1.0 / two_pi;
}

double kernel_G(const Point& x, const Point& y)
{
    const double r = (x - y).norm();
    if (r == 0.0) throw std::invalid_argument("kernel_G: coincident points");
    return -inv_two_pi * std::log(r);
}

double kernel_dGdn(const Point& x, const Point& y, const Point& n_y, const CoincidenceLimit& limit)
{
    const Point r = x - y;
    const double r2 = r.squaredNorm();
    if (r2 <= limit.threshold * limit.threshold) return -limit.curvature * 0.5 * inv_two_pi;
    return inv_two_pi * r.dot(n_y) / r2;
}

double single_layer_kernel(const geometry::ParametricCurve& curve, double t, double d)
{
    return -inv_two_pi * std::log(curve.chord(t, d).norm());
}

double double_layer_kernel(const geometry::ParametricCurve& curve, double t, double d)
{
    const Point r = curve.chord(t, d);
    const double r2 = r.squaredNorm();
    const double scale = 1e-12 * curve.speed(t);
    if (r2 <= scale * scale) return -curve.curvature(t) * 0.5 * inv_two_pi;
    return inv_two_pi * curve.chord_dot_normal(t, d) / r2;
}

} // namespace cvembem::bem
