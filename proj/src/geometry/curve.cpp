#include "cvembem/geometry/curve.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <cmath>

namespace cvembem::geometry {

double ParametricCurve::curvature(double t) const
{
    const Point d1 = derivative(t);
    const Point d2 = second_derivative(t);
    return cross(d1, d2) / std::pow(d1.norm(), 3);
}

Ellipse::Ellipse(Point center, double a, double b) : center_(std::move(center)), a_(a), b_(b)
{
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
}

Point Ellipse::point(double t) const { return center_ + Point(a_ * std::cos(t), b_ * std::sin(t)); }
Point Ellipse::derivative(double t) const { return {-a_ * std::sin(t), b_ * std::cos(t)}; }
Point Ellipse::second_derivative(double t) const { return {-a_ * std::cos(t), -b_ * std::sin(t)}; }

// cos(t+d) - cos(t) = -2 sin(t + d/2) sin(d/2), sin(t+d) - sin(t) = 2 cos(t + d/2) sin(d/2)
Point Ellipse::chord(double t, double d) const
{
    const double m = t + 0.5 * d;
    const double s = std::sin(0.5 * d);
    return {-2.0 * a_ * std::sin(m) * s, 2.0 * b_ * std::cos(m) * s};
}

double Ellipse::chord_dot_normal(double t, double d) const
{
    const double s = std::sin(0.5 * d);
    return -2.0 * a_ * b_ * s * s / speed(t);
}

double Ellipse::curvature(double t) const
{
    const double st = std::sin(t);
    const double ct = std::cos(t);
    return a_ * b_ / std::pow(a_ * a_ * st * st + b_ * b_ * ct * ct, 1.5);
}

std::string Ellipse::kind() const { return is_circle() ? "circle" : "ellipse"; }

std::vector<double> Ellipse::parameters() const
{
    if (is_circle()) return {center_.x(), center_.y(), a_};
    return {center_.x(), center_.y(), a_, b_};
}

CurvePtr make_circle(double radius, Point center) { return std::make_shared<Ellipse>(center, radius, radius); }

CurvePtr make_ellipse(double a, double b, Point center) { return std::make_shared<Ellipse>(center, a, b); }

CurvePtr make_curve(const std::string& kind, const std::vector<double>& params)
{
    if (kind == "circle" && params.size() == 3) return make_circle(params[2], Point(params[0], params[1]));
    if (kind == "ellipse" && params.size() == 4) return make_ellipse(params[2], params[3], Point(params[0], params[1]));
    throw std::invalid_argument("unknown curve '" + kind + "' or wrong parameter count");
}

double ParametricArc::length(int n_gauss) const
{
    const auto& rule = quadrature::gauss_legendre(n_gauss);
    const double half = 0.5 * std::abs(t1 - t0);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * curve->speed(parameter(rule.nodes[q]));
    return half * sum;
}

} // namespace cvembem::geometry
