#pragma once

#include "cvembem/common.hpp"

#include <memory>
#include <vector>
#include <string>

namespace cvembem::geometry {

/// Closed, 2π-periodic, counter-clockwise parametrized curve.
///
/// The outward normal is rot(-π/2)·γ'/|γ'|, i.e. it points to the right of
/// the direction of travel, which is away from the enclosed region for a
/// counter-clockwise curve.
class ParametricCurve {
public:
    virtual ~ParametricCurve() = default;

    virtual Point point(double t) const = 0;
    virtual Point derivative(double t) const = 0;
    virtual Point second_derivative(double t) const = 0;

    /// γ(t + d) − γ(t). Implementations should avoid cancellation for small d.
    virtual Point chord(double t, double d) const { return point(t + d) - point(t); }

    /// (γ(t + d) − γ(t))·n(t), accurate for small d.
    virtual double chord_dot_normal(double t, double d) const { return chord(t, d).dot(normal(t)); }

    /// Signed curvature (positive for a convex counter-clockwise curve).
    virtual double curvature(double t) const;

    /// Identifier used by the mesh file format ("circle", "ellipse", ...).
    virtual std::string kind() const = 0;
    /// Free parameters written after the identifier in the mesh file format.
    virtual std::vector<double> parameters() const = 0;

    double speed(double t) const { return derivative(t).norm(); }
    Point unit_tangent(double t) const { return derivative(t).normalized(); }
    Point normal(double t) const
    {
        const Point d = derivative(t);
        return Point(d.y(), -d.x()) / d.norm();
    }

    static constexpr double period() { return two_pi; }
};

using CurvePtr = std::shared_ptr<const ParametricCurve>;

/// Axis-aligned ellipse c + (a cos t, b sin t); a == b gives a circle.
class Ellipse final : public ParametricCurve {
public:
    Ellipse(Point center, double a, double b);

    Point point(double t) const override;
    Point derivative(double t) const override;
    Point second_derivative(double t) const override;
    Point chord(double t, double d) const override;
    double chord_dot_normal(double t, double d) const override;
    double curvature(double t) const override;
    std::string kind() const override;
    std::vector<double> parameters() const override;

    const Point& center() const { return center_; }
    double semi_axis_x() const { return a_; }
    double semi_axis_y() const { return b_; }
    bool is_circle() const { return a_ == b_; }

private:
    Point center_;
    double a_;
    double b_;
};

CurvePtr make_circle(double radius, Point center = Point::Zero());
CurvePtr make_ellipse(double a, double b, Point center = Point::Zero());

/// Rebuilds a built-in curve from its file identifier and parameters.
CurvePtr make_curve(const std::string& kind, const std::vector<double>& params);

/// Sub-interval [t0, t1] of a curve, traversed from t0 to t1 (t0 may exceed t1
/// for clockwise traversal).
struct ParametricArc {
    CurvePtr curve;
    double t0 = 0.0;
    double t1 = 0.0;

    Point start() const { return curve->point(t0); }
    Point end() const { return curve->point(t1); }
    /// Parameter at local coordinate xi in [-1, 1].
    double parameter(double xi) const { return t0 + 0.5 * (t1 - t0) * (xi + 1.0); }
    double parameter_length() const { return t1 - t0; }
    bool counter_clockwise() const { return t1 > t0; }
    /// Normal pointing to the right of the direction of travel.
    Point normal_at(double t) const
    {
        const Point n = curve->normal(t);
        return counter_clockwise() ? n : Point(-n);
    }
    double length(int n_gauss = 32) const;
};

} // namespace cvembem::geometry
