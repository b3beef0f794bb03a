#include "cvembem/solver/solver.hpp"

#include "cvembem/quadrature/gauss.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace cvembem::solver {

namespace {

double wrap(double t)
{
    const double w = std::fmod(t, two_pi);
    return w < 0.0 ? w + two_pi : w;
}

// Cell of the partition containing parameter t, and the local coordinate.
std::pair<int, double> find_cell(const bem::Partition& part, double t)
{
    for (std::size_t c = 0; c < part.size(); ++c) {
        const auto& arc = part[c].arc;
        const double dt = arc.t1 - arc.t0;
        double off = wrap(t - arc.t0);
        if (off > two_pi - 1e-12) off = 0.0;
        if (off <= dt * (1.0 + 1e-12)) return {static_cast<int>(c), std::min(1.0, -1.0 + 2.0 * off / dt)};
    }
    throw Error("parameter is not covered by the boundary partition");
}

double local_coordinate(const geometry::ParametricArc& arc, double t)
{
    return -1.0 + 2.0 * (t - arc.t0) / (arc.t1 - arc.t0);
}

} // namespace

AlphaReport recover_alpha(const CoupledSolution& solution, int points_per_cell)
{
    const auto& sys = *solution.system;
    const auto& part = sys.bem_space.partition();
    const int n = static_cast<int>(part.size());
    const Eigen::VectorXd ug = solution.trace();
    const auto& outer_rule = quadrature::gauss_legendre(points_per_cell);
    const auto& far_rule = quadrature::gauss_legendre(16);
    const auto graded = quadrature::graded_rule(1.0, 32, 3);

    std::vector<double> value(static_cast<std::size_t>(n) * points_per_cell);
    std::vector<double> weight(value.size());

#pragma omp parallel for schedule(dynamic, 4)
    for (int c = 0; c < n; ++c) {
        const auto& arc = part[c].arc;
        const auto& curve = *arc.curve;
        for (int q = 0; q < points_per_cell; ++q) {
            const double tx = arc.parameter(outer_rule.nodes[q]);
            double single = 0.0;
            double dbl = 0.0;
            auto add = [&](int cell, double ty, double wy) {
                const double xi = local_coordinate(part[cell].arc, ty);
                const double w = wy * curve.speed(ty);
                single += w * bem::single_layer_kernel(curve, ty, tx - ty) * sys.bem_space.evaluate(solution.lambda_hat, cell, xi);
                dbl += w * bem::double_layer_kernel(curve, ty, tx - ty) * sys.trace_space.evaluate(ug, cell, xi);
            };
            for (int e = 0; e < n; ++e) {
                const auto& other = part[e].arc;
                const double len = other.t1 - other.t0;
                if (e == c) {
                    const double left = tx - other.t0;
                    const double right = other.t1 - tx;
                    for (const auto& [u, w] : graded) {
                        add(e, tx - left * u, left * w);
                        add(e, tx + right * u, right * w);
                    }
                } else if (e == (c + n - 1) % n) {
                    for (const auto& [u, w] : graded) add(e, other.t1 - len * u, len * w);
                } else if (e == (c + 1) % n) {
                    for (const auto& [u, w] : graded) add(e, other.t0 + len * u, len * w);
                } else {
                    for (std::size_t k = 0; k < far_rule.size(); ++k)
                        add(e, other.parameter(far_rule.nodes[k]), 0.5 * len * far_rule.weights[k]);
                }
            }
            const std::size_t idx = static_cast<std::size_t>(c) * points_per_cell + q;
            value[idx] = 0.5 * sys.trace_space.evaluate(ug, c, outer_rule.nodes[q]) + single - dbl;
            weight[idx] = outer_rule.weights[q] * 0.5 * (arc.t1 - arc.t0) * curve.speed(tx);
        }
    }

    AlphaReport report;
    double total = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        report.mean += weight[i] * value[i];
        total += weight[i];
    }
    report.mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) var += weight[i] * (value[i] - report.mean) * (value[i] - report.mean);
    report.std_dev = std::sqrt(var / total);

    // summing the Galerkin rows of the Lagrange basis tests against 1
    const auto& ops = sys.boundary;
    const double length = sys.bem_space.basis_integrals().sum();
    report.galerkin = ((0.5 * ops.Q_hat.transpose() - ops.K_hat) * ug + ops.V_hat * solution.lambda_hat).sum() / length;
    return report;
}

double evaluate_trace(const CoupledSolution& solution, double t)
{
    const auto& sys = *solution.system;
    const auto [cell, xi] = find_cell(sys.trace_space.partition(), t);
    return sys.trace_space.evaluate(solution.trace(), cell, xi);
}

double evaluate_flux(const CoupledSolution& solution, double t)
{
    const auto& sys = *solution.system;
    const auto [cell, xi] = find_cell(sys.bem_space.partition(), t);
    return sys.bem_space.evaluate(solution.lambda_hat, cell, xi);
}

int locate_element(const BlockSystem& system, const Point& x)
{
    int best = -1;
    double best_winding = 0.25;
    int nearest = -1;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (std::size_t el = 0; el < system.outlines.size(); ++el) {
        const auto& pts = system.outlines[el];
        Eigen::AlignedBox2d box;
        for (const auto& p : pts) box.extend(p);
        const double margin = 1e-3 * box.diagonal().norm();
        if (x.x() < box.min().x() - margin || x.x() > box.max().x() + margin || x.y() < box.min().y() - margin ||
            x.y() > box.max().y() + margin)
            continue;
        double angle = 0.0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Point a = pts[i] - x;
            const Point b = pts[(i + 1) % pts.size()] - x;
            angle += std::atan2(cross(a, b), a.dot(b));
            const Point ab = b - a;
            const double s = std::clamp(-a.dot(ab) / ab.squaredNorm(), 0.0, 1.0);
            dist = std::min(dist, (a + s * ab).norm());
        }
        const double winding = angle / two_pi;
        if (winding > best_winding) {
            best_winding = winding;
            best = static_cast<int>(el);
        }
        if (dist < nearest_dist) {
            nearest_dist = dist;
            nearest = static_cast<int>(el);
        }
        if (best_winding > 0.99) break;
    }
    if (best >= 0) return best;
    // polyline chords cut slightly inside convex curved edges
    if (nearest >= 0 && nearest_dist <= 1e-4 * system.elements[nearest].basis.scale()) return nearest;
    return -1;
}

double evaluate_field(const CoupledSolution& solution, const Point& x)
{
    const auto& sys = *solution.system;
    const auto& part = sys.trace_space.partition();
    const double tol = 1e-10 * (1.0 + x.norm());
    for (const auto& cell : part) {
        const auto& arc = cell.arc;
        const double len = arc.length(8);
        if ((x - arc.start()).norm() > len && (x - arc.end()).norm() > len) continue;
        double t = arc.t0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 8; ++i) {
            const double s = arc.t0 + (arc.t1 - arc.t0) * i / 8.0;
            const double d = (arc.curve->point(s) - x).norm();
            if (d < best) {
                best = d;
                t = s;
            }
        }
        for (int it = 0; it < 20; ++it) {
            const Point r = arc.curve->point(t) - x;
            const Point d1 = arc.curve->derivative(t);
            const Point d2 = arc.curve->second_derivative(t);
            const double step = r.dot(d1) / (d1.squaredNorm() + r.dot(d2));
            t = std::clamp(t - step, arc.t0, arc.t1);
            if (std::abs(step) < 1e-15) break;
        }
        if ((arc.curve->point(t) - x).norm() <= tol) return evaluate_trace(solution, t);
    }

    const int el = locate_element(sys, x);
    if (el < 0) throw Error("point is outside the computational domain");
    const auto& space = sys.elements[el];
    const auto& dofs = sys.dofs.element_dofs[el];
    Eigen::VectorXd local(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) local[i] = solution.u[dofs[i]];
    return space.basis.values(x).dot(space.pi_nabla_star * local);
}

double evaluate_exterior(const CoupledSolution& solution, const Point& x)
{
    const auto& sys = *solution.system;
    const auto& part = sys.trace_space.partition();
    const auto& rule = quadrature::gauss_legendre(16);
    const Eigen::VectorXd ug = solution.trace();

    double h = 0.0;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& cell : part) {
        h = std::max(h, cell.arc.length());
        dist = std::min({dist, (cell.arc.start() - x).norm(), (cell.arc.end() - x).norm()});
        for (double xi : rule.nodes) dist = std::min(dist, (cell.arc.curve->point(cell.arc.parameter(xi)) - x).norm());
    }
    if (dist < h)
        throw Error("point is closer to the artificial boundary than one boundary cell; use evaluate_field");

    double u = solution.alpha.mean;
    for (std::size_t c = 0; c < part.size(); ++c) {
        const auto& arc = part[c].arc;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double t = arc.parameter(rule.nodes[q]);
            const Point y = arc.curve->point(t);
            const double w = rule.weights[q] * 0.5 * (arc.t1 - arc.t0) * arc.curve->speed(t);
            const int cell = static_cast<int>(c);
            u += w * (bem::kernel_dGdn(x, y, arc.curve->normal(t)) * sys.trace_space.evaluate(ug, cell, rule.nodes[q]) -
                      bem::kernel_G(x, y) * sys.bem_space.evaluate(solution.lambda_hat, cell, rule.nodes[q]));
        }
    }
    return u;
}

void write_solution(std::ostream& out, const CoupledSolution& solution)
{
    const auto& sys = *solution.system;
    const auto& map = sys.dofs;
    out << std::setprecision(17);
    out << "cvembem-solution v1\n";
    out << "orders " << sys.k_o << ' ' << sys.k_d << '\n';
    out << "dofs " << map.num_cvem << " interior " << map.num_interior() << " gamma " << map.num_gamma()
        << " dirichlet " << map.num_dirichlet() << " lambda " << map.num_lambda << '\n';
    out << "u " << solution.u.size() << '\n';
    for (Eigen::Index i = 0; i < solution.u.size(); ++i) out << solution.u[i] << '\n';
    out << "lambda " << solution.lambda.size() << '\n';
    for (Eigen::Index i = 0; i < solution.lambda.size(); ++i) out << solution.lambda[i] << '\n';
    out << "alpha " << solution.alpha.mean << " std " << solution.alpha.std_dev << " galerkin "
        << solution.alpha.galerkin << '\n';
    out << "residual " << solution.residual << '\n';
}

} // namespace cvembem::solver
