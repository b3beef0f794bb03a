#include "cvembem/harness/harness.hpp"

#include "cvembem/quadrature/gauss.hpp"

#include <cmath>

namespace cvembem::harness {

ExactSolution exact_example1()
{
    ExactSolution ex;
    ex.name = "example1";
    ex.u = [](const Point& x) { return x.x() / x.squaredNorm() + 2.0; };
    ex.grad = [](const Point& x) {
        const double r2 = x.squaredNorm();
        return Point((r2 - 2.0 * x.x() * x.x()) / (r2 * r2), -2.0 * x.x() * x.y() / (r2 * r2));
    };
    ex.f = [](const Point&) { return 0.0; };
    // equals x₁ + 2 on the unit circle and stays exact for other inner radii
    ex.g = ex.u;
    ex.lambda = [grad = ex.grad](const Point& x) { return grad(x).dot(x.normalized()); };
    ex.alpha = 2.0;
    return ex;
}

ExactSolution exact_example2(int terms)
{
    if (terms < 1 || terms % 2 == 0) throw std::invalid_argument("series truncation must be odd and >= 1");
    // u = 3/16 + Σ a_n ρ⁻ⁿ cos nθ
    std::vector<std::pair<int, double>> series{{2, 0.25}, {4, 1.0 / 16.0}};
    for (int n = 1; n <= terms; n += 2) {
        const double sign = ((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
        const double dn = n;
        series.emplace_back(n, 48.0 / pi * sign / (dn * dn * dn * dn * dn - 20.0 * dn * dn * dn + 64.0 * dn));
    }
    ExactSolution ex;
    ex.name = "example2";
    ex.alpha = 3.0 / 16.0;
    ex.u = [series](const Point& x) {
        const double rho = x.norm();
        const double theta = std::atan2(x.y(), x.x());
        double u = 3.0 / 16.0;
        for (const auto& [n, a] : series) u += a * std::pow(rho, -n) * std::cos(n * theta);
        return u;
    };
    ex.grad = [series](const Point& x) {
        const double rho = x.norm();
        const double theta = std::atan2(x.y(), x.x());
        double ur = 0.0;
        double ut = 0.0;
        for (const auto& [n, a] : series) {
            const double c = -n * a * std::pow(rho, -n - 1);
            ur += c * std::cos(n * theta);
            ut += c * std::sin(n * theta);
        }
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        return Point(ur * ct - ut * st, ur * st + ut * ct);
    };
    ex.f = [](const Point&) { return 0.0; };
    ex.g = [](const Point& x) { return x.x() >= 0.0 ? std::pow(x.x(), 4) : 0.0; };
    ex.tail_bound = 48.0 / (3.0 * pi * std::pow(static_cast<double>(terms), 3));
    return ex;
}

namespace {

template <class Local>
double relative_error(const solver::CoupledSolution& solution, int n, Local&& local)
{
    const auto& sys = *solution.system;
    const int nel = static_cast<int>(sys.elements.size());
    std::vector<double> num(nel);
    std::vector<double> den(nel);
#pragma omp parallel for schedule(dynamic, 16)
    for (int el = 0; el < nel; ++el) {
        const auto& space = sys.elements[el];
        const auto& dofs = sys.dofs.element_dofs[el];
        Eigen::VectorXd u(dofs.size());
        for (std::size_t i = 0; i < dofs.size(); ++i) u[i] = solution.u[dofs[i]];
        const auto rule = quadrature::polygon_quadrature(space.polygon, n);
        const auto [e, d] = local(space, u, rule);
        num[el] = e;
        den[el] = d;
    }
    double e = 0.0;
    double d = 0.0;
    for (int el = 0; el < nel; ++el) {
        e += num[el];
        d += den[el];
    }
    return std::sqrt(e / d);
}

} // namespace

double error_h1_seminorm(const solver::CoupledSolution& solution, const ExactSolution& exact, int quadrature_n)
{
    return relative_error(solution, quadrature_n, [&](const cvem::LocalVemSpace& s, const Eigen::VectorXd& u,
                                                      const quadrature::PolygonRule& rule) {
        const Eigen::VectorXd c = s.pi_nabla_star * u;
        double e = 0.0;
        double d = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point gu = exact.grad(rule.nodes[q]);
            const Point gh = s.basis.gradients(rule.nodes[q]).transpose() * c;
            e += rule.weights[q] * (gu - gh).squaredNorm();
            d += rule.weights[q] * gu.squaredNorm();
        }
        return std::pair{e, d};
    });
}

double error_l2_norm(const solver::CoupledSolution& solution, const ExactSolution& exact, int quadrature_n)
{
    return relative_error(solution, quadrature_n, [&](const cvem::LocalVemSpace& s, const Eigen::VectorXd& u,
                                                      const quadrature::PolygonRule& rule) {
        const Eigen::VectorXd c = s.pi0_star * u;
        double e = 0.0;
        double d = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double v = exact.u(rule.nodes[q]);
            const double vh = s.basis.values(rule.nodes[q]).dot(c);
            e += rule.weights[q] * (v - vh) * (v - vh);
            d += rule.weights[q] * v * v;
        }
        return std::pair{e, d};
    });
}

double flux_error(const solver::CoupledSolution& solution, const ExactSolution& exact)
{
    if (!exact.lambda) throw std::invalid_argument("exact solution has no closed-form flux");
    const auto& space = solution.system->bem_space;
    const auto& rule = quadrature::gauss_legendre(16);
    double e = 0.0;
    for (int c = 0; c < space.num_elements(); ++c) {
        const auto& arc = space.partition()[c].arc;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double t = arc.parameter(rule.nodes[q]);
            const double w = rule.weights[q] * 0.5 * (arc.t1 - arc.t0) * arc.curve->speed(t);
            const double diff = space.evaluate(solution.lambda_hat, c, rule.nodes[q]) - exact.lambda(arc.curve->point(t));
            e += w * diff * diff;
        }
    }
    return std::sqrt(e);
}

EocResult eoc(const std::vector<double>& errors, const std::vector<double>& h)
{
    if (errors.size() != h.size() || errors.size() < 2) throw std::invalid_argument("eoc needs two or more matching values");
    EocResult out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double ratio = h[i] / h[i + 1];
        double denom = std::log(2.0);
        if (std::abs(ratio - 2.0) > 0.2) {
            out.non_halving = true;
            denom = std::log(ratio);
        }
        out.rates.push_back(std::log(errors[i] / errors[i + 1]) / denom);
    }
    return out;
}

double fitted_rate(const std::vector<double>& errors)
{
    if (errors.size() < 2) throw std::invalid_argument("fitted_rate needs two or more values");
    const double n = static_cast<double>(errors.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log2(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace cvembem::harness
