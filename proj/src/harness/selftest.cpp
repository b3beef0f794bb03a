#include "cvembem/harness/harness.hpp"

#include "cvembem/quadrature/gauss.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace cvembem::harness {

namespace {

// convex polygon with vertices at random angles on a circle
geometry::CurvedPolygon random_convex_polygon(std::mt19937& rng)
{
    std::uniform_int_distribution<int> count(3, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = count(rng);
    std::vector<double> angle(n);
    for (int i = 0; i < n; ++i) angle[i] = two_pi * (i + 0.2 + 0.6 * unit(rng)) / n;
    const Point shift(unit(rng), unit(rng));
    const double scale = 0.1 + unit(rng);
    geometry::CurvedPolygon poly;
    for (int i = 0; i < n; ++i) {
        const Point a = shift + scale * Point(std::cos(angle[i]), std::sin(angle[i]));
        const Point b = shift + scale * Point(std::cos(angle[(i + 1) % n]), std::sin(angle[(i + 1) % n]));
        poly.edges.push_back({a, b, std::nullopt});
    }
    return poly;
}

double reproduction_error(const geometry::CurvedPolygon& poly, int k, std::mt19937& rng)
{
    auto space = cvem::build_local_space(poly, k);
    std::normal_distribution<double> nd;
    std::vector<double> coef(cvem::ScaledMonomialBasis::count(k));
    for (auto& c : coef) c = nd(rng);
    const auto& basis = space.basis;
    auto p = [&](const Point& x) { return basis.values(x).head(coef.size()).dot(Eigen::Map<Eigen::VectorXd>(coef.data(), coef.size())); };
    const Eigen::VectorXd dofs = cvem::interpolate_dofs(space, p, k + 2);
    const Eigen::VectorXd cn = space.pi_nabla_star * dofs;
    const Eigen::VectorXd c0 = space.pi0_star * dofs;
    const auto rule = quadrature::polygon_quadrature(poly, k + 2);
    double err = 0.0;
    double ref = 0.0;
    for (const auto& x : rule.nodes) {
        const Eigen::VectorXd m = basis.values(x);
        err = std::max({err, std::abs(m.dot(cn) - p(x)), std::abs(m.dot(c0) - p(x))});
        ref = std::max(ref, std::abs(p(x)));
    }
    return err / ref;
}

bem::Partition circle_partition(double radius, int cells)
{
    return geometry::extract_boundary_partition(geometry::build_annulus_mesh(0.5 * radius, radius, 2, cells, 0),
                                                geometry::BoundaryTag::Outer);
}

} // namespace

bool run_selftest(std::ostream& log)
{
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, double value) {
        log << (ok ? "PASS " : "FAIL ") << std::left << std::setw(52) << name << std::right << std::scientific
            << std::setprecision(3) << value << '\n';
        log.unsetf(std::ios::floatfield);
        if (!ok) ++failures;
    };
    auto guarded = [&](const std::string& name, auto&& check) {
        try {
            check();
        } catch (const std::exception& e) {
            log << "FAIL " << name << ": " << e.what() << '\n';
            ++failures;
        }
    };

    guarded("gauss rules", [&] {
        const auto& g = quadrature::gauss_legendre(8);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 14);
        report("8-point Gauss integrates x^14", std::abs(s - 2.0 / 15.0) < 1e-15, std::abs(s - 2.0 / 15.0));
    });

    guarded("projector reproduction", [&] {
        std::mt19937 rng(7);
        double worst = 0.0;
        for (int k = 1; k <= cvem::max_order; ++k)
            for (int i = 0; i < 10; ++i) worst = std::max(worst, reproduction_error(random_convex_polygon(rng), k, rng));
        report("projectors reproduce P_k (50 random polygons)", worst < 1e-11, worst);
    });

    guarded("local stiffness", [&] {
        const auto mesh = geometry::build_annulus_mesh(1.0, 2.0, 2, 18, 0);
        double worst = 0.0;
        double min_eig = 0.0;
        for (int k = 1; k <= cvem::max_order; ++k) {
            const auto space = cvem::build_local_space(mesh.element_polygon(k), k);
            const Eigen::MatrixXd a = cvem::local_stiffness(space);
            const Eigen::VectorXd one = cvem::interpolate_dofs(space, [](const Point&) { return 1.0; });
            const double scale = a.cwiseAbs().maxCoeff();
            worst = std::max({worst, (a - a.transpose()).cwiseAbs().maxCoeff() / scale, (a * one).cwiseAbs().maxCoeff() / scale});
            min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().minCoeff() / scale);
        }
        report("stiffness symmetric, constants in kernel (relative)", worst < 1e-11, worst);
        report("stiffness positive semidefinite", min_eig > -1e-11, min_eig);
    });

    guarded("single layer", [&] {
        const double unit = assemble_V_hat(bem::make_bem_space(circle_partition(1.0, 16), 2)).sum();
        const double two = assemble_V_hat(bem::make_bem_space(circle_partition(2.0, 16), 2)).sum();
        report("1'V1 = 0 on the unit circle", std::abs(unit) < 1e-9, std::abs(unit));
        report("1'V1 = -8 pi log 2 on radius 2", std::abs(two + 8.0 * pi * std::log(2.0)) < 1e-9,
               std::abs(two + 8.0 * pi * std::log(2.0)));
    });

    guarded("constrained operators", [&] {
        const auto part = circle_partition(2.0, 16);
        double jump = 0.0;
        bool positive = true;
        std::mt19937 rng(11);
        std::normal_distribution<double> nd;
        for (int kd : {2, 3}) {
            const auto ops = bem::assemble_boundary_operators(bem::make_bem_space(part, kd), bem::make_trace_space(part, kd), kd);
            const Eigen::VectorXd one = Eigen::VectorXd::Ones(ops.K.cols());
            jump = std::max(jump, (0.5 * ops.Q.transpose() * one - ops.K * one).cwiseAbs().maxCoeff());
            for (int i = 0; i < 100; ++i) {
                const Eigen::VectorXd l = Eigen::VectorXd::NullaryExpr(ops.V.rows(), [&] { return nd(rng); });
                positive = positive && l.dot(ops.V * l) > 0.0;
            }
        }
        report("(Q'/2 - K) 1 = 0", jump < 1e-8, jump);
        report("lambda' V lambda > 0 (100 random densities)", positive, 0.0);
    });

    guarded("coupled solve", [&] {
        RunConfig config;
        const auto exact = exact_example1();
        auto mesh = std::make_shared<const geometry::CurvedMesh>(build_mesh(config, 0));
        const auto sol = solver::solve_problem(mesh, 2, 2, {exact.f, exact.g});
        const double mean = sol.system->bem_space.basis_integrals().dot(sol.lambda_hat);
        report("example 1 relative residual", sol.residual < 1e-10, sol.residual);
        report("integral of lambda_h vanishes", std::abs(mean) < 1e-10, std::abs(mean));
        report("alpha recovers 2", std::abs(sol.alpha.mean - 2.0) < 1e-6, std::abs(sol.alpha.mean - 2.0));
        const double far = solver::evaluate_exterior(sol, Point(4.0, 0.0));
        report("exterior field at (4,0) is 2.25", std::abs(far - 2.25) < 1e-3, std::abs(far - 2.25));
    });

    log << (failures == 0 ? "selftest passed" : "selftest FAILED (" + std::to_string(failures) + ")") << '\n';
    return failures == 0;
}

} // namespace cvembem::harness
