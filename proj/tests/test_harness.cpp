#include "cvembem/harness/harness.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace cvembem;
namespace fs = std::filesystem;

namespace {

// fourth-order five-point second differences
double laplacian_fd(const cvem::ScalarField& u, const Point& x, double h)
{
    double lap = 0.0;
    for (const Point e : {Point(1.0, 0.0), Point(0.0, 1.0)})
        lap += (-u(x + 2 * h * e) + 16 * u(x + h * e) - 30 * u(x) + 16 * u(x - h * e) - u(x - 2 * h * e)) / (12 * h * h);
    return lap;
}

Point gradient_fd(const cvem::ScalarField& u, const Point& x, double h)
{
    Point g;
    for (int i = 0; i < 2; ++i) {
        Point e = Point::Zero();
        e[i] = h;
        g[i] = (-u(x + 2 * e) + 8 * u(x + e) - 8 * u(x - e) + u(x - 2 * e)) / (12 * h);
    }
    return g;
}

// bounded harmonic function outside the unit circle with boundary values g
double poisson_exterior(const std::function<double(double)>& g, double rho, double theta, double a, double b)
{
    auto kernel = [&](double phi) {
        return g(phi) * (rho * rho - 1.0) / (rho * rho - 2.0 * rho * std::cos(theta - phi) + 1.0);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(kernel, a, b, 12, 1e-15) / (2.0 * pi);
}

std::vector<Point> random_exterior_points(int count, double r_min, double r_max, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> r(r_min, r_max);
    std::uniform_real_distribution<double> t(0.0, 2.0 * pi);
    std::vector<Point> out;
    for (int i = 0; i < count; ++i) {
        const double rr = r(rng);
        const double tt = t(rng);
        out.emplace_back(rr * std::cos(tt), rr * std::sin(tt));
    }
    return out;
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("cvembem_test_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("example 1 closed form")
{
    const auto ex = harness::exact_example1();
    CHECK(ex.u(Point(1.0, 0.0)) == 3.0);
    CHECK(ex.u(Point(2.0, 0.0)) == 2.5);
    CHECK(ex.u(Point(4.0, 0.0)) == 2.25);
    CHECK(ex.u(Point(0.0, 3.0)) == 2.0);
    CHECK(ex.alpha == 2.0);
    for (double t : {0.0, 0.7, 2.0, 4.5}) {
        const Point x(std::cos(t), std::sin(t));
        CHECK(ex.g(x) == doctest::Approx(x.x() + 2.0).epsilon(1e-15));
        // ∂/∂ρ of cos θ / ρ at ρ = 2
        CHECK(ex.lambda(2.0 * x) == doctest::Approx(-std::cos(t) / 4.0).epsilon(1e-14));
    }
    for (const auto& x : random_exterior_points(100, 1.2, 3.0, 1)) {
        CHECK(std::abs(laplacian_fd(ex.u, x, 2e-3)) < 1e-8);
        CHECK((gradient_fd(ex.u, x, 1e-3) - ex.grad(x)).norm() < 1e-9);
    }
}

TEST_CASE("example 2 series")
{
    const auto ex = harness::exact_example2(101);
    CHECK(ex.alpha == 3.0 / 16.0);
    CHECK(ex.tail_bound == doctest::Approx(16.0 / (pi * 101.0 * 101.0 * 101.0)));
    CHECK(std::abs(ex.u(Point(1.0, 0.0)) - 1.0) < ex.tail_bound);
    CHECK(std::abs(ex.u(Point(-1.0, 0.0))) < ex.tail_bound);
    CHECK(std::abs(ex.u(Point(0.0, -1.0))) < ex.tail_bound);
    CHECK(ex.g(Point(-0.5, 0.2)) == 0.0);
    CHECK(ex.g(Point(0.5, 0.2)) == 0.0625);
    CHECK_THROWS_AS(harness::exact_example2(100), std::invalid_argument);

    // the coefficients against the exterior Poisson integral of cos⁴φ on |φ| < π/2
    auto g = [](double phi) { return std::pow(std::cos(phi), 4); };
    for (double rho : {1.2, 1.5, 3.0, 15.0})
        for (double theta : {0.0, 0.4, 1.5, 2.9, -2.0}) {
            CAPTURE(rho);
            CAPTURE(theta);
            const double oracle = poisson_exterior(g, rho, theta, -pi / 2.0, pi / 2.0);
            CHECK(std::abs(ex.u(rho * Point(std::cos(theta), std::sin(theta))) - oracle) < 1e-12);
        }
    // α is the mean of the datum over the circle
    CHECK(boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -pi / 2.0, pi / 2.0) / (2.0 * pi) ==
          doctest::Approx(ex.alpha).epsilon(1e-14));

    for (const auto& x : random_exterior_points(100, 1.2, 3.0, 2)) {
        CHECK(std::abs(laplacian_fd(ex.u, x, 2e-3)) < 1e-8);
        CHECK((gradient_fd(ex.u, x, 1e-3) - ex.grad(x)).norm() < 1e-9);
    }
}

TEST_CASE("experimental order of convergence")
{
    auto r = harness::eoc({1.0, 0.125}, {1.0, 0.5});
    CHECK(r.rates.size() == 1);
    CHECK(r.rates[0] == doctest::Approx(3.0));
    CHECK_FALSE(r.non_halving);

    r = harness::eoc({4.26e-4, 5.56e-5}, {0.802, 0.428});
    CHECK(r.rates[0] == doctest::Approx(std::log2(4.26e-4 / 5.56e-5)));
    CHECK(r.rates[0] == doctest::Approx(2.94).epsilon(1e-2));
    CHECK_FALSE(r.non_halving);

    r = harness::eoc({0.3, 0.3, 0.3}, {1.0, 0.5, 0.25});
    CHECK(r.rates[0] == 0.0);
    CHECK(r.rates[1] == 0.0);

    r = harness::eoc({1.0, 1.0 / 16.0}, {1.0, 0.25});
    CHECK(r.non_halving);
    CHECK(r.rates[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(harness::eoc({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(harness::eoc({1.0, 0.5}, {1.0}), std::invalid_argument);

    CHECK(harness::fitted_rate({1.0, 0.125, 1.0 / 64.0, 1.0 / 512.0}) == doctest::Approx(3.0));
    CHECK(harness::fitted_rate({2.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("error norms")
{
    SUBCASE("injected polynomial on straight elements")
    {
        // reuse a real system and swap in four straight squares with private DOFs
        auto mesh = std::make_shared<const geometry::CurvedMesh>(geometry::build_annulus_mesh(1.0, 2.0, 2, 12, 0));
        for (int k = 1; k <= 5; ++k) {
            CAPTURE(k);
            auto sys = std::make_shared<solver::BlockSystem>(solver::assemble_global(mesh, k, 2, [](const Point&) { return 0.0; }));
            auto p = [k](const Point& x) { return 1.0 + std::pow(x.x() - 0.3 * x.y(), k) + x.y(); };
            harness::ExactSolution ex;
            ex.u = p;
            ex.grad = [k](const Point& x) {
                const double d = k * std::pow(x.x() - 0.3 * x.y(), k - 1);
                return Point(d, -0.3 * d + 1.0);
            };
            sys->elements.clear();
            sys->dofs.element_dofs.clear();
            std::vector<double> u;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    geometry::CurvedPolygon sq;
                    const Point o(i, j);
                    const Point c[4] = {o, o + Point(1, 0), o + Point(1, 1), o + Point(0, 1)};
                    for (int e = 0; e < 4; ++e) sq.edges.push_back({c[e], c[(e + 1) % 4], std::nullopt});
                    sys->elements.push_back(cvem::build_local_space(sq, k));
                    const Eigen::VectorXd local = cvem::interpolate_dofs(sys->elements.back(), p, k + 2);
                    std::vector<int> ids;
                    for (int a = 0; a < local.size(); ++a) {
                        ids.push_back(static_cast<int>(u.size()));
                        u.push_back(local[a]);
                    }
                    sys->dofs.element_dofs.push_back(ids);
                }
            solver::CoupledSolution sol;
            sol.system = sys;
            sol.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
            CHECK(harness::error_h1_seminorm(sol, ex) < 1e-10);
            CHECK(harness::error_l2_norm(sol, ex) < 1e-10);
        }
    }

    SUBCASE("quadrature saturation")
    {
        const auto ex = harness::exact_example1();
        harness::RunConfig config;
        auto mesh = std::make_shared<const geometry::CurvedMesh>(harness::build_mesh(config, 1));
        const auto sol = solver::solve_problem(mesh, 2, 2, {ex.f, ex.g});
        const double h8 = harness::error_h1_seminorm(sol, ex, 8);
        const double h12 = harness::error_h1_seminorm(sol, ex, 12);
        const double l8 = harness::error_l2_norm(sol, ex, 8);
        const double l12 = harness::error_l2_norm(sol, ex, 12);
        CHECK(std::abs(h8 - h12) < 1e-3 * h12);
        CHECK(std::abs(l8 - l12) < 1e-3 * l12);
        CHECK(harness::flux_error(sol, ex) > 0.0);
        CHECK_THROWS_AS(harness::flux_error(sol, harness::exact_example2(11)), std::invalid_argument);
    }
}

TEST_CASE("configuration parsing")
{
    std::istringstream in(R"(
# comment
problem = example2
n_r = 4          # trailing comment
n_theta = 32
radial_grading = 2.3
levels = 1-3
k_o = 2, 3
k_d = 3
execution = serial
q = 4
dump_matrices = true
output = somewhere
)");
    const auto c = harness::parse_config(in);
    CHECK(c.problem == "example2");
    CHECK(c.n_r == 4);
    CHECK(c.n_theta == 32);
    CHECK(c.radial_grading == 2.3);
    CHECK(c.levels == std::vector<int>{1, 2, 3});
    CHECK(c.k_o == std::vector<int>{2, 3});
    CHECK(c.k_d == 3);
    CHECK(c.exec == Execution::Serial);
    CHECK(c.singular.q == 4);
    CHECK(c.dump_matrices);
    CHECK(c.output == "somewhere");
    CHECK(c.ellipse_a == 50.0);

    auto parse = [](const std::string& text) {
        std::istringstream s(text);
        return harness::parse_config(s);
    };
    CHECK(parse("levels =\n").levels.empty());
    CHECK(parse("levels = 0,2\n").levels == std::vector<int>{0, 2});
    CHECK_THROWS_AS(parse("colour = red\n"), Error);
    CHECK_THROWS_AS(parse("n_r = two\n"), Error);
    CHECK_THROWS_AS(parse("n_r 2\n"), Error);
    CHECK_THROWS_AS(parse("k_d = 4\n"), Error);
    CHECK_THROWS_AS(parse("k_o = 6\n"), Error);
    CHECK_THROWS_AS(parse("problem = example3\n"), Error);
    CHECK_THROWS_AS(parse("series_terms = 10\n"), Error);
    CHECK_THROWS_AS(parse("execution = gpu\n"), Error);
    CHECK_THROWS_AS(harness::load_config("/nonexistent/config.cfg"), Error);
}

TEST_CASE("convergence csv")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<harness::ConvergenceRow> rows(2);
    rows[0] = {2, 0, 0.7, 0.69813170079773179, 0.0744, nan, 1.05e-3, nan, 197, 0.01};
    rows[1] = {2, 1, 0.35, 0.3490658503988659, 0.0201, 1.89, 1.43e-4, 2.88, 737, 0.125};
    std::stringstream ss;
    harness::write_convergence_csv(ss, rows);
    std::string header;
    std::getline(std::istringstream(ss.str()) >> std::ws, header);
    CHECK(header == "level,h_o,h_d,err_h1,eoc_h1,err_l2,eoc_l2,dofs,seconds");
    CHECK(ss.str().find(",,") != std::string::npos);

    const auto back = harness::read_convergence_csv(ss);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].level == rows[i].level);
        CHECK(back[i].h_o == rows[i].h_o);
        CHECK(back[i].h_d == rows[i].h_d);
        CHECK(back[i].err_h1 == rows[i].err_h1);
        CHECK(back[i].err_l2 == rows[i].err_l2);
        CHECK(back[i].dofs == rows[i].dofs);
        CHECK(back[i].seconds == rows[i].seconds);
    }
    CHECK(std::isnan(back[0].eoc_h1));
    CHECK(std::isnan(back[0].eoc_l2));
    CHECK(back[1].eoc_h1 == 1.89);

    std::istringstream bad("level,h_o\n1,2\n");
    CHECK_THROWS_AS(harness::read_convergence_csv(bad), Error);
}

TEST_CASE("convergence driver")
{
    harness::RunConfig config;
    config.output = scratch_dir("convergence").string();
    std::ostringstream log;

    SUBCASE("empty level list writes a header-only file")
    {
        config.levels.clear();
        CHECK(harness::run_convergence(config, log).empty());
        std::ifstream in(fs::path(config.output) / "convergence.csv");
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line == "level,h_o,h_d,err_h1,eoc_h1,err_l2,eoc_l2,dofs,seconds");
        CHECK_FALSE(std::getline(in, line));
    }

    SUBCASE("two levels")
    {
        config.levels = {0, 1};
        const auto rows = harness::run_convergence(config, log);
        REQUIRE(rows.size() == 2);
        for (const auto& r : rows) {
            const auto mesh = harness::build_mesh(config, r.level);
            const auto map = solver::build_dof_map(
                mesh, geometry::extract_boundary_partition(mesh, geometry::BoundaryTag::Outer), 2, 2);
            CHECK(r.dofs == map.system_size());
            CHECK(r.h_o == mesh.h_interior());
            CHECK(r.h_d == mesh.h_boundary());
            CHECK(r.ok);
        }
        CHECK(rows[1].eoc_h1 > 1.7);
        CHECK(rows[1].eoc_l2 > 2.7);
        std::ifstream in(fs::path(config.output) / "convergence.csv");
        const auto back = harness::read_convergence_csv(in);
        REQUIRE(back.size() == 2);
        CHECK(back[1].err_h1 == rows[1].err_h1);
        CHECK(fs::exists(fs::path(config.output) / "convergence.dat"));
    }

    SUBCASE("several orders get one file each")
    {
        config.levels = {0};
        config.k_o = {1, 2};
        harness::run_convergence(config, log);
        CHECK(fs::exists(fs::path(config.output) / "convergence_ko1.csv"));
        CHECK(fs::exists(fs::path(config.output) / "convergence_ko2.csv"));
    }
    fs::remove_all(config.output);
}

TEST_CASE("asymptotic driver")
{
    harness::RunConfig config;
    config.problem = "example2";
    config.n_r = 4;
    config.n_theta = 32;
    config.radial_grading = 2.3;
    config.levels = {0};
    config.profile_points = 11;
    config.output = scratch_dir("asymptotic").string();
    std::ostringstream log;
    const auto reports = harness::run_asymptotic(config, log);
    REQUIRE(reports.size() == 1);
    CHECK(std::abs(reports[0].alpha.mean - 3.0 / 16.0) < 1e-3);
    CHECK(std::abs(reports[0].alpha.mean - reports[0].alpha.galerkin) < 1e-10);
    const auto ex = harness::exact_example2();
    CHECK(std::abs(reports[0].left_value - ex.u(Point(-50.0, 0.0))) < 5e-3);
    CHECK(std::abs(reports[0].right_value - ex.u(Point(50.0, 0.0))) < 5e-3);

    for (const char* name : {"profile_left.dat", "profile_right.dat"}) {
        std::ifstream in(fs::path(config.output) / name);
        std::string line;
        int rows = 0;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#') {
                std::istringstream s(line);
                double x, uh, ue;
                s >> x >> uh >> ue;
                CHECK(std::abs(uh - ue) < 1e-2);
                ++rows;
            }
        CHECK(rows == 11);
    }
    CHECK(fs::exists(fs::path(config.output) / "alpha.txt"));
    fs::remove_all(config.output);
}

TEST_CASE("single run dumps")
{
    harness::RunConfig config;
    config.levels = {0};
    config.dump_matrices = true;
    config.output = scratch_dir("single").string();
    std::ostringstream log;
    const auto sol = harness::run_single(config, log);
    CHECK(sol.residual < 1e-10);
    for (const char* name : {"mesh.txt", "solution.txt", "V_hat.txt", "K_hat.txt", "Q_hat.txt", "V.txt", "K.txt", "Q.txt"})
        CHECK(fs::exists(fs::path(config.output) / name));
    const auto mesh = geometry::load_mesh((fs::path(config.output) / "mesh.txt").string());
    CHECK(mesh.num_elements() == sol.system->mesh->num_elements());
    std::ifstream v(fs::path(config.output) / "V.txt");
    CHECK((bem::read_matrix(v) - sol.system->boundary.V).cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(config.output);
}

TEST_CASE("selftest")
{
    std::ostringstream log;
    CHECK(harness::run_selftest(log));
    CHECK(log.str().find("FAIL") == std::string::npos);
}
