#include "cvembem/harness/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace cvembem::harness {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_output(const RunConfig& config, const std::string& name)
{
    std::filesystem::create_directories(config.output);
    const auto path = std::filesystem::path(config.output) / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

std::string field(double v)
{
    if (std::isnan(v)) return {};
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

double parse_field(const std::string& s)
{
    if (s.empty()) return nan;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("convergence csv: bad number '" + s + "'");
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

solver::AssemblyOptions assembly_options(const RunConfig& config)
{
    solver::AssemblyOptions o;
    o.singular = config.singular;
    o.exec = config.exec;
    return o;
}

} // namespace

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows)
{
    out << "level,h_o,h_d,err_h1,eoc_h1,err_l2,eoc_l2,dofs,seconds\n";
    for (const auto& r : rows) {
        out << r.level << ',' << field(r.h_o) << ',' << field(r.h_d) << ',' << field(r.err_h1) << ','
            << field(r.eoc_h1) << ',' << field(r.err_l2) << ',' << field(r.eoc_l2) << ',' << r.dofs << ','
            << field(r.seconds) << '\n';
    }
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "level,h_o,h_d,err_h1,eoc_h1,err_l2,eoc_l2,dofs,seconds")
        throw Error("convergence csv: missing header");
    std::vector<ConvergenceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream s(line);
        std::string cell;
        while (std::getline(s, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 9) throw Error("convergence csv: expected 9 fields in '" + line + "'");
        ConvergenceRow r;
        r.level = std::stoi(cells[0]);
        r.h_o = parse_field(cells[1]);
        r.h_d = parse_field(cells[2]);
        r.err_h1 = parse_field(cells[3]);
        r.eoc_h1 = parse_field(cells[4]);
        r.err_l2 = parse_field(cells[5]);
        r.eoc_l2 = parse_field(cells[6]);
        r.dofs = std::stoi(cells[7]);
        r.seconds = parse_field(cells[8]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& config, std::ostream& log)
{
    config.validate();
    const auto exact = exact_for(config);
    std::vector<ConvergenceRow> all;
    for (int k_o : config.k_o) {
        std::vector<ConvergenceRow> rows;
        for (int level : config.levels) {
            ConvergenceRow row;
            row.k_o = k_o;
            row.level = level;
            row.eoc_h1 = row.eoc_l2 = nan;
            const auto start = std::chrono::steady_clock::now();
            try {
                auto mesh = std::make_shared<const geometry::CurvedMesh>(build_mesh(config, level));
                row.h_o = mesh->h_interior();
                row.h_d = mesh->h_boundary();
                const auto sol = solver::solve_problem(mesh, k_o, config.k_d, {exact.f, exact.g}, assembly_options(config));
                row.dofs = sol.system->dofs.system_size();
                row.err_h1 = error_h1_seminorm(sol, exact, config.error_quadrature);
                row.err_l2 = error_l2_norm(sol, exact, config.error_quadrature);
                row.err_lambda = exact.lambda ? flux_error(sol, exact) : nan;
                row.alpha = sol.alpha.mean;
                row.alpha_std = sol.alpha.std_dev;
                row.residual = sol.residual;
            } catch (const std::exception& e) {
                row.ok = false;
                row.message = e.what();
                row.err_h1 = row.err_l2 = row.err_lambda = nan;
                log << "k_o=" << k_o << " level " << level << " failed: " << e.what() << '\n';
            }
            row.seconds = seconds_since(start);
            if (!rows.empty() && rows.back().ok && row.ok && rows.back().level + 1 == level) {
                const auto& prev = rows.back();
                const auto h1 = eoc({prev.err_h1, row.err_h1}, {prev.h_o, row.h_o});
                const auto l2 = eoc({prev.err_l2, row.err_l2}, {prev.h_o, row.h_o});
                row.eoc_h1 = h1.rates[0];
                row.eoc_l2 = l2.rates[0];
                if (h1.non_halving) log << "note: h_o does not halve between levels " << prev.level << " and " << level << '\n';
            }
            rows.push_back(row);
        }

        const std::string stem = config.k_o.size() == 1 ? "convergence" : "convergence_ko" + std::to_string(k_o);
        auto csv = open_output(config, stem + ".csv");
        write_convergence_csv(csv, rows);
        auto dat = open_output(config, stem + ".dat");
        dat << "# k_o " << k_o << " k_d " << config.k_d << "\n# level h_o h_d err_h1 err_l2 err_lambda alpha dofs\n";
        for (const auto& r : rows)
            dat << r.level << ' ' << r.h_o << ' ' << r.h_d << ' ' << r.err_h1 << ' ' << r.err_l2 << ' ' << r.err_lambda
                << ' ' << r.alpha << ' ' << r.dofs << '\n';

        log << "k_o = " << k_o << ", k_d = " << config.k_d << " (" << exact.name << ")\n";
        log << "lev    h_o      h_d      err_h1     eoc    err_l2     eoc    err_lambda  alpha              dofs    sec\n";
        for (const auto& r : rows) {
            log << std::setw(3) << r.level << std::fixed << std::setprecision(3) << std::setw(9) << r.h_o
                << std::setw(9) << r.h_d << std::scientific << std::setprecision(3) << std::setw(11) << r.err_h1
                << std::fixed << std::setprecision(2) << std::setw(7) << r.eoc_h1 << std::scientific
                << std::setprecision(3) << std::setw(11) << r.err_l2 << std::fixed << std::setprecision(2)
                << std::setw(7) << r.eoc_l2 << std::scientific << std::setprecision(3) << std::setw(11)
                << r.err_lambda << std::fixed << std::setprecision(12) << std::setw(17) << r.alpha << std::setw(8)
                << r.dofs << std::setprecision(1) << std::setw(7) << r.seconds << '\n';
            log.unsetf(std::ios::floatfield);
        }
        all.insert(all.end(), rows.begin(), rows.end());
    }
    if (config.k_o.empty()) {
        auto csv = open_output(config, "convergence.csv");
        write_convergence_csv(csv, {});
    }
    return all;
}

std::vector<AsymptoticReport> run_asymptotic(const RunConfig& config, std::ostream& log)
{
    config.validate();
    if (config.k_o.empty()) throw Error("asymptotic study needs a k_o value");
    const auto exact = exact_for(config);
    const int k_o = config.k_o.front();
    const double a = config.problem == "example2" ? config.ellipse_a : config.outer_radius;
    const double r = config.inner_radius;

    std::vector<AsymptoticReport> reports;
    std::optional<solver::CoupledSolution> finest;
    for (int level : config.levels) {
        const auto start = std::chrono::steady_clock::now();
        auto mesh = std::make_shared<const geometry::CurvedMesh>(build_mesh(config, level));
        auto sol = solver::solve_problem(mesh, k_o, config.k_d, {exact.f, exact.g}, assembly_options(config));
        AsymptoticReport rep;
        rep.level = level;
        rep.k_o = k_o;
        rep.alpha = sol.alpha;
        rep.left_value = solver::evaluate_field(sol, Point(-a, 0.0));
        rep.right_value = solver::evaluate_field(sol, Point(a, 0.0));
        rep.tail_bound = exact.tail_bound;
        rep.seconds = seconds_since(start);
        log << "level " << level << " k_o=" << k_o << " k_d=" << config.k_d << std::setprecision(12)
            << ": alpha = " << rep.alpha.mean << " (std " << std::setprecision(3) << rep.alpha.std_dev
            << ", galerkin " << std::setprecision(12) << rep.alpha.galerkin << "), |alpha - exact| = "
            << std::setprecision(3) << std::abs(rep.alpha.mean - exact.alpha) << ", u_h(-a,0) = "
            << std::setprecision(12) << rep.left_value << ", u_h(a,0) = " << rep.right_value << std::setprecision(6)
            << '\n';
        reports.push_back(rep);
        finest = std::move(sol);
    }

    auto alpha = open_output(config, "alpha.txt");
    alpha << "# exact alpha " << exact.alpha << "\n# series tail bound " << exact.tail_bound << '\n';
    alpha << "# err_left, err_right compare u_h(-a,0), u_h(a,0) with the exact field there\n";
    alpha << "# level k_o k_d alpha alpha_std alpha_galerkin u_left u_right err_alpha err_left err_right seconds\n";
    for (const auto& rep : reports)
        alpha << rep.level << ' ' << rep.k_o << ' ' << config.k_d << ' ' << rep.alpha.mean << ' ' << rep.alpha.std_dev
              << ' ' << rep.alpha.galerkin << ' ' << rep.left_value << ' ' << rep.right_value << ' '
              << std::abs(rep.alpha.mean - exact.alpha) << ' ' << std::abs(rep.left_value - exact.u(Point(-a, 0.0)))
              << ' ' << std::abs(rep.right_value - exact.u(Point(a, 0.0))) << ' ' << rep.seconds << '\n';

    if (finest) {
        auto profile = [&](const std::string& name, double from, double to) {
            auto out = open_output(config, name);
            out << "# x1 u_h u_exact\n";
            for (int i = 0; i < config.profile_points; ++i) {
                const double x = from + (to - from) * i / (config.profile_points - 1);
                const Point p(x, 0.0);
                out << x << ' ' << solver::evaluate_field(*finest, p) << ' ' << exact.u(p) << '\n';
            }
        };
        profile("profile_left.dat", -a, -r);
        profile("profile_right.dat", r, a);
    }
    return reports;
}

solver::CoupledSolution run_single(const RunConfig& config, std::ostream& log)
{
    config.validate();
    if (config.k_o.empty()) throw Error("solve needs a k_o value");
    const auto exact = exact_for(config);
    const int level = config.levels.empty() ? 0 : config.levels.front();
    const int k_o = config.k_o.front();
    const auto start = std::chrono::steady_clock::now();
    auto mesh = std::make_shared<const geometry::CurvedMesh>(build_mesh(config, level));
    auto sol = solver::solve_problem(mesh, k_o, config.k_d, {exact.f, exact.g}, assembly_options(config));
    const double seconds = seconds_since(start);

    std::filesystem::create_directories(config.output);
    geometry::save_mesh((std::filesystem::path(config.output) / "mesh.txt").string(), *mesh);
    auto out = open_output(config, "solution.txt");
    solver::write_solution(out, sol);
    if (config.dump_matrices) {
        const auto& ops = sol.system->boundary;
        for (const auto& [name, m] : {std::pair<std::string, const Eigen::MatrixXd*>{"V_hat.txt", &ops.V_hat},
                                      {"K_hat.txt", &ops.K_hat},
                                      {"Q_hat.txt", &ops.Q_hat},
                                      {"V.txt", &ops.V},
                                      {"K.txt", &ops.K},
                                      {"Q.txt", &ops.Q}}) {
            auto f = open_output(config, name);
            bem::write_matrix(f, *m);
        }
    }

    const auto& map = sol.system->dofs;
    log << exact.name << " level " << level << " k_o=" << k_o << " k_d=" << config.k_d << '\n';
    log << "  h_o " << mesh->h_interior() << ", h_d " << mesh->h_boundary() << ", elements " << mesh->num_elements() << '\n';
    log << "  dofs " << map.system_size() << " (interior " << map.num_interior() << ", gamma " << map.num_gamma()
        << ", dirichlet " << map.num_dirichlet() << ", lambda " << map.num_lambda << ")\n";
    log << std::setprecision(6) << "  residual " << sol.residual << ", schur rcond " << sol.schur_rcond << '\n';
    log << std::setprecision(12) << "  alpha " << sol.alpha.mean << " (exact " << exact.alpha << ", std "
        << std::setprecision(3) << sol.alpha.std_dev << ", galerkin " << std::setprecision(12) << sol.alpha.galerkin
        << ")\n";
    log << std::setprecision(6) << "  err_h1 " << error_h1_seminorm(sol, exact, config.error_quadrature) << ", err_l2 "
        << error_l2_norm(sol, exact, config.error_quadrature);
    if (exact.lambda) log << ", err_lambda " << flux_error(sol, exact);
    log << "\n  seconds " << seconds << '\n';
    return sol;
}

} // namespace cvembem::harness
