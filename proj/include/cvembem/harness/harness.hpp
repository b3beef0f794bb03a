#pragma once

#include "cvembem/solver/solver.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cvembem::harness {

using GradientField = std::function<Point(const Point&)>;

struct ExactSolution {
    std::string name;
    cvem::ScalarField u;
    GradientField grad;
    cvem::ScalarField f;
    /// Dirichlet datum on Γ₀.
    cvem::ScalarField g;
    /// Outward normal derivative on Γ at a point of Γ, if known in closed form.
    cvem::ScalarField lambda;
    double alpha = 0.0;
    /// Bound on the series truncation error (0 for closed forms).
    double tail_bound = 0.0;
};

/// u = x₁/|x|² + 2 outside the unit circle; λ on the circle of radius 2.
ExactSolution exact_example1();

/// Series solution outside the unit circle for g = x₁⁴ (x₁ ≥ 0), 0 otherwise,
/// truncated after the odd term `terms`.
ExactSolution exact_example2(int terms = 101);

/// Relative |u - Π∇u_h|_{H¹} and ‖u - Π⁰u_h‖_{L²} over the mesh.
double error_h1_seminorm(const solver::CoupledSolution& solution, const ExactSolution& exact, int quadrature_n = 8);
double error_l2_norm(const solver::CoupledSolution& solution, const ExactSolution& exact, int quadrature_n = 8);

/// Absolute ‖λ_h - λ‖_{L²(Γ)}.
double flux_error(const solver::CoupledSolution& solution, const ExactSolution& exact);

struct EocResult {
    std::vector<double> rates;
    /// Set when some pair of h values is not a halving (within 10 %); those
    /// rates use log(h ratio) instead of log 2.
    bool non_halving = false;
};

/// Pairwise rates log(e_i/e_{i+1})/log 2, positive for decreasing errors.
EocResult eoc(const std::vector<double>& errors, const std::vector<double>& h);

/// Least-squares slope of log₂ e against the refinement level.
double fitted_rate(const std::vector<double>& errors);

struct RunConfig {
    std::string problem = "example1";
    double inner_radius = 1.0;
    double outer_radius = 2.0;
    double ellipse_a = 50.0;
    double ellipse_b = 15.0;
    int n_r = 2;
    int n_theta = 18;
    double radial_grading = 1.0;
    std::vector<int> levels{0, 1, 2, 3};
    std::vector<int> k_o{2};
    int k_d = 2;
    int error_quadrature = 8;
    int series_terms = 101;
    int profile_points = 99;
    bool dump_matrices = false;
    std::string output = ".";
    quadrature::SingularRuleOptions singular;
    Execution exec = Execution::Parallel;

    void validate() const;
};

/// Flat `key = value` text, `#` comments. Unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

ExactSolution exact_for(const RunConfig& config);
geometry::CurvedMesh build_mesh(const RunConfig& config, int level);

struct ConvergenceRow {
    int k_o = 0;
    int level = 0;
    double h_o = 0.0;
    double h_d = 0.0;
    double err_h1 = 0.0;
    double eoc_h1 = 0.0;
    double err_l2 = 0.0;
    double eoc_l2 = 0.0;
    int dofs = 0;
    double seconds = 0.0;
    // diagnostics not written to the CSV
    double err_lambda = 0.0;
    double alpha = 0.0;
    double alpha_std = 0.0;
    double residual = 0.0;
    bool ok = true;
    std::string message;
};

/// Undefined EOC entries (first level, failed runs) are NaN and written as empty fields.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

/// Solves every (k∘, level), writes convergence CSV and .dat files into
/// config.output, and prints the table to `log`.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, std::ostream& log);

struct AsymptoticReport {
    int level = 0;
    int k_o = 0;
    solver::AlphaReport alpha;
    double left_value = 0.0;
    double right_value = 0.0;
    double tail_bound = 0.0;
    double seconds = 0.0;
};

/// Example 2 style study on every configured level for the first k∘: α per
/// level in alpha.txt, u_h profiles of the finest level along the negative
/// and positive x₁ axis in profile_left.dat / profile_right.dat.
std::vector<AsymptoticReport> run_asymptotic(const RunConfig& config, std::ostream& log);

/// One solve at the first configured level and k∘; writes mesh, solution and
/// (optionally) matrix dumps.
solver::CoupledSolution run_single(const RunConfig& config, std::ostream& log);

/// Quick invariant checks; prints one line per check.
bool run_selftest(std::ostream& log);

} // namespace cvembem::harness
