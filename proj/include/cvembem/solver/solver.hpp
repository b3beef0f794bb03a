#pragma once

#include "cvembem/bem/bem.hpp"
#include "cvembem/cvem/vem.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace cvembem::solver {

enum class DofRole { Interior, Gamma, Dirichlet };

/// Global CVEM numbering: mesh vertices, then k-1 nodes per mesh edge in the
/// edge's own v0 -> v1 order, then the moments of every element. The Γ block
/// is ordered like the trace space on the boundary partition.
struct GlobalDofMap {
    int order = 1;
    int num_cvem = 0;
    std::vector<DofRole> role;
    /// Position inside the block of its role.
    std::vector<int> block_index;
    std::vector<int> interior;
    /// gamma[j] is the global DOF of trace basis function j.
    std::vector<int> gamma;
    std::vector<int> dirichlet;
    /// Point carrying each vertex/edge DOF (unused for moments).
    std::vector<Point> position;
    std::vector<std::vector<int>> element_dofs;
    int num_lambda = 0;

    int num_interior() const { return static_cast<int>(interior.size()); }
    int num_gamma() const { return static_cast<int>(gamma.size()); }
    int num_dirichlet() const { return static_cast<int>(dirichlet.size()); }
    /// |𝒮| + |𝒢|.
    int system_size() const { return num_cvem + num_lambda; }
};

GlobalDofMap build_dof_map(const geometry::CurvedMesh& mesh, const bem::Partition& gamma, int k_o, int k_d);

struct ProblemData {
    cvem::ScalarField f;
    cvem::ScalarField g;
};

/// Mesh, spaces and the assembled blocks before the Dirichlet elimination.
struct BlockSystem {
    std::shared_ptr<const geometry::CurvedMesh> mesh;
    int k_o = 1;
    int k_d = 2;
    GlobalDofMap dofs;
    std::vector<cvem::LocalVemSpace> elements;
    /// Closed polylines of the element boundaries (curved edges sampled) for point location.
    std::vector<std::vector<Point>> outlines;
    bem::LagrangeBoundarySpace bem_space;
    bem::LagrangeBoundarySpace trace_space;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd f;
    bem::BoundaryOperatorSet boundary;
};

struct AssemblyOptions {
    quadrature::SingularRuleOptions singular;
    Execution exec = Execution::Parallel;
    int load_quadrature = 8;
};

BlockSystem assemble_global(std::shared_ptr<const geometry::CurvedMesh> mesh, int k_o, int k_d,
                            const cvem::ScalarField& f, const AssemblyOptions& options = {});

/// Global DOF vector of the CVEM interpolant of v (moments element by element).
Eigen::VectorXd interpolate_global(const BlockSystem& system, const cvem::ScalarField& v, int quadrature_n = 8);

/// Blocks after strong imposition of g on Γ₀.
struct ReducedSystem {
    Eigen::SparseMatrix<double> A_II;
    Eigen::SparseMatrix<double> A_IG;
    Eigen::SparseMatrix<double> A_GI;
    Eigen::SparseMatrix<double> A_GG;
    Eigen::VectorXd f_I;
    Eigen::VectorXd f_G;
    Eigen::VectorXd g;
};

ReducedSystem apply_dirichlet(const BlockSystem& system, const cvem::ScalarField& g);

struct AlphaReport {
    /// Arclength mean of ½u + Vλ - Ku over Γ quadrature points.
    double mean = 0.0;
    double std_dev = 0.0;
    /// Same mean from the assembled Galerkin matrices.
    double galerkin = 0.0;
};

struct CoupledSolution {
    std::shared_ptr<const BlockSystem> system;
    /// All CVEM DOFs, Dirichlet values included.
    Eigen::VectorXd u;
    /// Coefficients in the zero-mean basis and in the Lagrange basis.
    Eigen::VectorXd lambda;
    Eigen::VectorXd lambda_hat;
    AlphaReport alpha;
    double residual = 0.0;
    double schur_rcond = 0.0;

    /// Coefficients of the Γ trace in the trace basis.
    Eigen::VectorXd trace() const;
};

/// Schur complement on u_I (sparse LDLᵀ) then dense LU on (u_Γ, λ). Fills
/// alpha through recover_alpha.
CoupledSolution solve_coupled(std::shared_ptr<const BlockSystem> system, const ReducedSystem& reduced);

/// assemble_global + apply_dirichlet + solve_coupled.
CoupledSolution solve_problem(std::shared_ptr<const geometry::CurvedMesh> mesh, int k_o, int k_d,
                              const ProblemData& data, const AssemblyOptions& options = {});

AlphaReport recover_alpha(const CoupledSolution& solution, int points_per_cell = 8);

/// Element containing x, -1 if none.
int locate_element(const BlockSystem& system, const Point& x);

/// Π∇ of u_h at x, or the trace polynomial when x lies on Γ.
double evaluate_field(const CoupledSolution& solution, const Point& x);

/// Boundary values u_h(γ(t)) and λ_h(γ(t)) for a parameter t on Γ.
double evaluate_trace(const CoupledSolution& solution, double t);
double evaluate_flux(const CoupledSolution& solution, double t);

/// Representation formula outside Γ; refuses points closer to Γ than the
/// longest boundary cell.
double evaluate_exterior(const CoupledSolution& solution, const Point& x);

/// Plain-text dump: header with the DOF map sizes, u, λ, α, residual.
void write_solution(std::ostream& out, const CoupledSolution& solution);

} // namespace cvembem::solver
