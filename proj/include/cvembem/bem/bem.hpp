#pragma once

#include "cvembem/geometry/mesh.hpp"
#include "cvembem/quadrature/singular.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace cvembem::bem {

using Partition = std::vector<geometry::BoundaryArc>;

/// G(x,y) = -(1/2π) log |x - y|. Throws for coincident points.
double kernel_G(const Point& x, const Point& y);

/// Smooth-arc data used when |x - y| falls below the coincidence threshold.
struct CoincidenceLimit {
    double curvature = 0.0;
    double threshold = 0.0;
};

/// ∂G/∂n_y(x,y) = (1/2π) (x-y)·n_y / |x-y|². Below the threshold the limit
/// -κ(y)/(4π) for an outward normal on a counter-clockwise curve is returned.
double kernel_dGdn(const Point& x, const Point& y, const Point& n_y, const CoincidenceLimit& limit = {});

/// G(γ(t + d), γ(t)) evaluated through the cancellation-free chord.
double single_layer_kernel(const geometry::ParametricCurve& curve, double t, double d);

/// ∂G/∂n_y(γ(t + d), γ(t)) with y = γ(t), using the chord formulas.
double double_layer_kernel(const geometry::ParametricCurve& curve, double t, double d);

/// Continuous, periodic, piecewise Lagrange space of polynomial degree
/// `degree` in the curve parameter on a boundary partition. Element e carries
/// local functions 0..degree; local function a maps to global node e·degree + a
/// (the last one wraps to the next element's first node).
class LagrangeBoundarySpace {
public:
    LagrangeBoundarySpace(Partition partition, int degree);

    const Partition& partition() const { return partition_; }
    int degree() const { return degree_; }
    int num_elements() const { return static_cast<int>(partition_.size()); }
    int dimension() const { return degree_ * num_elements(); }
    int local_size() const { return degree_ + 1; }
    int global_index(int element, int local) const { return (element * degree_ + local) % dimension(); }
    /// Local reference nodes in [-1, 1].
    const std::vector<double>& nodes() const { return nodes_; }
    std::vector<double> values(double xi) const;
    /// Parameter of global node j on the curve.
    double node_parameter(int j) const;
    /// ∫_Γ of every basis function with `n`-point Gauss per element.
    Eigen::VectorXd basis_integrals(int n = 16) const;
    /// Value at local coordinate xi of element `element` for coefficients `c`.
    double evaluate(const Eigen::VectorXd& c, int element, double xi) const;

private:
    Partition partition_;
    int degree_;
    std::vector<double> nodes_;
};

/// X̂ of order k_d: degree k_d - 1, equispaced nodes in the parameter.
LagrangeBoundarySpace make_bem_space(const Partition& partition, int k_d);

/// Γ-trace of the CVEM space of order k_o: degree k_o, Gauss-Lobatto nodes.
LagrangeBoundarySpace make_trace_space(const Partition& partition, int k_o);

struct ConstraintMatrix {
    Eigen::SparseMatrix<double> C;
    /// The coefficient c_i of each row (the entry that is not 1).
    std::vector<double> coefficients;
};

/// Zero-mean combinations φ_i of consecutive Lagrange functions.
/// k_d = 2: φ_i = c_i φ̂_i + φ̂_{i+1}. k_d = 3 (even number of elements):
/// φ_{2i} = c φ̂_{2i} + φ̂_{2i+1}, φ_{2i+1} = φ̂_{2i+1} + c φ̂_{2i+2}.
ConstraintMatrix build_constraint_matrix(const LagrangeBoundarySpace& space, int k_d);

struct BoundaryOperatorSet {
    Eigen::MatrixXd V_hat;
    Eigen::MatrixXd K_hat;
    Eigen::MatrixXd Q_hat;
    ConstraintMatrix constraint;
    Eigen::MatrixXd V;
    Eigen::MatrixXd K;
    Eigen::MatrixXd Q;
};

Eigen::MatrixXd assemble_V_hat(const LagrangeBoundarySpace& space, const quadrature::SingularRuleOptions& options = {},
                               Execution exec = Execution::Parallel);

/// Rows: BEM test functions; columns: trace basis functions.
Eigen::MatrixXd assemble_K_hat(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace,
                               const quadrature::SingularRuleOptions& options = {},
                               Execution exec = Execution::Parallel);

/// Rows: trace basis functions; columns: BEM functions.
Eigen::MatrixXd assemble_Q_hat(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace, int n = 16);

/// V = C V̂ Cᵀ, K = C K̂, Q = Q̂ Cᵀ.
BoundaryOperatorSet constrained_operators(Eigen::MatrixXd V_hat, Eigen::MatrixXd K_hat, Eigen::MatrixXd Q_hat,
                                          ConstraintMatrix constraint);

BoundaryOperatorSet assemble_boundary_operators(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace,
                                                int k_d, const quadrature::SingularRuleOptions& options = {},
                                                Execution exec = Execution::Parallel);

/// Plain-text dense matrix: "rows cols" header, then one row per line, 17 digits.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

} // namespace cvembem::bem
