#pragma once

#include "cvembem/geometry/mesh.hpp"
#include "cvembem/quadrature/rules.hpp"

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace cvembem::cvem {

inline constexpr int max_order = 5;

/// Monomials ((x - c)/h)^a ((y - c)/h)^b ordered by degree, then by b.
class ScaledMonomialBasis {
public:
    ScaledMonomialBasis() = default;
    ScaledMonomialBasis(Point center, double scale, int degree);

    static int count(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }
    static int index(int a, int b)
    {
        const int d = a + b;
        return d * (d + 1) / 2 + b;
    }

    int size() const { return count(degree_); }
    int degree() const { return degree_; }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }
    std::pair<int, int> exponents(int i) const { return exps_[i]; }

    Eigen::VectorXd values(const Point& x) const;
    /// Physical gradients, one row per monomial.
    Eigen::MatrixX2d gradients(const Point& x) const;

private:
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    int degree_ = 0;
    std::vector<std::pair<int, int>> exps_;
};

enum class DofKind { Vertex, Edge, Moment };

struct DofDescriptor {
    DofKind kind;
    /// Vertex index / edge index within the element loop, -1 for moments.
    int entity = -1;
    /// Interior node number along the edge (traversal order), or monomial index for moments.
    int node = -1;
    Point position = Point::Zero();
};

/// Vertices first, then k-1 edge nodes per edge (interior Gauss-Lobatto
/// points in the edge coordinate; curved-edge nodes are γ-images), then the
/// scaled moments (1/|E|)∫ v m_α for |α| <= k-2.
std::vector<DofDescriptor> dof_layout(const geometry::CurvedPolygon& polygon, int k);

struct LocalVemSpace {
    int order = 1;
    geometry::CurvedPolygon polygon;
    ScaledMonomialBasis basis;
    std::vector<DofDescriptor> dofs;
    double area = 0.0;
    double perimeter = 0.0;
    quadrature::MonomialMoments moments;

    /// ∫∇m_i·∇m_j (first row zero), and the projector system G c = B whose
    /// first row is the boundary average.
    Eigen::MatrixXd grad_gram;
    Eigen::MatrixXd G;
    Eigen::MatrixXd B;
    /// DOFs of each monomial: D(ℓ, i) = dof_ℓ(m_i).
    Eigen::MatrixXd D;
    /// Π∇ and Π⁰ as maps from DOFs to monomial coefficients.
    Eigen::MatrixXd pi_nabla_star;
    Eigen::MatrixXd H;
    Eigen::MatrixXd pi0_star;

    int num_dofs() const { return static_cast<int>(dofs.size()); }
    int num_vertices() const { return static_cast<int>(polygon.size()); }
    /// Π∇ expressed back in DOFs.
    Eigen::MatrixXd pi_nabla() const { return D * pi_nabla_star; }
};

/// Geometry, DOF layout and moments only.
LocalVemSpace make_local_space(const geometry::CurvedPolygon& polygon, int k);

/// Fills G, B, D and Π∇; returns Π∇ (monomial coefficients per DOF).
const Eigen::MatrixXd& compute_pi_nabla(LocalVemSpace& space);

/// Enhanced L² projection; requires Π∇.
const Eigen::MatrixXd& compute_pi0(LocalVemSpace& space);

/// make_local_space + both projectors.
LocalVemSpace build_local_space(const geometry::CurvedPolygon& polygon, int k);

/// Boundary values of the DOF-ℓ basis function along edge `edge` at xi.
/// Returns (local dof, value) pairs for the k+1 nonzero traces.
std::vector<std::pair<int, double>> edge_trace(const LocalVemSpace& space, int edge, double xi);

/// Projected stiffness plus the dofi-dofi stabilization.
Eigen::MatrixXd local_stiffness(const LocalVemSpace& space);

using ScalarField = std::function<double(const Point&)>;

Eigen::VectorXd local_load(const LocalVemSpace& space, const ScalarField& f, int quadrature_n = 8);

Eigen::VectorXd interpolate_dofs(const LocalVemSpace& space, const ScalarField& v, int quadrature_n = 8);

} // namespace cvembem::cvem
