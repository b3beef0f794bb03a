#include "cvembem/bem/bem.hpp"
#include "cvembem/cvem/lagrange.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <cmath>

namespace cvembem::bem {

LagrangeBoundarySpace::LagrangeBoundarySpace(Partition partition, int degree)
    : partition_(std::move(partition)), degree_(degree)
{
    if (degree < 1) throw std::invalid_argument("boundary space degree must be >= 1");
    if (partition_.size() < 3) throw std::invalid_argument("boundary partition needs at least 3 cells");
    nodes_ = cvem::trace_nodes(degree);
}

std::vector<double> LagrangeBoundarySpace::values(double xi) const { return cvem::lagrange_values(nodes_, xi); }

double LagrangeBoundarySpace::node_parameter(int j) const
{
    return partition_.at(j / degree_).arc.parameter(nodes_[j % degree_]);
}

Eigen::VectorXd LagrangeBoundarySpace::basis_integrals(int n) const
{
    const auto& g = quadrature::gauss_legendre(n);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
    for (int e = 0; e < num_elements(); ++e) {
        const auto& arc = partition_[e].arc;
        const double jac = 0.5 * (arc.t1 - arc.t0);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double w = g.weights[q] * jac * arc.curve->speed(arc.parameter(g.nodes[q]));
            const auto v = values(g.nodes[q]);
            for (int a = 0; a < local_size(); ++a) out[global_index(e, a)] += w * v[a];
        }
    }
    return out;
}

double LagrangeBoundarySpace::evaluate(const Eigen::VectorXd& c, int element, double xi) const
{
    const auto v = values(xi);
    double s = 0.0;
    for (int a = 0; a < local_size(); ++a) s += c[global_index(element, a)] * v[a];
    return s;
}

LagrangeBoundarySpace make_bem_space(const Partition& partition, int k_d)
{
    if (k_d != 2 && k_d != 3) throw std::invalid_argument("boundary element order k_d must be 2 or 3");
    // Lobatto nodes of degree 1 and 2 are the equispaced sets {-1,1} and {-1,0,1}
    return LagrangeBoundarySpace(partition, k_d - 1);
}

LagrangeBoundarySpace make_trace_space(const Partition& partition, int k_o)
{
    return LagrangeBoundarySpace(partition, k_o);
}

ConstraintMatrix build_constraint_matrix(const LagrangeBoundarySpace& space, int k_d)
{
    if (k_d != 2 && k_d != 3) throw std::invalid_argument("constraint matrix needs k_d in {2, 3}");
    if (space.degree() != k_d - 1) throw std::invalid_argument("constraint matrix: space order does not match k_d");
    const int m = space.dimension();
    if (k_d == 3 && space.num_elements() % 2 != 0) throw Error("k_d = 3 requires an even number of boundary elements");

    const Eigen::VectorXd I = space.basis_integrals(16);
    auto ratio = [&](int num, int den) {
        if (std::abs(I[den]) < 1e-14) throw Error("degenerate boundary mesh: basis integral below 1e-14");
        return -I[num] / I[den];
    };

    ConstraintMatrix out;
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m - 1; ++i) {
        if (k_d == 2 || i % 2 == 0) {
            const double c = ratio(i + 1, i);
            trip.emplace_back(i, i, c);
            trip.emplace_back(i, i + 1, 1.0);
            out.coefficients.push_back(c);
        } else {
            const double c = ratio(i, i + 1);
            trip.emplace_back(i, i, 1.0);
            trip.emplace_back(i, i + 1, c);
            out.coefficients.push_back(c);
        }
    }
    out.C.resize(m - 1, m);
    out.C.setFromTriplets(trip.begin(), trip.end());
    return out;
}

} // namespace cvembem::bem
