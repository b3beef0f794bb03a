#include "cvembem/bem/bem.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <utility>

namespace cvembem::bem {

namespace {

using quadrature::PairRelation;

// Runs `compute` over all pairs, in parallel or serially, then scatters the
// blocks in pair order so both paths produce identical matrices.
template <class Compute, class Scatter>
void for_pairs(const std::vector<std::pair<int, int>>& pairs, Execution exec, Compute&& compute, Scatter&& scatter)
{
    std::vector<Eigen::MatrixXd> blocks(pairs.size());
    const long n = static_cast<long>(pairs.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (long i = 0; i < n; ++i) blocks[i] = compute(pairs[i].first, pairs[i].second);
    } else {
        for (long i = 0; i < n; ++i) blocks[i] = compute(pairs[i].first, pairs[i].second);
    }
    for (long i = 0; i < n; ++i) scatter(pairs[i].first, pairs[i].second, blocks[i]);
}

} // namespace

Eigen::MatrixXd assemble_V_hat(const LagrangeBoundarySpace& space, const quadrature::SingularRuleOptions& options,
                               Execution exec)
{
    const int n = space.num_elements();
    const int ls = space.local_size();
    const auto& part = space.partition();

    std::vector<std::pair<int, int>> pairs;
    for (int p = 0; p < n; ++p)
        for (int q = p; q < n; ++q) pairs.emplace_back(p, q);

    auto compute = [&](int p, int q) {
        const auto& outer = part[p].arc;
        const auto& inner = part[q].arc;
        const auto& curve = *outer.curve;
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(ls, ls);
        const auto rule = quadrature::q_smoothed_pair_rule(outer, inner, quadrature::classify_pair(p, q, n), options);
        for (const auto& node : rule) {
            const double t = outer.parameter(node.xi_outer);
            const double w = node.weight * single_layer_kernel(curve, t, node.offset) * curve.speed(t) *
                             curve.speed(t + node.offset);
            const auto fo = space.values(node.xi_outer);
            const auto fi = space.values(node.xi_inner);
            for (int a = 0; a < ls; ++a)
                for (int b = 0; b < ls; ++b) block(a, b) += w * fo[a] * fi[b];
        }
        return block;
    };

    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(space.dimension(), space.dimension());
    for_pairs(pairs, exec, compute, [&](int p, int q, const Eigen::MatrixXd& block) {
        for (int a = 0; a < ls; ++a) {
            for (int b = 0; b < ls; ++b) {
                V(space.global_index(p, a), space.global_index(q, b)) += block(a, b);
                if (p != q) V(space.global_index(q, b), space.global_index(p, a)) += block(a, b);
            }
        }
    });
    return V;
}

Eigen::MatrixXd assemble_K_hat(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace,
                               const quadrature::SingularRuleOptions& options, Execution exec)
{
    const int n = space.num_elements();
    if (trace.num_elements() != n) throw std::invalid_argument("assemble_K_hat: spaces on different partitions");
    const int ls = space.local_size();
    const int lt = trace.local_size();
    const auto& part = space.partition();

    std::vector<std::pair<int, int>> pairs;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) pairs.emplace_back(p, q);

    // smooth kernel on a smooth curve: the plain product rule for every pair
    auto compute = [&](int p, int q) {
        const auto& outer = part[p].arc;
        const auto& inner = part[q].arc;
        const auto& curve = *outer.curve;
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(ls, lt);
        for (const auto& node : quadrature::q_smoothed_pair_rule(outer, inner, PairRelation::Far, options)) {
            const double ty = inner.parameter(node.xi_inner);
            const double tx = ty - node.offset;
            const double w = node.weight * double_layer_kernel(curve, ty, -node.offset) * curve.speed(tx) * curve.speed(ty);
            const auto fo = space.values(node.xi_outer);
            const auto fi = trace.values(node.xi_inner);
            for (int a = 0; a < ls; ++a)
                for (int b = 0; b < lt; ++b) block(a, b) += w * fo[a] * fi[b];
        }
        return block;
    };

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(space.dimension(), trace.dimension());
    for_pairs(pairs, exec, compute, [&](int p, int q, const Eigen::MatrixXd& block) {
        for (int a = 0; a < ls; ++a)
            for (int b = 0; b < lt; ++b) K(space.global_index(p, a), trace.global_index(q, b)) += block(a, b);
    });
    return K;
}

Eigen::MatrixXd assemble_Q_hat(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace, int n)
{
    if (trace.num_elements() != space.num_elements()) throw std::invalid_argument("assemble_Q_hat: spaces on different partitions");
    const auto& g = quadrature::gauss_legendre(n);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(trace.dimension(), space.dimension());
    for (int e = 0; e < space.num_elements(); ++e) {
        const auto& arc = space.partition()[e].arc;
        const double jac = 0.5 * (arc.t1 - arc.t0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double w = g.weights[k] * jac * arc.curve->speed(arc.parameter(g.nodes[k]));
            const auto fs = space.values(g.nodes[k]);
            const auto ft = trace.values(g.nodes[k]);
            for (int i = 0; i < trace.local_size(); ++i)
                for (int j = 0; j < space.local_size(); ++j)
                    Q(trace.global_index(e, i), space.global_index(e, j)) += w * ft[i] * fs[j];
        }
    }
    return Q;
}

BoundaryOperatorSet constrained_operators(Eigen::MatrixXd V_hat, Eigen::MatrixXd K_hat, Eigen::MatrixXd Q_hat,
                                          ConstraintMatrix constraint)
{
    const auto& C = constraint.C;
    if (C.cols() != V_hat.rows() || V_hat.rows() != V_hat.cols() || K_hat.rows() != C.cols() ||
        Q_hat.cols() != C.cols() || Q_hat.rows() != K_hat.cols())
        throw std::invalid_argument("constrained_operators: shape mismatch");
    BoundaryOperatorSet out;
    out.V = C * V_hat * C.transpose();
    out.V = 0.5 * (out.V + out.V.transpose()).eval();
    out.K = C * K_hat;
    out.Q = Q_hat * C.transpose();
    out.V_hat = std::move(V_hat);
    out.K_hat = std::move(K_hat);
    out.Q_hat = std::move(Q_hat);
    out.constraint = std::move(constraint);
    return out;
}

BoundaryOperatorSet assemble_boundary_operators(const LagrangeBoundarySpace& space, const LagrangeBoundarySpace& trace,
                                                int k_d, const quadrature::SingularRuleOptions& options, Execution exec)
{
    auto C = build_constraint_matrix(space, k_d);
    return constrained_operators(assemble_V_hat(space, options, exec), assemble_K_hat(space, trace, options, exec),
                                 assemble_Q_hat(space, trace), std::move(C));
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m)
{
    out << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream& in)
{
    Eigen::Index r = 0, c = 0;
    if (!(in >> r >> c) || r < 0 || c < 0) throw Error("matrix file: bad header");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            if (!(in >> m(i, j))) throw Error("matrix file: truncated data");
    return m;
}

} // namespace cvembem::bem
