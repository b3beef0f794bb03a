#include "cvembem/solver/solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace cvembem::solver {

Eigen::VectorXd CoupledSolution::trace() const
{
    const auto& gamma = system->dofs.gamma;
    Eigen::VectorXd out(gamma.size());
    for (std::size_t j = 0; j < gamma.size(); ++j) out[j] = u[gamma[j]];
    return out;
}

CoupledSolution solve_coupled(std::shared_ptr<const BlockSystem> system, const ReducedSystem& r)
{
    const auto& map = system->dofs;
    const auto& ops = system->boundary;
    const int ni = map.num_interior();
    const int ng = map.num_gamma();
    const int m = map.num_lambda;
    if (ops.Q.rows() != ng || ops.Q.cols() != m || ops.V.rows() != m || ops.K.cols() != ng)
        throw std::invalid_argument("boundary operators do not match the DOF map");

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ni, ng);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ni);
    if (ni > 0) {
        ldlt.compute(r.A_II);
        if (ldlt.info() != Eigen::Success) throw Error("factorization of the interior stiffness block failed");
        const Eigen::VectorXd d = ldlt.vectorD();
        if (d.minCoeff() <= 0.0) {
            std::ostringstream msg;
            msg << "interior stiffness block is singular (pivot ratio " << d.minCoeff() / d.maxCoeff() << ")";
            throw Error(msg.str());
        }
        X = ldlt.solve(Eigen::MatrixXd(r.A_IG));
        y = ldlt.solve(r.f_I);
    }

    const Eigen::MatrixXd jump = 0.5 * ops.Q.transpose() - ops.K;
    Eigen::MatrixXd S(ng + m, ng + m);
    S.topLeftCorner(ng, ng) = Eigen::MatrixXd(r.A_GG) - r.A_GI * X;
    S.topRightCorner(ng, m) = -ops.Q;
    S.bottomLeftCorner(m, ng) = jump;
    S.bottomRightCorner(m, m) = ops.V;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ng + m);
    rhs.head(ng) = r.f_G - r.A_GI * y;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    CoupledSolution sol;
    sol.system = system;
    sol.schur_rcond = lu.rcond();
    if (!(sol.schur_rcond > 1e-14)) {
        std::ostringstream msg;
        msg << "coupled boundary system is numerically singular (reciprocal condition estimate "
            << sol.schur_rcond << "); refine the mesh";
        throw Error(msg.str());
    }
    const Eigen::VectorXd z = lu.solve(rhs);
    const Eigen::VectorXd u_g = z.head(ng);
    sol.lambda = z.tail(m);
    const Eigen::VectorXd u_i = y - X * u_g;

    sol.u = Eigen::VectorXd::Zero(map.num_cvem);
    for (int i = 0; i < ni; ++i) sol.u[map.interior[i]] = u_i[i];
    for (int j = 0; j < ng; ++j) sol.u[map.gamma[j]] = u_g[j];
    for (int d = 0; d < map.num_dirichlet(); ++d) sol.u[map.dirichlet[d]] = r.g[d];
    sol.lambda_hat = ops.constraint.C.transpose() * sol.lambda;

    // residual of the block system before the Schur elimination
    const Eigen::VectorXd r_i = r.A_II * u_i + r.A_IG * u_g - r.f_I;
    const Eigen::VectorXd r_g = r.A_GI * u_i + r.A_GG * u_g - ops.Q * sol.lambda - r.f_G;
    const Eigen::VectorXd r_l = jump * u_g + ops.V * sol.lambda;
    const double res = std::sqrt(r_i.squaredNorm() + r_g.squaredNorm() + r_l.squaredNorm());
    const double b = std::sqrt(r.f_I.squaredNorm() + r.f_G.squaredNorm());
    sol.residual = b > 0.0 ? res / b : res;

    sol.alpha = recover_alpha(sol);
    return sol;
}

CoupledSolution solve_problem(std::shared_ptr<const geometry::CurvedMesh> mesh, int k_o, int k_d,
                              const ProblemData& data, const AssemblyOptions& options)
{
    auto system = std::make_shared<const BlockSystem>(assemble_global(std::move(mesh), k_o, k_d, data.f, options));
    const auto reduced = apply_dirichlet(*system, data.g);
    return solve_coupled(system, reduced);
}

} // namespace cvembem::solver
