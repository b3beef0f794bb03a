#include "cvembem/solver/solver.hpp"

#include "cvembem/cvem/lagrange.hpp"

#include <optional>
#include <string>

namespace cvembem::solver {

namespace {

DofRole role_of(geometry::BoundaryTag tag)
{
    switch (tag) {
    case geometry::BoundaryTag::Inner: return DofRole::Dirichlet;
    case geometry::BoundaryTag::Outer: return DofRole::Gamma;
    default: return DofRole::Interior;
    }
}

// Point samples of a closed element boundary, fine enough that the polyline
// stays within ~1e-6 relative of curved edges.
std::vector<Point> outline(const geometry::CurvedPolygon& poly)
{
    std::vector<Point> pts;
    for (const auto& e : poly.edges) {
        const int n = e.curved() ? 64 : 1;
        for (int i = 0; i < n; ++i) pts.push_back(e.point(-1.0 + 2.0 * i / n));
    }
    return pts;
}

} // namespace

GlobalDofMap build_dof_map(const geometry::CurvedMesh& mesh, const bem::Partition& gamma, int k_o, int k_d)
{
    if (k_o < 1 || k_o > cvem::max_order) throw std::invalid_argument("k_o must be in [1, 5]");
    if (k_d != 2 && k_d != 3) throw std::invalid_argument("k_d must be 2 or 3");
    const int k = k_o;
    const int nv = static_cast<int>(mesh.num_vertices());
    const int ne = static_cast<int>(mesh.num_edges());
    const int nel = static_cast<int>(mesh.num_elements());
    const int per_edge = k - 1;
    const int per_element = cvem::ScaledMonomialBasis::count(k - 2);
    const int edge_base = nv;
    const int moment_base = nv + ne * per_edge;

    GlobalDofMap map;
    map.order = k;
    map.num_cvem = moment_base + nel * per_element;
    map.role.assign(map.num_cvem, DofRole::Interior);
    map.position.assign(map.num_cvem, Point::Zero());
    for (int v = 0; v < nv; ++v) map.position[v] = mesh.vertices()[v];

    const auto& nodes = cvem::trace_nodes(k);
    for (int e = 0; e < ne; ++e) {
        const auto& edge = mesh.edges()[e];
        const DofRole r = role_of(edge.tag);
        const auto geo = mesh.edge_geometry(e, false);
        for (int m = 0; m < per_edge; ++m) {
            map.role[edge_base + e * per_edge + m] = r;
            map.position[edge_base + e * per_edge + m] = geo.point(nodes[m + 1]);
        }
        if (r != DofRole::Interior) {
            map.role[edge.v0] = r;
            map.role[edge.v1] = r;
        }
    }

    map.element_dofs.resize(nel);
    for (int el = 0; el < nel; ++el) {
        const auto& loop = mesh.elements()[el].loop;
        const int n = static_cast<int>(loop.size());
        auto& dofs = map.element_dofs[el];
        dofs.resize(n + n * per_edge + per_element);
        for (int l = 0; l < n; ++l) {
            const auto& edge = mesh.edges()[loop[l].edge];
            dofs[l] = loop[l].reversed ? edge.v1 : edge.v0;
            for (int m = 0; m < per_edge; ++m)
                dofs[n + l * per_edge + m] = edge_base + loop[l].edge * per_edge + (loop[l].reversed ? per_edge - 1 - m : m);
        }
        for (int a = 0; a < per_element; ++a) dofs[n + n * per_edge + a] = moment_base + el * per_element + a;
    }

    // Γ block in trace-space order: cell c contributes its start vertex and its
    // interior nodes in increasing parameter
    const int ncell = static_cast<int>(gamma.size());
    map.gamma.resize(static_cast<std::size_t>(ncell) * k);
    for (int c = 0; c < ncell; ++c) {
        const auto& edge = mesh.edges().at(gamma[c].edge);
        const bool flipped = edge.arc->t1 < edge.arc->t0;
        map.gamma[c * k] = flipped ? edge.v1 : edge.v0;
        for (int m = 0; m < per_edge; ++m)
            map.gamma[c * k + 1 + m] = edge_base + gamma[c].edge * per_edge + (flipped ? per_edge - 1 - m : m);
    }

    map.block_index.assign(map.num_cvem, -1);
    for (int j = 0; j < static_cast<int>(map.gamma.size()); ++j) {
        if (map.role[map.gamma[j]] != DofRole::Gamma || map.block_index[map.gamma[j]] != -1)
            throw Error("boundary partition does not match the Γ degrees of freedom");
        map.block_index[map.gamma[j]] = j;
    }
    for (int i = 0; i < map.num_cvem; ++i) {
        if (map.role[i] == DofRole::Interior) {
            map.block_index[i] = static_cast<int>(map.interior.size());
            map.interior.push_back(i);
        } else if (map.role[i] == DofRole::Dirichlet) {
            map.block_index[i] = static_cast<int>(map.dirichlet.size());
            map.dirichlet.push_back(i);
        } else if (map.block_index[i] == -1) {
            throw Error("Γ degree of freedom " + std::to_string(i) + " is not on the boundary partition");
        }
    }
    map.num_lambda = (k_d - 1) * ncell - 1;
    return map;
}

BlockSystem assemble_global(std::shared_ptr<const geometry::CurvedMesh> mesh, int k_o, int k_d,
                            const cvem::ScalarField& f, const AssemblyOptions& options)
{
    auto partition = geometry::extract_boundary_partition(*mesh, geometry::BoundaryTag::Outer);
    auto bem_space = bem::make_bem_space(partition, k_d);
    auto trace_space = bem::make_trace_space(partition, k_o);
    BlockSystem sys{mesh, k_o, k_d, build_dof_map(*mesh, partition, k_o, k_d), {}, {}, std::move(bem_space),
                    std::move(trace_space), {}, {}, {}};

    const int nel = static_cast<int>(mesh->num_elements());
    sys.elements.resize(nel);
    sys.outlines.resize(nel);
    std::vector<Eigen::MatrixXd> stiffness(nel);
    std::vector<Eigen::VectorXd> load(nel);
    std::vector<std::optional<std::string>> failure(nel);

    auto work = [&](int el) {
        try {
            const auto poly = mesh->element_polygon(el);
            sys.elements[el] = cvem::build_local_space(poly, k_o);
            sys.outlines[el] = outline(poly);
            stiffness[el] = cvem::local_stiffness(sys.elements[el]);
            load[el] = f ? cvem::local_load(sys.elements[el], f, options.load_quadrature)
                         : Eigen::VectorXd::Zero(sys.elements[el].num_dofs());
        } catch (const std::exception& e) {
            failure[el] = e.what();
        }
    };
    if (options.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (int el = 0; el < nel; ++el) work(el);
    } else {
        for (int el = 0; el < nel; ++el) work(el);
    }
    for (int el = 0; el < nel; ++el)
        if (failure[el]) throw Error("element " + std::to_string(el) + ": " + *failure[el]);

    // deterministic scatter in element order
    std::vector<Eigen::Triplet<double>> trip;
    sys.f = Eigen::VectorXd::Zero(sys.dofs.num_cvem);
    for (int el = 0; el < nel; ++el) {
        const auto& dofs = sys.dofs.element_dofs[el];
        const int n = static_cast<int>(dofs.size());
        for (int i = 0; i < n; ++i) {
            sys.f[dofs[i]] += load[el][i];
            for (int j = 0; j < n; ++j) trip.emplace_back(dofs[i], dofs[j], stiffness[el](i, j));
        }
    }
    sys.A.resize(sys.dofs.num_cvem, sys.dofs.num_cvem);
    sys.A.setFromTriplets(trip.begin(), trip.end());

    sys.boundary = bem::assemble_boundary_operators(sys.bem_space, sys.trace_space, k_d, options.singular, options.exec);
    return sys;
}

Eigen::VectorXd interpolate_global(const BlockSystem& system, const cvem::ScalarField& v, int quadrature_n)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(system.dofs.num_cvem);
    for (std::size_t el = 0; el < system.elements.size(); ++el) {
        const Eigen::VectorXd local = cvem::interpolate_dofs(system.elements[el], v, quadrature_n);
        const auto& dofs = system.dofs.element_dofs[el];
        for (std::size_t i = 0; i < dofs.size(); ++i) out[dofs[i]] = local[i];
    }
    return out;
}

ReducedSystem apply_dirichlet(const BlockSystem& system, const cvem::ScalarField& g)
{
    const auto& map = system.dofs;
    ReducedSystem r;
    r.g = Eigen::VectorXd::Zero(map.num_dirichlet());
    for (int d = 0; d < map.num_dirichlet(); ++d) r.g[d] = g ? g(map.position[map.dirichlet[d]]) : 0.0;

    const int ni = map.num_interior();
    const int ng = map.num_gamma();
    std::vector<Eigen::Triplet<double>> ii, ig, gi, gg;
    r.f_I = Eigen::VectorXd::Zero(ni);
    r.f_G = Eigen::VectorXd::Zero(ng);
    for (int i = 0; i < ni; ++i) r.f_I[i] = system.f[map.interior[i]];
    for (int j = 0; j < ng; ++j) r.f_G[j] = system.f[map.gamma[j]];

    for (int col = 0; col < system.A.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            const DofRole rr = map.role[row];
            const DofRole cr = map.role[col];
            if (rr == DofRole::Dirichlet) continue;
            const int bi = map.block_index[row];
            const int bj = map.block_index[col];
            if (cr == DofRole::Dirichlet) {
                (rr == DofRole::Interior ? r.f_I : r.f_G)[bi] -= it.value() * r.g[bj];
            } else if (rr == DofRole::Interior) {
                (cr == DofRole::Interior ? ii : ig).emplace_back(bi, bj, it.value());
            } else {
                (cr == DofRole::Interior ? gi : gg).emplace_back(bi, bj, it.value());
            }
        }
    }
    auto build = [](Eigen::SparseMatrix<double>& m, int rows, int cols, const auto& t) {
        m.resize(rows, cols);
        m.setFromTriplets(t.begin(), t.end());
    };
    build(r.A_II, ni, ni, ii);
    build(r.A_IG, ni, ng, ig);
    build(r.A_GI, ng, ni, gi);
    build(r.A_GG, ng, ng, gg);
    return r;
}

} // namespace cvembem::solver
