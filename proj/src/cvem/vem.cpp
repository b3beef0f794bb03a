#include "cvembem/cvem/vem.hpp"
#include "cvembem/cvem/lagrange.hpp"

#include <cmath>

namespace cvembem::cvem {

ScaledMonomialBasis::ScaledMonomialBasis(Point center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree)
{
    for (int d = 0; d <= degree; ++d)
        for (int b = 0; b <= d; ++b) exps_.emplace_back(d - b, b);
}

Eigen::VectorXd ScaledMonomialBasis::values(const Point& x) const
{
    const double u = (x.x() - center_.x()) / scale_;
    const double v = (x.y() - center_.y()) / scale_;
    Eigen::VectorXd out(size());
    for (int i = 0; i < size(); ++i) out[i] = std::pow(u, exps_[i].first) * std::pow(v, exps_[i].second);
    return out;
}

Eigen::MatrixX2d ScaledMonomialBasis::gradients(const Point& x) const
{
    const double u = (x.x() - center_.x()) / scale_;
    const double v = (x.y() - center_.y()) / scale_;
    Eigen::MatrixX2d out(size(), 2);
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exps_[i];
        out(i, 0) = a == 0 ? 0.0 : a * std::pow(u, a - 1) * std::pow(v, b) / scale_;
        out(i, 1) = b == 0 ? 0.0 : b * std::pow(u, a) * std::pow(v, b - 1) / scale_;
    }
    return out;
}

std::vector<DofDescriptor> dof_layout(const geometry::CurvedPolygon& polygon, int k)
{
    if (k < 1 || k > max_order) throw std::invalid_argument("VEM order must be in [1, 5]");
    std::vector<DofDescriptor> dofs;
    const int nv = static_cast<int>(polygon.size());
    for (int i = 0; i < nv; ++i) dofs.push_back({DofKind::Vertex, i, -1, polygon.vertex(i)});
    const auto& nodes = trace_nodes(k);
    for (int e = 0; e < nv; ++e)
        for (int m = 0; m < k - 1; ++m) dofs.push_back({DofKind::Edge, e, m, polygon.edges[e].point(nodes[m + 1])});
    for (int a = 0; a < ScaledMonomialBasis::count(k - 2); ++a) dofs.push_back({DofKind::Moment, -1, a, Point::Zero()});
    return dofs;
}

LocalVemSpace make_local_space(const geometry::CurvedPolygon& polygon, int k)
{
    LocalVemSpace s;
    s.order = k;
    s.polygon = polygon;
    s.dofs = dof_layout(polygon, k);
    const Point c = geometry::polygon_centroid(polygon);
    const double h = geometry::polygon_diameter(polygon);
    s.basis = ScaledMonomialBasis(c, h, k);
    s.moments = quadrature::polygon_monomial_moments(polygon, 2 * k, c, h);
    s.area = s.moments(0, 0);
    for (const auto& e : polygon.edges) s.perimeter += e.length();
    if (!(s.area > 0.0)) throw Error("degenerate element (non-positive area)");
    return s;
}

std::vector<std::pair<int, double>> edge_trace(const LocalVemSpace& space, int edge, double xi)
{
    const int k = space.order;
    const int nv = space.num_vertices();
    const auto values = lagrange_values(trace_nodes(k), xi);
    std::vector<std::pair<int, double>> out;
    out.reserve(k + 1);
    out.emplace_back(edge, values[0]);
    for (int m = 0; m < k - 1; ++m) out.emplace_back(nv + edge * (k - 1) + m, values[m + 1]);
    out.emplace_back((edge + 1) % nv, values[k]);
    return out;
}

const Eigen::MatrixXd& compute_pi_nabla(LocalVemSpace& s)
{
    const int k = s.order;
    const int nk = s.basis.size();
    const int n = s.num_dofs();
    const double h = s.basis.scale();
    const auto& m = s.moments;
    const int nv = s.num_vertices();
    const int first_moment = nv + nv * (k - 1);

    s.grad_gram = Eigen::MatrixXd::Zero(nk, nk);
    for (int i = 1; i < nk; ++i) {
        const auto [ai, bi] = s.basis.exponents(i);
        for (int j = 1; j < nk; ++j) {
            const auto [aj, bj] = s.basis.exponents(j);
            double v = 0.0;
            if (ai > 0 && aj > 0) v += ai * aj * m(ai + aj - 2, bi + bj);
            if (bi > 0 && bj > 0) v += bi * bj * m(ai + aj, bi + bj - 2);
            s.grad_gram(i, j) = v / (h * h);
        }
    }
    s.G = s.grad_gram;
    s.B = Eigen::MatrixXd::Zero(nk, n);

    // interior term -∫Δm_i φ_ℓ, with Δm_(a,b) = (a(a-1) m_(a-2,b) + b(b-1) m_(a,b-2)) / h²
    for (int i = 1; i < nk; ++i) {
        const auto [a, b] = s.basis.exponents(i);
        if (a >= 2) s.B(i, first_moment + ScaledMonomialBasis::index(a - 2, b)) -= a * (a - 1) * s.area / (h * h);
        if (b >= 2) s.B(i, first_moment + ScaledMonomialBasis::index(a, b - 2)) -= b * (b - 1) * s.area / (h * h);
    }

    Eigen::RowVectorXd g0 = Eigen::RowVectorXd::Zero(nk);
    for (int e = 0; e < nv; ++e) {
        const auto& edge = s.polygon.edges[e];
        for (const auto& p : quadrature::edge_quadrature(edge, quadrature::edge_points_for_degree(edge, 2 * k))) {
            const Eigen::VectorXd mv = s.basis.values(p.x);
            const Eigen::VectorXd dn = s.basis.gradients(p.x) * p.normal;
            g0 += p.weight * mv.transpose();
            for (const auto& [l, phi] : edge_trace(s, e, p.xi)) {
                s.B(0, l) += p.weight * phi;
                for (int i = 1; i < nk; ++i) s.B(i, l) += p.weight * dn[i] * phi;
            }
        }
    }
    s.G.row(0) = g0 / s.perimeter;
    s.B.row(0) /= s.perimeter;

    s.D.resize(n, nk);
    for (int l = 0; l < n; ++l) {
        const auto& d = s.dofs[l];
        if (d.kind == DofKind::Moment) {
            const auto [a, b] = s.basis.exponents(d.node);
            for (int i = 0; i < nk; ++i) {
                const auto [ai, bi] = s.basis.exponents(i);
                s.D(l, i) = m(a + ai, b + bi) / s.area;
            }
        } else {
            s.D.row(l) = s.basis.values(d.position).transpose();
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(s.G);
    if (!(lu.rcond() > 1e-14)) throw Error("projector matrix G is singular (degenerate element)");
    s.pi_nabla_star = lu.solve(s.B);
    return s.pi_nabla_star;
}

const Eigen::MatrixXd& compute_pi0(LocalVemSpace& s)
{
    if (s.pi_nabla_star.size() == 0) compute_pi_nabla(s);
    const int k = s.order;
    const int nk = s.basis.size();
    const int nv = s.num_vertices();
    const int first_moment = nv + nv * (k - 1);
    const int low = ScaledMonomialBasis::count(k - 2);

    s.H.resize(nk, nk);
    for (int i = 0; i < nk; ++i) {
        const auto [ai, bi] = s.basis.exponents(i);
        for (int j = 0; j < nk; ++j) {
            const auto [aj, bj] = s.basis.exponents(j);
            s.H(i, j) = s.moments(ai + aj, bi + bj);
        }
    }
    // Π⁰ = Π∇ + H⁻¹ r, where r only differs from zero in the rows of degree <= k-2;
    // solving for the correction keeps polynomial reproduction at round-off level
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nk, s.num_dofs());
    r.topRows(low) = -(s.H * s.pi_nabla_star).topRows(low);
    for (int a = 0; a < low; ++a) r(a, first_moment + a) += s.area;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(s.H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) throw Error("mass matrix H is not positive definite");
    s.pi0_star = s.pi_nabla_star + ldlt.solve(r);
    return s.pi0_star;
}

LocalVemSpace build_local_space(const geometry::CurvedPolygon& polygon, int k)
{
    auto s = make_local_space(polygon, k);
    compute_pi_nabla(s);
    compute_pi0(s);
    return s;
}

Eigen::MatrixXd local_stiffness(const LocalVemSpace& s)
{
    const Eigen::MatrixXd consistency = s.pi_nabla_star.transpose() * s.grad_gram * s.pi_nabla_star;
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(s.num_dofs(), s.num_dofs()) - s.pi_nabla();
    Eigen::MatrixXd a = consistency + r.transpose() * r;
    return 0.5 * (a + a.transpose());
}

Eigen::VectorXd local_load(const LocalVemSpace& s, const ScalarField& f, int quadrature_n)
{
    const int k = s.order;
    const int n = s.num_dofs();
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
    const auto rule = quadrature::polygon_quadrature(s.polygon, quadrature_n);
    if (k == 1) {
        double total = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) total += rule.weights[q] * f(rule.nodes[q]);
        load.head(s.num_vertices()).setConstant(total / s.num_vertices());
        return load;
    }
    // Π⁰_{k-2} φ_ℓ only involves the moment DOFs: H_low c = |E| e_α
    const int low = ScaledMonomialBasis::count(k - 2);
    Eigen::VectorXd fm = Eigen::VectorXd::Zero(low);
    for (std::size_t q = 0; q < rule.size(); ++q) fm += rule.weights[q] * f(rule.nodes[q]) * s.basis.values(rule.nodes[q]).head(low);
    Eigen::MatrixXd h_low(low, low);
    for (int i = 0; i < low; ++i) {
        const auto [ai, bi] = s.basis.exponents(i);
        for (int j = 0; j < low; ++j) {
            const auto [aj, bj] = s.basis.exponents(j);
            h_low(i, j) = s.moments(ai + aj, bi + bj);
        }
    }
    load.tail(low) = s.area * h_low.ldlt().solve(fm);
    return load;
}

Eigen::VectorXd interpolate_dofs(const LocalVemSpace& s, const ScalarField& v, int quadrature_n)
{
    const int n = s.num_dofs();
    Eigen::VectorXd out(n);
    const int low = ScaledMonomialBasis::count(s.order - 2);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(low);
    if (low > 0) {
        const auto rule = quadrature::polygon_quadrature(s.polygon, quadrature_n);
        for (std::size_t q = 0; q < rule.size(); ++q)
            mom += rule.weights[q] * v(rule.nodes[q]) * s.basis.values(rule.nodes[q]).head(low);
    }
    for (int l = 0; l < n; ++l) {
        const auto& d = s.dofs[l];
        out[l] = d.kind == DofKind::Moment ? mom[d.node] / s.area : v(d.position);
    }
    return out;
}

} // namespace cvembem::cvem
