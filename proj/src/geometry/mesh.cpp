#include "cvembem/geometry/mesh.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace cvembem::geometry {

std::string to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::Inner: return "inner";
    case BoundaryTag::Outer: return "outer";
    default: return "none";
    }
}

BoundaryTag boundary_tag_from_string(const std::string& name)
{
    if (name == "inner") return BoundaryTag::Inner;
    if (name == "outer") return BoundaryTag::Outer;
    if (name == "none") return BoundaryTag::None;
    throw std::invalid_argument("unknown boundary tag '" + name + "'");
}

Point EdgeGeometry::point(double xi) const
{
    if (arc) return arc->curve->point(arc->parameter(xi));
    return a + 0.5 * (xi + 1.0) * (b - a);
}

Point EdgeGeometry::tangent(double xi) const
{
    if (arc) return 0.5 * (arc->t1 - arc->t0) * arc->curve->derivative(arc->parameter(xi));
    return 0.5 * (b - a);
}

Point EdgeGeometry::normal(double xi) const
{
    const Point t = tangent(xi);
    return Point(t.y(), -t.x()) / t.norm();
}

double EdgeGeometry::length() const { return arc ? arc->length() : (b - a).norm(); }

int CurvedPolygon::curved_edge_count() const
{
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const EdgeGeometry& e) { return e.curved(); }));
}

Point polygon_centroid(const CurvedPolygon& polygon)
{
    const Point origin = polygon.vertex(0);
    double area = 0.0;
    Point first(0.0, 0.0);
    for (const auto& e : polygon.edges) {
        const auto& rule = quadrature::gauss_legendre(e.curved() ? 16 : 2);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = e.point(rule.nodes[q]) - origin;
            const Point t = e.tangent(rule.nodes[q]);
            const double w = rule.weights[q];
            // n ds = (t_y, -t_x) dxi
            area += w * x.x() * t.y();
            first.x() += w * 0.5 * x.x() * x.x() * t.y();
            first.y() -= w * 0.5 * x.y() * x.y() * t.x();
        }
    }
    if (!(area > 0.0)) throw Error("element has non-positive area (clockwise or degenerate loop)");
    return origin + first / area;
}

double polygon_diameter(const CurvedPolygon& polygon)
{
    std::vector<Point> samples;
    for (const auto& e : polygon.edges) {
        samples.push_back(e.start());
        if (e.curved()) {
            for (int k = 1; k < 16; ++k) samples.push_back(e.point(-1.0 + 2.0 * k / 16.0));
        }
    }
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) d = std::max(d, (samples[i] - samples[j]).norm());
    return d;
}

ShapeReport check_shape(const CurvedPolygon& polygon)
{
    ShapeReport report;
    const Point c = polygon_centroid(polygon);
    const double h = polygon_diameter(polygon);
    double min_len = std::numeric_limits<double>::infinity();
    for (const auto& e : polygon.edges) {
        min_len = std::min(min_len, e.length());
        for (int k = 0; k <= 16; ++k) {
            const double xi = -1.0 + 2.0 * k / 16.0;
            if (cross(e.point(xi) - c, e.tangent(xi)) <= 0.0) report.star_shaped = false;
        }
    }
    report.min_edge_ratio = min_len / h;
    return report;
}

CurvedMesh::CurvedMesh(std::vector<Point> vertices, std::vector<MeshEdge> edges, std::vector<MeshElement> elements,
                       std::vector<CurvePtr> curves)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), elements_(std::move(elements)),
      curves_(std::move(curves))
{
    for (const auto& e : edges_) {
        if (e.v0 < 0 || e.v1 < 0 || e.v0 >= static_cast<int>(vertices_.size()) ||
            e.v1 >= static_cast<int>(vertices_.size()))
            throw Error("edge references a missing vertex");
        if (e.tag == BoundaryTag::Outer) h_boundary_ = std::max(h_boundary_, edge_geometry(&e - edges_.data(), false).length());
    }
    for (std::size_t k = 0; k < elements_.size(); ++k) {
        const auto polygon = element_polygon(static_cast<int>(k));
        if (polygon.curved_edge_count() > 1) throw Error("element " + std::to_string(k) + " has more than one curved edge");
        h_interior_ = std::max(h_interior_, polygon_diameter(polygon));
    }
}

EdgeGeometry CurvedMesh::edge_geometry(int edge, bool reversed) const
{
    const auto& e = edges_.at(edge);
    EdgeGeometry g;
    g.a = vertices_[reversed ? e.v1 : e.v0];
    g.b = vertices_[reversed ? e.v0 : e.v1];
    if (e.arc) {
        g.arc = *e.arc;
        if (reversed) std::swap(g.arc->t0, g.arc->t1);
    }
    return g;
}

CurvedPolygon CurvedMesh::element_polygon(int element) const
{
    CurvedPolygon polygon;
    for (const auto& le : elements_.at(element).loop) polygon.edges.push_back(edge_geometry(le.edge, le.reversed));
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const auto& next = polygon.edges[(i + 1) % polygon.size()];
        if ((polygon.edges[i].end() - next.start()).norm() > 1e-9 * (1.0 + next.start().norm()))
            throw Error("element " + std::to_string(element) + " loop is not closed");
    }
    return polygon;
}

bool CurvedMesh::has_tag(BoundaryTag tag) const
{
    return std::any_of(edges_.begin(), edges_.end(), [tag](const MeshEdge& e) { return e.tag == tag; });
}

namespace {

void check_counts(int n_r, int n_theta, int level)
{
    if (n_r < 2 || n_theta < 2) throw std::invalid_argument("mesh counts n_r and n_theta must be >= 2");
    if (level < 0 || level > 12) throw std::invalid_argument("mesh level must be in [0, 12]");
}

template <class Position>
CurvedMesh structured_ring(const CurvePtr& inner, const CurvePtr& outer, int nr, int nt, Position&& position)
{
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(nr + 1) * nt);
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j < nt; ++j) vertices.push_back(position(i, j));

    auto vid = [nt](int i, int j) { return i * nt + (j % nt); };
    auto theta = [nt](int j) { return j == nt ? two_pi : two_pi * j / nt; };
    auto circ = [nt](int i, int j) { return i * nt + (j % nt); };
    auto radial = [nr, nt](int i, int j) { return (nr + 1) * nt + i * nt + (j % nt); };

    std::vector<MeshEdge> edges(static_cast<std::size_t>(nr + 1) * nt + static_cast<std::size_t>(nr) * nt);
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            auto& e = edges[circ(i, j)];
            e.v0 = vid(i, j);
            e.v1 = vid(i, j + 1);
            if (i == 0) {
                e.arc = ParametricArc{inner, theta(j), theta(j + 1)};
                e.tag = BoundaryTag::Inner;
            } else if (i == nr) {
                e.arc = ParametricArc{outer, theta(j), theta(j + 1)};
                e.tag = BoundaryTag::Outer;
            }
        }
    }
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            auto& e = edges[radial(i, j)];
            e.v0 = vid(i, j);
            e.v1 = vid(i + 1, j);
        }
    }

    std::vector<MeshElement> elements;
    elements.reserve(static_cast<std::size_t>(nr) * nt);
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            MeshElement el;
            el.loop = {{radial(i, j), false}, {circ(i + 1, j), false}, {radial(i, j + 1), true}, {circ(i, j), true}};
            elements.push_back(std::move(el));
        }
    }
    std::vector<CurvePtr> curves{inner};
    if (outer != inner) curves.push_back(outer);
    return CurvedMesh(std::move(vertices), std::move(edges), std::move(elements), std::move(curves));
}

} // namespace

CurvedMesh build_annulus_mesh(double r_in, double r_out, int n_r, int n_theta, int level)
{
    check_counts(n_r, n_theta, level);
    if (!(r_in > 0.0) || !(r_out > r_in)) throw std::invalid_argument("annulus requires r_out > r_in > 0");
    const int nr = n_r << level;
    const int nt = n_theta << level;
    auto inner = make_circle(r_in);
    auto outer = make_circle(r_out);
    return structured_ring(inner, outer, nr, nt, [&](int i, int j) {
        const double r = r_in + (r_out - r_in) * i / nr;
        const double t = two_pi * j / nt;
        return Point(r * std::cos(t), r * std::sin(t));
    });
}

CurvedMesh build_ring_mesh(const CurvePtr& inner, const CurvePtr& outer, int n_r, int n_theta, int level,
                           double radial_grading)
{
    check_counts(n_r, n_theta, level);
    if (!inner || !outer) throw std::invalid_argument("ring mesh needs two curves");
    if (!(radial_grading > 0.0)) throw std::invalid_argument("radial grading must be positive");
    const int nr = n_r << level;
    const int nt = n_theta << level;

    // Nested refinement: the per-layer ratio at level L is grading^(2^-L).
    const double g = std::pow(radial_grading, 1.0 / static_cast<double>(1 << level));
    std::vector<double> s(nr + 1);
    for (int i = 0; i <= nr; ++i)
        s[i] = std::abs(g - 1.0) < 1e-14 ? static_cast<double>(i) / nr : (std::pow(g, i) - 1.0) / (std::pow(g, nr) - 1.0);
    s[nr] = 1.0;

    auto blend = [&](double si, double t) { return Point((1.0 - si) * inner->point(t) + si * outer->point(t)); };
    auto jacobian = [&](double si, double t) {
        const Point ds = outer->point(t) - inner->point(t);
        const Point dt = (1.0 - si) * inner->derivative(t) + si * outer->derivative(t);
        return cross(ds, dt);
    };
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            for (int a = 0; a < 10; ++a) {
                for (int b = 0; b < 10; ++b) {
                    const double si = s[i] + (s[i + 1] - s[i]) * (a + 0.5) / 10.0;
                    const double t = two_pi * (j + (b + 0.5) / 10.0) / nt;
                    if (!(jacobian(si, t) > 0.0))
                        throw Error("blending map between the boundary curves is not injective (element " +
                                    std::to_string(i * nt + j) + ")");
                }
            }
        }
    }
    return structured_ring(inner, outer, nr, nt, [&](int i, int j) {
        if (i == 0) return inner->point(two_pi * j / nt);
        if (i == nr) return outer->point(two_pi * j / nt);
        return blend(s[i], two_pi * j / nt);
    });
}

std::vector<BoundaryArc> extract_boundary_partition(const CurvedMesh& mesh, BoundaryTag tag)
{
    std::vector<int> owner(mesh.num_edges(), -1);
    for (std::size_t k = 0; k < mesh.num_elements(); ++k)
        for (const auto& le : mesh.elements()[k].loop) owner[le.edge] = static_cast<int>(k);

    std::vector<BoundaryArc> arcs;
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[e];
        if (edge.tag != tag) continue;
        if (!edge.arc) throw Error("boundary edge " + std::to_string(e) + " has no parametrization");
        BoundaryArc b{*edge.arc, owner[e], static_cast<int>(e)};
        if (b.arc.t1 < b.arc.t0) std::swap(b.arc.t0, b.arc.t1);
        arcs.push_back(b);
    }
    if (arcs.empty()) throw Error("mesh has no edges tagged '" + to_string(tag) + "'");

    auto wrap = [](double t) {
        double w = std::fmod(t, two_pi);
        return w < 0.0 ? w + two_pi : w;
    };
    std::sort(arcs.begin(), arcs.end(),
              [&](const BoundaryArc& x, const BoundaryArc& y) { return wrap(x.arc.t0) < wrap(y.arc.t0); });

    const double tol = 1e-12 * two_pi;
    double total = 0.0;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const auto& cur = arcs[k];
        const auto& next = arcs[(k + 1) % arcs.size()];
        if (cur.arc.curve != next.arc.curve) throw Error("boundary edges lie on different curves");
        double gap = std::abs(wrap(cur.arc.t1) - wrap(next.arc.t0));
        gap = std::min(gap, two_pi - gap);
        if (gap > tol) throw Error("boundary edges do not form a single closed loop");
        total += cur.arc.t1 - cur.arc.t0;
    }
    if (std::abs(total - two_pi) > 1e-10) throw Error("boundary partition does not cover the curve exactly once");
    return arcs;
}

void write_mesh(std::ostream& out, const CurvedMesh& mesh)
{
    std::map<const ParametricCurve*, int> curve_id;
    for (std::size_t c = 0; c < mesh.curves().size(); ++c) curve_id[mesh.curves()[c].get()] = static_cast<int>(c);

    out << std::setprecision(17);
    out << "cvembem-mesh v1\n";
    out << "curves " << mesh.curves().size() << '\n';
    for (std::size_t c = 0; c < mesh.curves().size(); ++c) {
        out << c << ' ' << mesh.curves()[c]->kind();
        for (double p : mesh.curves()[c]->parameters()) out << ' ' << p;
        out << '\n';
    }
    out << "vertices " << mesh.num_vertices() << '\n';
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
    out << "edges " << mesh.num_edges() << '\n';
    for (const auto& e : mesh.edges()) {
        if (e.arc) {
            const auto it = curve_id.find(e.arc->curve.get());
            if (it == curve_id.end()) throw Error("curved edge references an unregistered curve");
            out << "C " << it->second << ' ' << e.arc->t0 << ' ' << e.arc->t1 << '\n';
        } else {
            const auto& a = mesh.vertices()[e.v0];
            const auto& b = mesh.vertices()[e.v1];
            out << "S " << a.x() << ' ' << a.y() << ' ' << b.x() << ' ' << b.y() << '\n';
        }
    }
    out << "elements " << mesh.num_elements() << '\n';
    for (const auto& el : mesh.elements()) {
        out << el.loop.size();
        for (const auto& le : el.loop) out << ' ' << le.edge << (le.reversed ? '-' : '+');
        out << '\n';
    }
    for (auto tag : {BoundaryTag::Inner, BoundaryTag::Outer}) {
        std::vector<std::size_t> ids;
        for (std::size_t e = 0; e < mesh.num_edges(); ++e)
            if (mesh.edges()[e].tag == tag) ids.push_back(e);
        out << "tag " << to_string(tag) << ' ' << ids.size();
        for (auto e : ids) out << ' ' << e;
        out << '\n';
    }
}

namespace {

void expect(std::istream& in, const std::string& word)
{
    std::string got;
    if (!(in >> got) || got != word) throw Error("mesh file: expected '" + word + "', got '" + got + "'");
}

} // namespace

CurvedMesh read_mesh(std::istream& in)
{
    std::string header;
    std::getline(in, header);
    if (header != "cvembem-mesh v1") throw Error("mesh file: bad header '" + header + "'");

    std::size_t n = 0;
    expect(in, "curves");
    in >> n;
    std::vector<CurvePtr> curves;
    std::string line;
    std::getline(in, line);
    for (std::size_t c = 0; c < n; ++c) {
        if (!std::getline(in, line)) throw Error("mesh file: truncated curve table");
        std::istringstream ls(line);
        int id = 0;
        std::string kind;
        ls >> id >> kind;
        std::vector<double> params;
        for (double p; ls >> p;) params.push_back(p);
        curves.push_back(make_curve(kind, params));
    }

    expect(in, "vertices");
    in >> n;
    std::vector<Point> vertices(n);
    std::map<std::pair<double, double>, int> by_coord;
    for (std::size_t i = 0; i < n; ++i) {
        in >> vertices[i].x() >> vertices[i].y();
        by_coord[{vertices[i].x(), vertices[i].y()}] = static_cast<int>(i);
    }
    if (!in) throw Error("mesh file: truncated vertex table");

    auto nearest = [&](const Point& p) {
        int best = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const double d = (vertices[i] - p).norm();
            if (d < dist) {
                dist = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0 || dist > 1e-9 * (1.0 + p.norm())) throw Error("mesh file: curved edge endpoint is not a vertex");
        return best;
    };
    auto exact = [&](double x, double y) {
        const auto it = by_coord.find({x, y});
        if (it == by_coord.end()) throw Error("mesh file: straight edge endpoint is not a vertex");
        return it->second;
    };

    expect(in, "edges");
    in >> n;
    std::vector<MeshEdge> edges(n);
    for (std::size_t e = 0; e < n; ++e) {
        std::string kind;
        in >> kind;
        if (kind == "S") {
            double x1, y1, x2, y2;
            in >> x1 >> y1 >> x2 >> y2;
            edges[e].v0 = exact(x1, y1);
            edges[e].v1 = exact(x2, y2);
        } else if (kind == "C") {
            std::size_t id;
            double t0, t1;
            in >> id >> t0 >> t1;
            if (id >= curves.size()) throw Error("mesh file: unknown curve id");
            edges[e].arc = ParametricArc{curves[id], t0, t1};
            edges[e].v0 = nearest(curves[id]->point(t0));
            edges[e].v1 = nearest(curves[id]->point(t1));
        } else {
            throw Error("mesh file: bad edge record '" + kind + "'");
        }
    }

    expect(in, "elements");
    in >> n;
    std::vector<MeshElement> elements(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t m = 0;
        in >> m;
        for (std::size_t i = 0; i < m; ++i) {
            std::string token;
            in >> token;
            if (token.size() < 2 || (token.back() != '+' && token.back() != '-'))
                throw Error("mesh file: bad loop entry '" + token + "'");
            const int edge = std::stoi(token.substr(0, token.size() - 1));
            if (edge < 0 || static_cast<std::size_t>(edge) >= edges.size()) throw Error("mesh file: loop edge out of range");
            elements[k].loop.push_back({edge, token.back() == '-'});
        }
    }

    for (std::string word; in >> word;) {
        if (word != "tag") throw Error("mesh file: unexpected '" + word + "'");
        std::string name;
        in >> name >> n;
        const auto tag = boundary_tag_from_string(name);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t e;
            in >> e;
            if (e >= edges.size()) throw Error("mesh file: tagged edge out of range");
            edges[e].tag = tag;
        }
    }
    if (in.bad()) throw Error("mesh file: read error");
    return CurvedMesh(std::move(vertices), std::move(edges), std::move(elements), std::move(curves));
}

void save_mesh(const std::string& path, const CurvedMesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
}

CurvedMesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_mesh(in);
}

} // namespace cvembem::geometry
