#pragma once

#include "cvembem/geometry/curve.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cvembem::geometry {

/// Γ₀ is the inner (Dirichlet) boundary, Γ the artificial outer boundary.
enum class BoundaryTag { None = 0, Inner = 1, Outer = 2 };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& name);

/// Edge of an element as seen along a counter-clockwise element loop.
/// Local coordinate xi runs over [-1, 1] from start to end.
struct EdgeGeometry {
    Point a;
    Point b;
    std::optional<ParametricArc> arc;

    bool curved() const { return arc.has_value(); }
    Point start() const { return a; }
    Point end() const { return b; }
    Point point(double xi) const;
    /// d point / d xi
    Point tangent(double xi) const;
    /// Unit normal to the right of the direction of travel.
    Point normal(double xi) const;
    double length() const;
};

/// Element boundary as a closed counter-clockwise loop of edges.
struct CurvedPolygon {
    std::vector<EdgeGeometry> edges;

    std::size_t size() const { return edges.size(); }
    const Point& vertex(std::size_t i) const { return edges[i].a; }
    int curved_edge_count() const;
};

struct MeshEdge {
    int v0 = -1;
    int v1 = -1;
    /// Curved edges follow the arc from t0 (at v0) to t1 (at v1).
    std::optional<ParametricArc> arc;
    BoundaryTag tag = BoundaryTag::None;
};

struct LoopEdge {
    int edge = -1;
    bool reversed = false;
};

struct MeshElement {
    std::vector<LoopEdge> loop;
};

/// One cell of the boundary partition, parametrized counter-clockwise.
struct BoundaryArc {
    ParametricArc arc;
    int element = -1;
    int edge = -1;
};

class CurvedMesh {
public:
    CurvedMesh(std::vector<Point> vertices, std::vector<MeshEdge> edges, std::vector<MeshElement> elements,
               std::vector<CurvePtr> curves);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<MeshEdge>& edges() const { return edges_; }
    const std::vector<MeshElement>& elements() const { return elements_; }
    /// Distinct curves referenced by curved edges, in first-use order.
    const std::vector<CurvePtr>& curves() const { return curves_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_elements() const { return elements_.size(); }

    EdgeGeometry edge_geometry(int edge, bool reversed) const;
    CurvedPolygon element_polygon(int element) const;
    bool has_tag(BoundaryTag tag) const;

    /// Maximum element diameter.
    double h_interior() const { return h_interior_; }
    /// Maximum arc length over Γ edges (0 if the mesh has no Γ).
    double h_boundary() const { return h_boundary_; }

private:
    std::vector<Point> vertices_;
    std::vector<MeshEdge> edges_;
    std::vector<MeshElement> elements_;
    std::vector<CurvePtr> curves_;
    double h_interior_ = 0.0;
    double h_boundary_ = 0.0;
};

/// Area centroid via the divergence theorem (16-point Gauss per curved edge).
Point polygon_centroid(const CurvedPolygon& polygon);

/// Diameter of a curved polygon, estimated as the maximum distance between
/// boundary samples (vertices plus 16 points per curved edge).
double polygon_diameter(const CurvedPolygon& polygon);

struct ShapeReport {
    bool star_shaped = true;
    double min_edge_ratio = 0.0;
    bool ok(double rho) const { return star_shaped && min_edge_ratio >= rho; }
};

/// Star-shapedness with respect to the centroid (sampled along every edge)
/// and the ratio min edge length / diameter.
ShapeReport check_shape(const CurvedPolygon& polygon);

CurvedMesh build_annulus_mesh(double r_in, double r_out, int n_r, int n_theta, int level);

/// Structured mesh between two closed counter-clockwise curves using the
/// blending x(s,θ) = (1-s) inner(θ) + s outer(θ). `radial_grading` > 1 makes
/// the radial spacing geometric (each layer `radial_grading` times thicker
/// than the previous one); 1 gives uniform spacing.
CurvedMesh build_ring_mesh(const CurvePtr& inner, const CurvePtr& outer, int n_r, int n_theta, int level,
                           double radial_grading = 1.0);

/// Ordered boundary partition of the edges carrying `tag`: counter-clockwise,
/// starting at the edge whose arc starts at parameter 0.
std::vector<BoundaryArc> extract_boundary_partition(const CurvedMesh& mesh, BoundaryTag tag);

void write_mesh(std::ostream& out, const CurvedMesh& mesh);
CurvedMesh read_mesh(std::istream& in);
void save_mesh(const std::string& path, const CurvedMesh& mesh);
CurvedMesh load_mesh(const std::string& path);

} // namespace cvembem::geometry
