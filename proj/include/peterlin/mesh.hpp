#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "peterlin/tensor.hpp"

namespace peterlin {

/// Conforming triangulation of the closed unit square. Immutable after
/// construction; all queries are safe to call concurrently.
class TriMesh {
public:
    struct Location {
        int tri = -1;
        std::array<double, 3> bary{};
    };

    /// Uniform Friedrichs-Keller grid: n x n cells, each split along the
    /// diagonal from lower-left to upper-right. Throws on n < 1.
    static TriMesh structured(int n);

    /// Plain-text interchange format: "nv nt", nv lines "x y", nt lines
    /// "i j k" (0-based). Validates orientation and edge conformity.
    static TriMesh read(std::istream& in);
    void write(std::ostream& out) const;

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(tris_.size()); }
    Vec2 vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& tri(int t) const { return tris_[t]; }
    bool boundary_vertex(int v) const { return boundary_[v]; }
    double area(int t) const { return area_[t]; }
    double diameter(int t) const { return diam_[t]; }          // h_K
    double max_diameter() const { return h_; }                 // h
    /// Division count when built by structured(), 0 otherwise.
    int structured_n() const { return structured_n_; }

    std::array<Vec2, 3> tri_vertices(int t) const {
        return {vertices_[tris_[t][0]], vertices_[tris_[t][1]], vertices_[tris_[t][2]]};
    }

    std::array<double, 3> barycentric(int t, Vec2 p) const;

    /// Point of the closed triangle hull from barycentric coordinates.
    Vec2 point_from_bary(int t, const std::array<double, 3>& bary) const;

    /// Containing triangle and barycentric coordinates. Points within 1e-10
    /// outside the unit square are snapped to the boundary; farther ones
    /// throw ("point outside domain"). Structured meshes use O(1) index
    /// arithmetic, others a walking search seeded at `hint`.
    Location locate(Vec2 p, int hint = -1) const;

private:
    TriMesh() = default;
    void finalize();  // areas, diameters, boundary flags, adjacency

    Location locate_structured(Vec2 p) const;
    Location locate_walk(Vec2 p, int hint) const;

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<std::array<int, 3>> neighbor_;  // across edge opposite local vertex k; -1 on boundary
    std::vector<bool> boundary_;
    std::vector<double> area_;
    std::vector<double> diam_;
    double h_ = 0.0;
    int structured_n_ = 0;
};

}  // namespace peterlin
