#include "peterlin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace peterlin {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kSnapTol = 1e-10;
constexpr double kBaryTol = 1e-13;

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

TriMesh TriMesh::structured(int n) {
    if (n < 1) throw std::invalid_argument("structured mesh requires n >= 1");
    TriMesh m;
    m.structured_n_ = n;
    const int nv = (n + 1) * (n + 1);
    m.vertices_.reserve(nv);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

    m.tris_.reserve(2 * n * n);
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // diagonal from lower-left to upper-right, both triangles CCW
            m.tris_.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            m.tris_.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    m.finalize();
    return m;
}

TriMesh TriMesh::read(std::istream& in) {
    TriMesh m;
    int nv = 0, nt = 0;
    if (!(in >> nv >> nt) || nv < 3 || nt < 1) throw std::runtime_error("mesh file: bad header");
    m.vertices_.resize(nv);
    for (int v = 0; v < nv; ++v)
        if (!(in >> m.vertices_[v].x >> m.vertices_[v].y))
            throw std::runtime_error("mesh file: bad vertex record " + std::to_string(v));
    m.tris_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        auto& tri = m.tris_[t];
        if (!(in >> tri[0] >> tri[1] >> tri[2]))
            throw std::runtime_error("mesh file: bad triangle record " + std::to_string(t));
        for (int k : tri)
            if (k < 0 || k >= nv) throw std::runtime_error("mesh file: vertex index out of range");
    }
    m.finalize();
    return m;
}

void TriMesh::write(std::ostream& out) const {
    out << n_vertices() << ' ' << n_triangles() << '\n';
    out.precision(17);
    for (const auto& v : vertices_) out << v.x << ' ' << v.y << '\n';
    for (const auto& t : tris_) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void TriMesh::finalize() {
    const int nt = n_triangles();
    area_.resize(nt);
    diam_.resize(nt);
    h_ = 0.0;
    for (int t = 0; t < nt; ++t) {
        auto [a, b, c] = tri_vertices(t);
        const double signed2 = (b - a).cross(c - a);
        if (signed2 <= 0.0) throw std::runtime_error("triangle " + std::to_string(t) + " not CCW / degenerate");
        area_[t] = 0.5 * signed2;
        diam_[t] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        h_ = std::max(h_, diam_[t]);
    }

    boundary_.assign(n_vertices(), false);
    for (int v = 0; v < n_vertices(); ++v) {
        const Vec2 p = vertices_[v];
        boundary_[v] = std::abs(p.x) <= kBoundaryTol || std::abs(p.x - 1.0) <= kBoundaryTol ||
                       std::abs(p.y) <= kBoundaryTol || std::abs(p.y - 1.0) <= kBoundaryTol;
    }

    // edge -> incident triangles; each interior edge must be shared exactly twice
    neighbor_.assign(nt, {-1, -1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // edge -> (tri, local opposite vertex)
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int u = tris_[t][(k + 1) % 3];
            int w = tris_[t][(k + 2) % 3];
            auto key = std::minmax(u, w);
            auto it = edges.find(key);
            if (it == edges.end()) {
                edges.emplace(key, std::make_pair(t, k));
            } else {
                if (it->second.first < 0) throw std::runtime_error("edge shared by more than 2 triangles");
                neighbor_[t][k] = it->second.first;
                neighbor_[it->second.first][it->second.second] = t;
                it->second.first = -1;
            }
        }
    }
}

std::array<double, 3> TriMesh::barycentric(int t, Vec2 p) const {
    auto [a, b, c] = tri_vertices(t);
    const double inv2a = 1.0 / (2.0 * area_[t]);
    return {(b - p).cross(c - p) * inv2a, (c - p).cross(a - p) * inv2a, (a - p).cross(b - p) * inv2a};
}

Vec2 TriMesh::point_from_bary(int t, const std::array<double, 3>& bary) const {
    auto [a, b, c] = tri_vertices(t);
    return a * bary[0] + b * bary[1] + c * bary[2];
}

TriMesh::Location TriMesh::locate(Vec2 p, int hint) const {
    if (p.x < -kSnapTol || p.x > 1.0 + kSnapTol || p.y < -kSnapTol || p.y > 1.0 + kSnapTol)
        throw std::runtime_error("point outside domain");
    p = {clamp01(p.x), clamp01(p.y)};
    return structured_n_ > 0 ? locate_structured(p) : locate_walk(p, hint);
}

TriMesh::Location TriMesh::locate_structured(Vec2 p) const {
    const int n = structured_n_;
    int i = std::min(static_cast<int>(p.x * n), n - 1);
    int j = std::min(static_cast<int>(p.y * n), n - 1);
    const double xi = p.x * n - i;
    const double eta = p.y * n - j;
    const int t = 2 * (j * n + i) + (xi >= eta ? 0 : 1);
    return {t, barycentric(t, p)};
}

TriMesh::Location TriMesh::locate_walk(Vec2 p, int hint) const {
    int t = (hint >= 0 && hint < n_triangles()) ? hint : 0;
    const int max_steps = 2 * n_triangles() + 4;
    for (int step = 0; step < max_steps; ++step) {
        auto bary = barycentric(t, p);
        int worst = 0;
        for (int k = 1; k < 3; ++k)
            if (bary[k] < bary[worst]) worst = k;
        if (bary[worst] >= -kBaryTol) return {t, bary};
        const int next = neighbor_[t][worst];
        if (next < 0) break;  // would leave through a boundary edge
        t = next;
    }
    // walking failed (non-convex numeric corner case); take the best triangle
    int best = -1;
    double best_min = -1e300;
    for (int c = 0; c < n_triangles(); ++c) {
        auto bary = barycentric(c, p);
        const double mn = std::min({bary[0], bary[1], bary[2]});
        if (mn > best_min) {
            best_min = mn;
            best = c;
        }
    }
    if (best < 0 || best_min < -kSnapTol) throw std::runtime_error("point outside domain");
    return {best, barycentric(best, p)};
}

}  // namespace peterlin
