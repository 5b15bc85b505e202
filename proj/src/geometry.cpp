#include "sphfrieze/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>

namespace sphf {

double chord_from_geodesic(double geodesic, double radius) {
    if (radius <= 0) throw InputError("radius must be positive");
    if (geodesic < 0) throw InputError("geodesic distance must be nonnegative");
    return 2.0 * radius * radius * (1.0 - std::cos(geodesic / radius));
}

double geodesic_from_chord(double chord, double radius) {
    if (radius <= 0) throw InputError("radius must be positive");
    const double r2 = radius * radius;
    if (chord < 0 || chord > 4.0 * r2)
        throw MathError("squared chord outside [0, 4R^2]");
    double cosine = 1.0 - chord / (2.0 * r2);
    cosine = std::clamp(cosine, -1.0, 1.0);
    return radius * std::acos(cosine);
}

namespace {

bool diagonals_cross(std::pair<int, int> d1, std::pair<int, int> d2) {
    auto [a, b] = d1;
    auto [c, d] = d2;
    return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

int permutation_parity(std::array<int, 3> key, std::array<int, 3> target) {
    // Both triples contain the same three labels; count the transpositions
    // taking one ordering to the other.
    int swaps = 0;
    for (int i = 0; i < 3; ++i) {
        if (key[i] == target[i]) continue;
        for (int j = i + 1; j < 3; ++j) {
            if (key[j] == target[i]) {
                std::swap(key[i], key[j]);
                ++swaps;
                break;
            }
        }
    }
    return swaps % 2 == 0 ? 1 : -1;
}

}  // namespace

Triangulation::Triangulation(int n_, std::vector<std::pair<int, int>> diagonals_)
    : n(n_), diagonals(std::move(diagonals_)) {
    if (n < 3) throw MalformedTriangulation("polygon needs at least 3 vertices");
    for (auto& d : diagonals) {
        if (d.first > d.second) std::swap(d.first, d.second);
        if (d.first < 1 || d.second > n || d.first == d.second)
            throw MalformedTriangulation("diagonal endpoints out of range");
        int gap = d.second - d.first;
        if (gap == 1 || gap == n - 1)
            throw MalformedTriangulation("diagonal duplicates a polygon side");
    }
    std::sort(diagonals.begin(), diagonals.end());
    if (std::adjacent_find(diagonals.begin(), diagonals.end()) != diagonals.end())
        throw MalformedTriangulation("repeated diagonal");
    if (static_cast<int>(diagonals.size()) != n - 3)
        throw MalformedTriangulation("a triangulation of an n-gon has n-3 diagonals");
    for (std::size_t i = 0; i < diagonals.size(); ++i)
        for (std::size_t j = i + 1; j < diagonals.size(); ++j)
            if (diagonals_cross(diagonals[i], diagonals[j]))
                throw MalformedTriangulation("crossing diagonals");
}

bool Triangulation::has_edge(int u, int v) const {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    if (v - u == 1 || (u == 1 && v == n)) return true;
    return std::binary_search(diagonals.begin(), diagonals.end(), std::make_pair(u, v));
}

std::vector<std::array<int, 3>> Triangulation::triangles() const {
    // In a polygon triangulation every pairwise-connected vertex triple
    // bounds a face, and there are exactly n-2 of them.
    std::vector<std::array<int, 3>> out;
    std::vector<std::vector<int>> nbr(n + 1);
    auto connect = [&](int u, int v) {
        nbr[u].push_back(v);
        nbr[v].push_back(u);
    };
    for (int i = 1; i < n; ++i) connect(i, i + 1);
    if (n > 2) connect(1, n);
    for (auto& d : diagonals) connect(d.first, d.second);
    for (int u = 1; u <= n; ++u) {
        for (int v : nbr[u]) {
            if (v <= u) continue;
            for (int w : nbr[v]) {
                if (w <= v) continue;
                if (has_edge(u, w)) out.push_back({u, v, w});
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (static_cast<int>(out.size()) != n - 2)
        throw MalformedTriangulation("face count does not match a polygon triangulation");
    return out;
}

MeasurementSet::MeasurementSet(Triangulation tri, SphereConfig cfg_,
                               std::map<std::pair<int, int>, Rat> edges,
                               std::map<std::tuple<int, int, int>, Rat> triangles)
    : triangulation(std::move(tri)),
      cfg(std::move(cfg_)),
      edge_values(std::move(edges)),
      triangle_values(std::move(triangles)) {
    const int n = triangulation.n;
    for (int i = 1; i <= n; ++i) {
        int j = i == n ? 1 : i + 1;
        if (!edge_values.count({std::min(i, j), std::max(i, j)}))
            throw InvalidMeasurementTable("missing side value");
    }
    for (auto& d : triangulation.diagonals)
        if (!edge_values.count(d)) throw InvalidMeasurementTable("missing diagonal value");
    for (auto& t : triangulation.triangles()) {
        Rat s = s_value(t[0], t[1], t[2]);
        const Rat& a = edge(t[1], t[2]);
        const Rat& b = edge(t[0], t[2]);
        const Rat& c = edge(t[0], t[1]);
        Rat heron = -(a * a) - b * b - c * c + Rat(2) * (a * b + a * c + b * c) - cfg.K * a * b * c;
        if (s * s != heron)
            throw HeronViolation("triangle value breaks the Heron identity");
    }
}

const Rat& MeasurementSet::edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = edge_values.find({u, v});
    if (it == edge_values.end())
        throw InvalidMeasurementTable("edge value not recorded");
    return it->second;
}

Rat MeasurementSet::s_value(int u, int v, int w) const {
    if (auto it = triangle_values.find({u, v, w}); it != triangle_values.end())
        return it->second;
    std::array<int, 3> want{u, v, w};
    std::array<int, 3> sorted = want;
    std::sort(sorted.begin(), sorted.end());
    std::array<int, 3> perm = sorted;
    do {
        auto it = triangle_values.find({perm[0], perm[1], perm[2]});
        if (it != triangle_values.end())
            return Rat(permutation_parity(perm, want)) * it->second;
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw InvalidMeasurementTable("triangle value not recorded");
}

MeasurementSet measure_polygon(const std::vector<SpherePoint<Rat>>& points,
                               const Triangulation& tri) {
    const int n = tri.n;
    if (static_cast<int>(points.size()) != n)
        throw InputError("point count does not match the triangulation");
    for (const auto& p : points)
        if (p.cfg != points[0].cfg) throw ConfigMismatch("points live on different spheres");
    std::map<std::pair<int, int>, Rat> edges;
    auto record = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        edges.emplace(std::make_pair(u, v), sq_dist(points[u - 1], points[v - 1]));
    };
    for (int i = 1; i < n; ++i) record(i, i + 1);
    record(1, n);
    for (auto& d : tri.diagonals) record(d.first, d.second);
    std::map<std::tuple<int, int, int>, Rat> triangles;
    for (auto& t : tri.triangles())
        triangles.emplace(std::make_tuple(t[0], t[1], t[2]),
                          s_kappa(points[t[0] - 1], points[t[1] - 1], points[t[2] - 1]));
    return MeasurementSet(tri, points[0].cfg, std::move(edges), std::move(triangles));
}

std::vector<SpherePoint<QuadExt>> realize_polygon(const MeasurementSet& m) {
    const int n = m.triangulation.n;
    const SphereConfig& cfg = m.cfg;
    const Rat& K = cfg.K;
    auto triangles = m.triangulation.triangles();

    std::vector<SpherePoint<QuadExt>> pts(
        n, SpherePoint<QuadExt>{QuadExt(0), QuadExt(0), QuadExt(0), cfg});
    std::vector<bool> placed(n + 1, false);

    const auto& first = triangles.front();
    const int v1 = first[0], v2 = first[1], v3 = first[2];

    pts[v1 - 1] = SpherePoint<QuadExt>{QuadExt(0), QuadExt(0), QuadExt(1), cfg};
    placed[v1] = true;

    // Second vertex in the x-z plane with x >= 0: qz = 1 - K b / 2 and
    // qx = sqrt(1 - qz^2), which fixes the quadratic extension used by the
    // whole realization.
    {
        const Rat& b = m.edge(v1, v2);
        if (b.is_zero() || b == Rat(4) * cfg.R2)
            throw AntipodalOrCoincident("first side length in {0, 4/K}");
        Rat qz = Rat(1) - K * b / Rat(2);
        Rat D = Rat(1) - qz * qz;
        if (D.sign() < 0)
            throw HeronViolation("side " + b.str() + " exceeds the sphere diameter");
        pts[v2 - 1] = SpherePoint<QuadExt>{QuadExt::root(D), QuadExt(0), QuadExt(qz), cfg};
        placed[v2] = true;
    }

    pts[v3 - 1] = place_third_point<QuadExt>(pts[v1 - 1], pts[v2 - 1], QuadExt(m.edge(v3, v2)),
                                             QuadExt(m.edge(v1, v3)),
                                             QuadExt(-m.s_value(v1, v2, v3)));
    placed[v3] = true;

    // Fill the remaining triangles off already-placed shared edges, in
    // sorted triangle order for determinism.
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto& t : triangles) {
            int missing = 0, have1 = 0, have2 = 0;
            int count = 0;
            for (int v : t)
                if (placed[v]) ++count;
            if (count != 2) continue;
            for (int v : t) {
                if (!placed[v])
                    missing = v;
                else if (have1 == 0)
                    have1 = v;
                else
                    have2 = v;
            }
            // S(have1, missing, have2) determines the side of the placed
            // edge the new vertex lands on.
            pts[missing - 1] = place_third_point<QuadExt>(
                pts[have1 - 1], pts[have2 - 1], QuadExt(m.edge(missing, have2)),
                QuadExt(m.edge(have1, missing)), QuadExt(m.s_value(have1, missing, have2)));
            placed[missing] = true;
            progress = true;
        }
    }
    for (int v = 1; v <= n; ++v)
        if (!placed[v]) throw MalformedTriangulation("triangulation does not connect the polygon");

    // The realization is only accepted if it reproduces the inputs exactly.
    for (auto& [e, val] : m.edge_values)
        if (sq_dist(pts[e.first - 1], pts[e.second - 1]) != QuadExt(val))
            throw ValidationFailure("realized points break an edge measurement");
    for (auto& [key, val] : m.triangle_values) {
        auto [u, v, w] = key;
        if (s_kappa(pts[u - 1], pts[v - 1], pts[w - 1]) != QuadExt(val))
            throw ValidationFailure("realized points break a triangle measurement");
    }
    return pts;
}

SpherePoint<Rat> point_from_uv(const Rat& u, const Rat& v, const SphereConfig& cfg) {
    Rat norm = u * u + v * v + Rat(1);
    Rat qx = Rat(2) * u / norm;
    Rat qy = Rat(2) * v / norm;
    Rat qz = (u * u + v * v - Rat(1)) / norm;
    return make_unit_point(qx, qy, qz, cfg);
}

SpherePoint<Rat> random_rational_sphere_point(std::uint64_t seed, const SphereConfig& cfg) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-12, 12);
    std::uniform_int_distribution<long> den(1, 12);
    Rat u(num(rng), den(rng));
    Rat v(num(rng), den(rng));
    return point_from_uv(u, v, cfg);
}

}  // namespace sphf
