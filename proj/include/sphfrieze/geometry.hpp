#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <type_traits>
#include <vector>

#include "sphfrieze/errors.hpp"
#include "sphfrieze/quadext.hpp"
#include "sphfrieze/rational.hpp"
#include "sphfrieze/scalar.hpp"

namespace sphf {

struct NotOnSphere : InputError {
    using InputError::InputError;
};

// Sphere of curvature K = 1/R^2 > 0. R2 is the exact squared radius; the
// radius itself is only materialized where absolute coordinates are needed.
struct SphereConfig {
    Rat K;
    Rat R2;

    static SphereConfig from_curvature(const Rat& curvature) {
        if (curvature.sign() <= 0)
            throw InputError("curvature must be positive, got " + curvature.str());
        return SphereConfig{curvature, Rat(1) / curvature};
    }
    static SphereConfig from_radius(const Rat& radius) {
        if (radius.sign() <= 0)
            throw InputError("radius must be positive, got " + radius.str());
        Rat r2 = radius * radius;
        return SphereConfig{Rat(1) / r2, r2};
    }

    std::optional<Rat> exact_radius() const { return sqrt_exact(R2); }

    friend bool operator==(const SphereConfig& a, const SphereConfig& b) {
        return a.K == b.K && a.R2 == b.R2;
    }
    friend bool operator!=(const SphereConfig& a, const SphereConfig& b) { return !(a == b); }
};

// Point on the sphere, stored in units of R: a coordinate triple q with
// |q|^2 = 1, representing the absolute point R*q. This keeps squared chordal
// distances and triangle volume measurements exact rationals even when R
// itself is irrational.
template <class S>
struct SpherePoint {
    S x{0}, y{0}, z{0};
    SphereConfig cfg;

    std::array<S, 3> unit() const { return {x, y, z}; }

    // Absolute coordinates R*q; requires the radius to be an exact rational.
    std::array<Rat, 3> absolute() const
        requires std::is_same_v<S, Rat>
    {
        auto radius = cfg.exact_radius();
        if (!radius)
            throw ExactSqrtUnavailable("absolute coordinates need a rational radius; R^2 = " +
                                       cfg.R2.str());
        return {x * *radius, y * *radius, z * *radius};
    }
};

template <class S>
SpherePoint<S> make_unit_point(S x, S y, S z, const SphereConfig& cfg) {
    if (x * x + y * y + z * z != S(1))
        throw NotOnSphere("unit coordinates do not lie on the unit sphere");
    return SpherePoint<S>{std::move(x), std::move(y), std::move(z), cfg};
}

inline SpherePoint<Rat> point_from_absolute(const Rat& X, const Rat& Y, const Rat& Z,
                                            const SphereConfig& cfg) {
    if (X * X + Y * Y + Z * Z != cfg.R2)
        throw NotOnSphere("coordinates are not at squared distance R^2 from the center");
    auto radius = cfg.exact_radius();
    if (!radius)
        throw ExactSqrtUnavailable(
            "absolute coordinates require a rational radius; R^2 = " + cfg.R2.str());
    return SpherePoint<Rat>{X / *radius, Y / *radius, Z / *radius, cfg};
}

namespace detail {

template <class S>
void require_same_sphere(const SpherePoint<S>& a, const SpherePoint<S>& b) {
    if (a.cfg != b.cfg) throw ConfigMismatch("points live on different spheres");
}

template <class S>
S dot(const SpherePoint<S>& a, const SpherePoint<S>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class S>
std::array<S, 3> cross(const SpherePoint<S>& a, const SpherePoint<S>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace detail

// Squared chordal distance <AB, AB> = 2 R^2 (1 - <qA, qB>).
template <class S>
S sq_dist(const SpherePoint<S>& a, const SpherePoint<S>& b) {
    detail::require_same_sphere(a, b);
    return S(2) * S(a.cfg.R2) * (S(1) - detail::dot(a, b));
}

// Signed volume measurement: 12 V(O A1 A2 A3) / R = 2 R^2 det[qA qB qC].
template <class S>
S s_kappa(const SpherePoint<S>& a, const SpherePoint<S>& b, const SpherePoint<S>& c) {
    detail::require_same_sphere(a, b);
    detail::require_same_sphere(a, c);
    auto bc = detail::cross(b, c);
    S det = a.x * bc[0] + a.y * bc[1] + a.z * bc[2];
    return S(2) * S(a.cfg.R2) * det;
}

// Squared chord subtended by a geodesic arc of the given length (float model).
double chord_from_geodesic(double geodesic, double radius);
// Geodesic arc length subtending the given squared chord (float model).
double geodesic_from_chord(double chord, double radius);

// The unique point B with x(B, C) = a, x(A, B) = c and S^K(A, B, C) = p.
// Requires b = x(A, C) to avoid {0, 4/K} and p^2 = H^K(a, b, c).
template <class S>
SpherePoint<S> place_third_point(const SpherePoint<S>& A, const SpherePoint<S>& C, const S& a,
                                 const S& c, const S& p) {
    detail::require_same_sphere(A, C);
    const S K = S(A.cfg.K);
    const S b = sq_dist(A, C);
    const S four(4);
    if (scalar_is_zero(b) || scalar_is_zero(four - K * b))
        throw AntipodalOrCoincident("x(A, C) in {0, 4/K}: no unique third point");
    const S heron = S(-1) * (a * a) - b * b - c * c + S(2) * (a * b + a * c + b * c) - K * a * b * c;
    if (p * p != heron)
        throw HeronViolation("p^2 does not match the squared-side Heron value");

    // Solve <qA, w> = 1 - Kc/2, <qC, w> = 1 - Ka/2, det[qA, w, qC] = Kp/2
    // in the basis {qA, qC, qA x qC}. With t = <qA, qC>, the Gram factor
    // 1 - t^2 = Kb(1 - Kb/4) is nonzero by the precondition above.
    const S t = S(1) - K * b / S(2);
    const S gram = S(1) - t * t;
    const S rhs1 = S(1) - K * c / S(2);
    const S rhs2 = S(1) - K * a / S(2);
    const S rhs3 = K * p / S(2);
    const S alpha = (rhs1 - t * rhs2) / gram;
    const S beta = (rhs2 - t * rhs1) / gram;
    // det[qA, w, qC] = <w, qC x qA> = -<w, qA x qC>, so the component of w
    // along qA x qC is -rhs3 / gram.
    const S gamma = S(-1) * rhs3 / gram;
    auto axc = detail::cross(A, C);
    SpherePoint<S> B{alpha * A.x + beta * C.x + gamma * axc[0],
                     alpha * A.y + beta * C.y + gamma * axc[1],
                     alpha * A.z + beta * C.z + gamma * axc[2], A.cfg};
    if (B.x * B.x + B.y * B.y + B.z * B.z != S(1))
        throw ValidationFailure("solved point left the sphere");
    return B;
}

// Convex-position triangulation of an n-gon: n >= 3 vertices labeled 1..n,
// with n-3 pairwise noncrossing diagonals.
struct Triangulation {
    int n = 0;
    std::vector<std::pair<int, int>> diagonals;  // each stored with u < v

    Triangulation(int n_, std::vector<std::pair<int, int>> diagonals_);

    // The n-2 triangular faces, each an increasing vertex triple, sorted.
    std::vector<std::array<int, 3>> triangles() const;

    bool has_edge(int u, int v) const;  // side or diagonal
};

// Measurements attached to a triangulated polygon: squared distances on all
// sides and diagonals, and one S^K value per triangle, keyed by the ordered
// triple exactly as indexed by the producer.
struct MeasurementSet {
    Triangulation triangulation;
    SphereConfig cfg;
    std::map<std::pair<int, int>, Rat> edge_values;                // keys u < v
    std::map<std::tuple<int, int, int>, Rat> triangle_values;      // ordered keys

    MeasurementSet(Triangulation tri, SphereConfig cfg_,
                   std::map<std::pair<int, int>, Rat> edges,
                   std::map<std::tuple<int, int, int>, Rat> triangles);

    const Rat& edge(int u, int v) const;
    // S^K for (u, v, w) in this exact order, flipping the stored value's
    // sign by permutation parity when the key was recorded differently.
    Rat s_value(int u, int v, int w) const;
};

// Measurements of a point list under a triangulation, triangle values keyed
// by increasing triples.
MeasurementSet measure_polygon(const std::vector<SpherePoint<Rat>>& points,
                               const Triangulation& tri);

// Deterministic exact realization of a measurement set in the canonical
// gauge: first vertex of the first triangle at (0,0,R), second in the x-z
// plane with x >= 0, the rest by place_third_point. Coordinates live in a
// single quadratic extension of the rationals.
std::vector<SpherePoint<QuadExt>> realize_polygon(const MeasurementSet& m);

// Weierstrass-style rational parameterization of the unit sphere:
// q = (2u, 2v, u^2 + v^2 - 1) / (u^2 + v^2 + 1), scaled by R.
SpherePoint<Rat> point_from_uv(const Rat& u, const Rat& v, const SphereConfig& cfg);

// Seed-deterministic random rational point; works for any rational R^2.
SpherePoint<Rat> random_rational_sphere_point(std::uint64_t seed, const SphereConfig& cfg);

}  // namespace sphf
