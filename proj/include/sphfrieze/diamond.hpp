#pragma once

#include <array>
#include <vector>

#include "sphfrieze/errors.hpp"
#include "sphfrieze/rational.hpp"
#include "sphfrieze/scalar.hpp"

namespace sphf {

// H^K(a,b,c) = -a^2 - b^2 - c^2 + 2ab + 2ac + 2bc - K abc.
// For sides of a spherical triangle this is the square of the S^K value.
template <class S>
S heron_K(const S& a, const S& b, const S& c, const S& K) {
    return S(0) - a * a - b * b - c * c + S(2) * (a * b + a * c + b * c) - K * a * b * c;
}

// Corner layout: a top, c bottom, e left, f right; dashed lines b (through
// the lower-left, parallel to the NE edges) and d (lower-right, parallel to
// the SE edges); edge midpoints p (SW), q (NW), r (NE), s (SE).
template <class S>
struct HeronianDiamond {
    S a{0}, b{0}, c{0}, d{0}, e{0}, f{0}, p{0}, q{0}, r{0}, s{0};
};

// The six corner values of a Heronian diamond without its midpoints.
struct CayleyMengerDiamond {
    Rat a, b, c, d, e, f;

    friend bool operator==(const CayleyMengerDiamond&, const CayleyMengerDiamond&) = default;
};

struct PropagateOptions {
    bool skip_checks = false;
    TolerancePolicy policy{};
};

// Residuals of the seven defining equations, in order: the four Heron
// squares (p, q, r, s), the p+q midpoint relation, the diagonal product
// relation, and the r-s relation.
template <class S>
struct HeronianReport {
    std::array<S, 7> residuals{};

    bool ok(const TolerancePolicy& policy = {}) const {
        for (const S& r : residuals)
            if (!near_equal(r, S(0), policy)) return false;
        return true;
    }
};

template <class S>
HeronianReport<S> heronian_check(const HeronianDiamond<S>& d, const S& K) {
    HeronianReport<S> rep;
    const S half_K = K / S(2);
    rep.residuals[0] = d.p * d.p - heron_K(d.b, d.c, d.e, K);
    rep.residuals[1] = d.q * d.q - heron_K(d.a, d.d, d.e, K);
    rep.residuals[2] = d.r * d.r - heron_K(d.a, d.b, d.f, K);
    rep.residuals[3] = d.s * d.s - heron_K(d.c, d.d, d.f, K);
    rep.residuals[4] =
        d.p + d.q - d.r - d.s - half_K * (d.a * d.p + d.b * d.q - d.e * d.r);
    const S sides = d.a - d.b + d.c - d.d;
    rep.residuals[5] = S(4) * d.e * d.f * (S(1) - K * d.e / S(4)) -
                       ((d.p + d.q) * (d.p + d.q) + sides * sides -
                        K * d.e * (d.a - d.b) * (d.c - d.d));
    rep.residuals[6] = d.e * (d.r - d.s) - d.p * (d.a - d.d) - d.q * (d.b - d.c);
    return rep;
}

template <class S>
struct RightHalf {
    S f, r, s;
};

template <class S>
struct LeftHalf {
    S e, p, q;
};

// Complete a diamond to the right: from (a,b,c,d,e,p,q) produce (f,r,s).
// Requires e outside {0, 4/K} and the two left Heron equations.
template <class S>
RightHalf<S> propagate_lr(const S& a, const S& b, const S& c, const S& d, const S& e, const S& p,
                          const S& q, const S& K, const PropagateOptions& opts = {}) {
    const S unit_e = S(1) - K * e / S(4);
    if (scalar_is_zero(e) || scalar_is_zero(unit_e))
        throw DegenerateDiagonal("left corner in {0, 4/K}");
    if (!opts.skip_checks) {
        if (!near_equal(p * p, heron_K(b, c, e, K), opts.policy))
            throw HeronViolation("p^2 != H^K(b, c, e)");
        if (!near_equal(q * q, heron_K(a, d, e, K), opts.policy))
            throw HeronViolation("q^2 != H^K(a, d, e)");
    }
    const S sides = a - b + c - d;
    const S half_K = K / S(2);
    RightHalf<S> out{S(0), S(0), S(0)};
    out.f = ((p + q) * (p + q) + sides * sides - K * e * (a - b) * (c - d)) /
            (S(4) * e * unit_e);
    out.r = (p * (e + a - d - half_K * a * e) + q * (e - c + b - half_K * b * e)) /
            (S(2) * e * unit_e);
    out.s = (p * (e - a + d - half_K * d * e) + q * (e + c - b - half_K * c * e)) /
            (S(2) * e * unit_e);
    return out;
}

// Vertical reflection: always a diamond again.
template <class S>
HeronianDiamond<S> flip_vertical(const HeronianDiamond<S>& d) {
    return HeronianDiamond<S>{d.c, d.d, d.a, d.b, d.e, d.f, d.q, d.p, d.s, d.r};
}

// Horizontal reflection: a diamond again provided e avoids {0, 4/K}.
template <class S>
HeronianDiamond<S> flip_horizontal(const HeronianDiamond<S>& d, const S& K) {
    if (scalar_is_zero(d.e) || scalar_is_zero(S(1) - K * d.e / S(4)))
        throw DegenerateDiagonal("left corner in {0, 4/K}");
    return HeronianDiamond<S>{d.a, d.d, d.c, d.b, d.f, d.e, d.s, d.r, d.q, d.p};
}

// Complete a diamond to the left: from (a,b,c,d,f,r,s) produce (e,p,q) by
// running the rightward completion on the horizontally flipped inputs.
template <class S>
LeftHalf<S> propagate_rl(const S& a, const S& b, const S& c, const S& d, const S& f, const S& r,
                         const S& s, const S& K, const PropagateOptions& opts = {}) {
    RightHalf<S> flipped = propagate_lr<S>(a, d, c, b, f, s, r, K, opts);
    return LeftHalf<S>{flipped.f, flipped.s, flipped.r};
}

enum class DegeneratePattern {
    TopRowZero,     // a = q = r = 0; forces d = e, f = b, s = p
    BottomRowZero,  // c = p = s = 0; forces b = e, f = d, r = q
};

enum class Direction { LeftToRight, RightToLeft };

// Completion across a degenerate diamond (one corner on the zero boundary).
// TopRowZero LeftToRight reads (b,c,e,p); RightToLeft reads (c,d,f,s).
// BottomRowZero LeftToRight reads (a,d,e,q); RightToLeft reads (a,b,f,r).
// The remaining entries are forced; the single Heron constraint is checked.
template <class S>
HeronianDiamond<S> propagate_degenerate(DegeneratePattern pattern, Direction dir,
                                        const HeronianDiamond<S>& in, const S& K,
                                        const PropagateOptions& opts = {}) {
    HeronianDiamond<S> out;
    if (pattern == DegeneratePattern::TopRowZero) {
        if (dir == Direction::LeftToRight) {
            out = HeronianDiamond<S>{S(0), in.b, in.c, in.e, in.e, in.b, in.p, S(0), S(0), in.p};
        } else {
            out = HeronianDiamond<S>{S(0), in.f, in.c, in.d, in.d, in.f, in.s, S(0), S(0), in.s};
        }
        if (!opts.skip_checks &&
            !near_equal(out.p * out.p, heron_K(out.b, out.c, out.e, K), opts.policy))
            throw HeronViolation("p^2 != H^K(b, c, e) in degenerate completion");
    } else {
        if (dir == Direction::LeftToRight) {
            out = HeronianDiamond<S>{in.a, in.e, S(0), in.d, in.e, in.d, S(0), in.q, in.q, S(0)};
        } else {
            out = HeronianDiamond<S>{in.a, in.b, S(0), in.f, in.b, in.f, S(0), in.r, in.r, S(0)};
        }
        if (!opts.skip_checks &&
            !near_equal(out.q * out.q, heron_K(out.a, out.d, out.e, K), opts.policy))
            throw HeronViolation("q^2 != H^K(a, d, e) in degenerate completion");
    }
    return out;
}

// Determinant of the bordered matrix
//   [ K/2  1    1   ...  1   ]
//   [ 1    0   x12  ... x1m  ]
//   [ ...                    ]
//   [ 1   x1m  ...       0   ]
// for a symmetric zero-diagonal table of squared distances (m >= 3).
// Vanishes for m >= 4 cospherical point tables; for m = 3 it equals -H^K.
Rat scm_det(const std::vector<std::vector<Rat>>& table, const Rat& K);

// The bordered determinant of a Cayley-Menger diamond, point order
// (1,2,3,4) with x12=b, x13=e, x14=a, x23=c, x24=f, x34=d.
Rat scm_det(const CayleyMengerDiamond& d, const Rat& K);

enum class PartialDir { Left, Right, Up, Down, DiagUp, DiagDown };

// Partial derivative of the bordered determinant with respect to one entry
// (Left: e, Right: f, Up: a, Down: c, DiagUp: b, DiagDown: d), computed as
// twice the cofactor at the entry's position.
Rat scm_partial(PartialDir dir, const CayleyMengerDiamond& d, const Rat& K);

// True when the diamond's bordered determinant vanishes.
bool cm_check(const CayleyMengerDiamond& d, const Rat& K, const TolerancePolicy& policy = {});

// Four diamonds interlocking around a shared center (x1 left, x2 top,
// x3 bottom, x4 right). Shared entries are verified first; then the
// coherence products are compared.
bool coherence_check(const CayleyMengerDiamond& x1, const CayleyMengerDiamond& x2,
                     const CayleyMengerDiamond& x3, const CayleyMengerDiamond& x4, const Rat& K,
                     const TolerancePolicy& policy = {});

enum class SolveSide { Left, Right };

// Solve the coherence equation for the one missing corner: Right takes
// (x1, x2, x3) and returns the right corner of the right diamond; Left takes
// (x2, x3, x4) and returns the left corner of the left diamond. The solved
// diamond automatically has vanishing bordered determinant.
Rat coherence_solve(SolveSide side, const CayleyMengerDiamond& da, const CayleyMengerDiamond& db,
                    const CayleyMengerDiamond& dc, const Rat& K);

// Forget the midpoints of a valid Heronian diamond; asserts the determinant
// and all six partial-derivative product identities.
CayleyMengerDiamond restrict_to_cm(const HeronianDiamond<Rat>& d, const Rat& K);

// Reconstruct midpoints from a Cayley-Menger diamond. The sign picks which
// of the two opposite lifts to return.
HeronianDiamond<Rat> lift_to_heronian(const CayleyMengerDiamond& d, const Rat& K, int sign);

}  // namespace sphf
