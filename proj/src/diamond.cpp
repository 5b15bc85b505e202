#include "sphfrieze/diamond.hpp"

#include <utility>

namespace sphf {

namespace {

Rat det_gauss(std::vector<std::vector<Rat>> m) {
    const int n = static_cast<int>(m.size());
    Rat det(1);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int row = col; row < n; ++row) {
            if (!m[row][col].is_zero()) {
                pivot = row;
                break;
            }
        }
        if (pivot < 0) return Rat(0);
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det = det * m[col][col];
        for (int row = col + 1; row < n; ++row) {
            if (m[row][col].is_zero()) continue;
            const Rat factor = m[row][col] / m[col][col];
            for (int k = col; k < n; ++k) m[row][k] = m[row][k] - factor * m[col][k];
        }
    }
    return det;
}

std::vector<std::vector<Rat>> bordered(const std::vector<std::vector<Rat>>& table, const Rat& K) {
    const int m = static_cast<int>(table.size());
    std::vector<std::vector<Rat>> b(m + 1, std::vector<Rat>(m + 1, Rat(1)));
    b[0][0] = K / Rat(2);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b[i + 1][j + 1] = table[i][j];
    return b;
}

std::vector<std::vector<Rat>> diamond_table(const CayleyMengerDiamond& d) {
    return {{Rat(0), d.b, d.e, d.a},
            {d.b, Rat(0), d.c, d.f},
            {d.e, d.c, Rat(0), d.d},
            {d.a, d.f, d.d, Rat(0)}};
}

Rat minor_det(const std::vector<std::vector<Rat>>& m, int drop_row, int drop_col) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<Rat>> sub;
    sub.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == drop_row) continue;
        std::vector<Rat> row;
        row.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
            if (j == drop_col) continue;
            row.push_back(m[i][j]);
        }
        sub.push_back(std::move(row));
    }
    return det_gauss(std::move(sub));
}

// Position of each diamond entry in the bordered 5x5 matrix.
std::pair<int, int> entry_position(PartialDir dir) {
    switch (dir) {
        case PartialDir::Left: return {1, 3};      // e = x13
        case PartialDir::Right: return {2, 4};     // f = x24
        case PartialDir::Up: return {1, 4};        // a = x14
        case PartialDir::Down: return {2, 3};      // c = x23
        case PartialDir::DiagUp: return {1, 2};    // b = x12
        case PartialDir::DiagDown: return {3, 4};  // d = x34
    }
    throw InputError("unknown partial direction");
}

bool corner_degenerate(const Rat& v, const Rat& K) {
    return v.is_zero() || (Rat(1) - K * v / Rat(4)).is_zero();
}

void require_interlock(bool ok, const char* what) {
    if (!ok) throw InterlockMismatch(what);
}

}  // namespace

Rat scm_det(const std::vector<std::vector<Rat>>& table, const Rat& K) {
    const int m = static_cast<int>(table.size());
    if (m < 3) throw InvalidMeasurementTable("table must be at least 3x3");
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(table[i].size()) != m)
            throw InvalidMeasurementTable("table must be square");
        if (!table[i][i].is_zero()) throw InvalidMeasurementTable("diagonal must vanish");
        for (int j = i + 1; j < m; ++j)
            if (table[i][j] != table[j][i]) throw InvalidMeasurementTable("table must be symmetric");
    }
    return det_gauss(bordered(table, K));
}

Rat scm_det(const CayleyMengerDiamond& d, const Rat& K) {
    return det_gauss(bordered(diamond_table(d), K));
}

Rat scm_partial(PartialDir dir, const CayleyMengerDiamond& d, const Rat& K) {
    const auto [i, j] = entry_position(dir);
    const auto m = bordered(diamond_table(d), K);
    const Rat cofactor = ((i + j) % 2 == 0 ? Rat(1) : Rat(-1)) * minor_det(m, i, j);
    // The matrix is symmetric, so the entry appears at (i,j) and (j,i).
    return Rat(2) * cofactor;
}

bool cm_check(const CayleyMengerDiamond& d, const Rat& K, const TolerancePolicy& policy) {
    return near_equal(scm_det(d, K), Rat(0), policy);
}

bool coherence_check(const CayleyMengerDiamond& x1, const CayleyMengerDiamond& x2,
                     const CayleyMengerDiamond& x3, const CayleyMengerDiamond& x4, const Rat& K,
                     const TolerancePolicy& policy) {
    require_interlock(x1.f == x2.c, "x1.f != x2.c");
    require_interlock(x1.f == x3.a, "x1.f != x3.a");
    require_interlock(x1.f == x4.e, "x1.f != x4.e");
    require_interlock(x1.a == x2.e, "x1.a != x2.e");
    require_interlock(x1.c == x3.e, "x1.c != x3.e");
    require_interlock(x2.f == x4.a, "x2.f != x4.a");
    require_interlock(x3.f == x4.c, "x3.f != x4.c");
    require_interlock(x1.b == x2.b, "x1.b != x2.b");
    require_interlock(x3.b == x4.b, "x3.b != x4.b");
    require_interlock(x1.d == x3.d, "x1.d != x3.d");
    require_interlock(x2.d == x4.d, "x2.d != x4.d");
    const Rat lhs = scm_partial(PartialDir::Left, x1, K) * scm_partial(PartialDir::Right, x4, K);
    const Rat rhs = scm_partial(PartialDir::Up, x2, K) * scm_partial(PartialDir::Down, x3, K);
    return near_equal(lhs, rhs, policy);
}

Rat coherence_solve(SolveSide side, const CayleyMengerDiamond& da, const CayleyMengerDiamond& db,
                    const CayleyMengerDiamond& dc, const Rat& K) {
    if (side == SolveSide::Right) {
        const CayleyMengerDiamond& x1 = da;
        const CayleyMengerDiamond& x2 = db;
        const CayleyMengerDiamond& x3 = dc;
        require_interlock(x1.f == x2.c, "x1.f != x2.c");
        require_interlock(x1.f == x3.a, "x1.f != x3.a");
        require_interlock(x1.a == x2.e, "x1.a != x2.e");
        require_interlock(x1.c == x3.e, "x1.c != x3.e");
        require_interlock(x1.b == x2.b, "x1.b != x2.b");
        require_interlock(x1.d == x3.d, "x1.d != x3.d");
        for (const CayleyMengerDiamond* d : {&x1, &x2, &x3})
            if (!cm_check(*d, K)) throw InvalidMeasurementTable("input is not cospherical");
        const Rat center = x1.f;
        if (corner_degenerate(center, K))
            throw CoherencePivotZero("shared center corner in {0, 4/K}");
        const Rat T = scm_partial(PartialDir::Left, x1, K);
        if (T.is_zero()) throw CoherencePivotZero("left partial of left diamond vanishes");
        const Rat rhs = scm_partial(PartialDir::Up, x2, K) * scm_partial(PartialDir::Down, x3, K);
        CayleyMengerDiamond x4{x2.f, x3.b, x3.f, x2.d, center, Rat(0)};
        // The determinant is quadratic in f with leading coefficient
        // -2 e (1 - K e / 4), so its f-partial is 2 A f + B.
        const Rat B = scm_partial(PartialDir::Right, x4, K);
        const Rat A = Rat(-2) * center * (Rat(1) - K * center / Rat(4));
        const Rat f = (rhs / T - B) / (Rat(2) * A);
        x4.f = f;
        if (!scm_det(x4, K).is_zero())
            throw ValidationFailure("solved diamond fails the cospherical determinant");
        return f;
    }
    const CayleyMengerDiamond& x2 = da;
    const CayleyMengerDiamond& x3 = db;
    const CayleyMengerDiamond& x4 = dc;
    require_interlock(x4.e == x2.c, "x4.e != x2.c");
    require_interlock(x4.e == x3.a, "x4.e != x3.a");
    require_interlock(x2.f == x4.a, "x2.f != x4.a");
    require_interlock(x3.f == x4.c, "x3.f != x4.c");
    require_interlock(x3.b == x4.b, "x3.b != x4.b");
    require_interlock(x2.d == x4.d, "x2.d != x4.d");
    for (const CayleyMengerDiamond* d : {&x2, &x3, &x4})
        if (!cm_check(*d, K)) throw InvalidMeasurementTable("input is not cospherical");
    const Rat center = x4.e;
    if (corner_degenerate(center, K))
        throw CoherencePivotZero("shared center corner in {0, 4/K}");
    const Rat T = scm_partial(PartialDir::Right, x4, K);
    if (T.is_zero()) throw CoherencePivotZero("right partial of right diamond vanishes");
    const Rat rhs = scm_partial(PartialDir::Up, x2, K) * scm_partial(PartialDir::Down, x3, K);
    CayleyMengerDiamond x1{x2.e, x2.b, x3.e, x3.d, Rat(0), center};
    const Rat B = scm_partial(PartialDir::Left, x1, K);
    const Rat A = Rat(-2) * center * (Rat(1) - K * center / Rat(4));
    const Rat e = (rhs / T - B) / (Rat(2) * A);
    x1.e = e;
    if (!scm_det(x1, K).is_zero())
        throw ValidationFailure("solved diamond fails the cospherical determinant");
    return e;
}

CayleyMengerDiamond restrict_to_cm(const HeronianDiamond<Rat>& d, const Rat& K) {
    if (!heronian_check(d, K).ok()) throw HeronViolation("input is not a Heronian diamond");
    const bool top_zero = d.a.is_zero() && d.q.is_zero() && d.r.is_zero();
    const bool bottom_zero = d.c.is_zero() && d.p.is_zero() && d.s.is_zero();
    const bool nondeg = !(corner_degenerate(d.e, K) && corner_degenerate(d.f, K));
    if (!top_zero && !bottom_zero && !nondeg)
        throw DegenerateDiagonal("both horizontal corners in {0, 4/K}");
    const CayleyMengerDiamond cm{d.a, d.b, d.c, d.d, d.e, d.f};
    if (!scm_det(cm, K).is_zero())
        throw ValidationFailure("corner table fails the cospherical determinant");
    const bool products_ok =
        scm_partial(PartialDir::Left, cm, K) == Rat(-2) * d.r * d.s &&
        scm_partial(PartialDir::Right, cm, K) == Rat(-2) * d.p * d.q &&
        scm_partial(PartialDir::DiagUp, cm, K) == Rat(2) * d.q * d.s &&
        scm_partial(PartialDir::DiagDown, cm, K) == Rat(2) * d.p * d.r &&
        scm_partial(PartialDir::Up, cm, K) == Rat(2) * d.p * d.s &&
        scm_partial(PartialDir::Down, cm, K) == Rat(2) * d.r * d.q;
    if (!products_ok) throw ValidationFailure("partial-derivative product identity fails");
    return cm;
}

HeronianDiamond<Rat> lift_to_heronian(const CayleyMengerDiamond& d, const Rat& K, int sign) {
    if (sign != 1 && sign != -1) throw InputError("sign must be +1 or -1");
    if (corner_degenerate(d.e, K) && corner_degenerate(d.f, K))
        throw DegenerateDiagonal("both horizontal corners in {0, 4/K}");
    const Rat hp = heron_K(d.b, d.c, d.e, K);
    const Rat hq = heron_K(d.a, d.d, d.e, K);
    const Rat hr = heron_K(d.a, d.b, d.f, K);
    const Rat hs = heron_K(d.c, d.d, d.f, K);
    if (hp.is_zero() || hq.is_zero() || hr.is_zero() || hs.is_zero())
        throw DegenerateDiagonal("a triangle value vanishes, lift is not unique up to sign");
    if (!scm_det(d, K).is_zero()) throw InvalidMeasurementTable("input is not cospherical");
    const auto root = sqrt_exact(hp);
    if (!root) throw ExactSqrtUnavailable("no exact square root for the seed midpoint");
    HeronianDiamond<Rat> out;
    out.a = d.a;
    out.b = d.b;
    out.c = d.c;
    out.d = d.d;
    out.e = d.e;
    out.f = d.f;
    out.p = sign > 0 ? *root : -*root;
    const Rat two_p = Rat(2) * out.p;
    out.q = -scm_partial(PartialDir::Right, d, K) / two_p;
    out.r = scm_partial(PartialDir::DiagDown, d, K) / two_p;
    out.s = scm_partial(PartialDir::Up, d, K) / two_p;
    if (!heronian_check(out, K).ok())
        throw ValidationFailure("lifted diamond fails the defining equations");
    return out;
}

}  // namespace sphf
