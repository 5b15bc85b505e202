#include "sphfrieze/frieze.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <utility>

#include "sphfrieze/errors.hpp"

namespace sphf {

namespace {

std::string half_str(long doubled) {
    if (doubled % 2 == 0) return std::to_string(doubled / 2);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", static_cast<double>(doubled) / 2.0);
    return buf;
}

long floor_div(long a, long b) {
    long quot = a / b;
    long rem = a % b;
    if (rem != 0 && ((rem < 0) != (b < 0))) --quot;
    return quot;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

// Residue of m in 1..n.
int residue1(long m, int n) {
    long r = m % n;
    if (r <= 0) r += n;
    return static_cast<int>(r);
}

}  // namespace

std::string FriezeIndex::str() const { return "(" + half_str(I) + ", " + half_str(J) + ")"; }

const FriezeValidationReport::Item& FriezeValidationReport::item(const std::string& name) const {
    for (const auto& it : items)
        if (it.name == name) return it;
    throw InputError("no validation item named " + name);
}

const Rat& Frieze::at(const FriezeIndex& idx) const {
    auto it = values.find(idx);
    if (it == values.end()) throw OutsideWindow("no stored value at " + idx.str());
    return it->second;
}

const Rat& Frieze::ne_line(long i) const {
    auto it = ne_lines.find(i);
    if (it == ne_lines.end()) throw OutsideWindow("no stored NE line " + std::to_string(i));
    return it->second;
}

const Rat& Frieze::se_line(long j) const {
    auto it = se_lines.find(j);
    if (it == se_lines.end()) throw OutsideWindow("no stored SE line " + std::to_string(j));
    return it->second;
}

Rat Frieze::resolve(const FriezeIndex& idx) const {
    auto it = values.find(idx);
    if (it != values.end()) return it->second;
    if (!validated_)
        throw OutsideWindow("index " + idx.str() +
                            " is not stored and the frieze is not validated for symmetry lookups");
    for (const FriezeIndex& base : {idx, glide_image(idx, n)}) {
        const long col = base.column();
        const long kmin = ceil_div(lo - col, n);
        const long kmax = floor_div(hi - col, n);
        for (long k = kmin; k <= kmax; ++k) {
            const FriezeIndex cand{base.I + 2 * k * n, base.J + 2 * k * n};
            auto hit = values.find(cand);
            if (hit != values.end()) return hit->second;
        }
    }
    throw OutsideWindow("index " + idx.str() + " cannot be reached from the stored window");
}

namespace {

Rat ne_value(const Frieze& f, long i) {
    auto it = f.ne_lines.find(i);
    return it != f.ne_lines.end() ? it->second : f.resolve(node_index(i, i + 1));
}

Rat se_value(const Frieze& f, long j) {
    auto it = f.se_lines.find(j);
    return it != f.se_lines.end() ? it->second : f.resolve(node_index(j, j + 1));
}

// Shared propagation engine. Values are seeded, then completion rules fire
// until a fixpoint: near-boundary line identities, diamond completions
// (Heronian) or coherent-block solves (Cayley-Menger). Every assignment is
// conflict-checked, so the fill order cannot change the result.
class StripBuilder {
  public:
    StripBuilder(FriezeKind kind, int n, Rat K, long wlo, long whi,
                 std::optional<std::uint64_t> shuffle = std::nullopt)
        : kind_(kind), n_(n), K_(std::move(K)), wlo_(wlo), whi_(whi), shuffle_(shuffle) {}

    void put(const FriezeIndex& idx, const Rat& v) {
        auto [it, inserted] = vals_.emplace(idx, v);
        if (inserted) {
            progress_ = true;
            return;
        }
        if (it->second != v) throw ValidationFailure("conflicting values at " + idx.str());
    }

    void put_ne(long i, const Rat& v) { put_line(ne_, i, v, "NE"); }
    void put_se(long j, const Rat& v) { put_line(se_, j, v, "SE"); }

    void seed_boundary() {
        for (long i = wlo_; i <= whi_; ++i) {
            put(node_index(i, i), Rat(0));
            put(node_index(i, i + n_), Rat(0));
            if (kind_ == FriezeKind::Heronian) {
                put(se_mid_index(i, i), Rat(0));
                put(se_mid_index(i, i + n_ - 1), Rat(0));
                put(ne_mid_index(i, i + 1), Rat(0));
                put(ne_mid_index(i, i + n_), Rat(0));
            }
        }
    }

    void run() {
        struct Op {
            bool sync;
            long i;
            long j;
        };
        std::vector<Op> ops;
        for (long i = wlo_; i <= whi_; ++i) ops.push_back({true, i, 0});
        if (kind_ == FriezeKind::Heronian) {
            for (long i = wlo_; i < whi_; ++i)
                for (int h = 1; h <= n_ - 1; ++h) ops.push_back({false, i, i + h});
        } else {
            for (long i = wlo_ + 1; i < whi_; ++i)
                for (int h = 2; h <= n_ - 2; ++h) ops.push_back({false, i, i + h});
        }
        std::uint64_t pass = 0;
        do {
            progress_ = false;
            if (shuffle_) {
                std::mt19937_64 rng(*shuffle_ + pass);
                std::shuffle(ops.begin(), ops.end(), rng);
            }
            ++pass;
            for (const Op& op : ops) {
                if (op.sync)
                    sync_column(op.i);
                else if (kind_ == FriezeKind::Heronian)
                    try_diamond(op.i, op.j);
                else
                    try_block(op.i, op.j);
            }
        } while (progress_);
    }

    // Every determined integer entry of height 2..n-2 must avoid {0, 4/K};
    // past such an entry the completion would not be unique.
    void check_interior_nonvanishing() const {
        for (const auto& [idx, v] : vals_) {
            if (!idx.is_node()) continue;
            const long h = (idx.J - idx.I) / 2;
            if (h >= 2 && h <= n_ - 2) require_propagable(v, idx);
        }
    }

    Frieze finish(long lo, long hi) const {
        Frieze f;
        f.kind = kind_;
        f.n = n_;
        f.K = K_;
        f.lo = lo;
        f.hi = hi;
        for (long i = lo; i <= hi; ++i) {
            for (long j = i; j <= i + n_; ++j) emit(f, node_index(i, j));
            if (kind_ == FriezeKind::Heronian) {
                for (long j = i + 1; j <= i + n_; ++j) emit(f, ne_mid_index(i, j));
                for (long j = i; j <= i + n_ - 1; ++j) emit(f, se_mid_index(i, j));
            }
        }
        for (long i = lo - 1; i <= hi; ++i) {
            auto it = ne_.find(i);
            if (it == ne_.end())
                throw ValidationFailure("propagation could not determine NE line " +
                                        std::to_string(i));
            f.ne_lines[i] = it->second;
        }
        for (long j = lo; j <= hi + n_ - 1; ++j) {
            auto it = se_.find(j);
            if (it == se_.end())
                throw ValidationFailure("propagation could not determine SE line " +
                                        std::to_string(j));
            f.se_lines[j] = it->second;
        }
        frieze_validate_or_throw(f);
        return f;
    }

  private:
    static void put_line(std::map<long, Rat>& m, long label, const Rat& v, const char* family) {
        auto [it, inserted] = m.emplace(label, v);
        if (inserted) return;
        if (it->second != v)
            throw ValidationFailure(std::string("conflicting values on ") + family + " line " +
                                    std::to_string(label));
    }

    const Rat* find(const FriezeIndex& idx) const {
        auto it = vals_.find(idx);
        return it == vals_.end() ? nullptr : &it->second;
    }
    const Rat* find_ne(long i) const {
        auto it = ne_.find(i);
        return it == ne_.end() ? nullptr : &it->second;
    }
    const Rat* find_se(long j) const {
        auto it = se_.find(j);
        return it == se_.end() ? nullptr : &it->second;
    }

    void require_propagable(const Rat& v, const FriezeIndex& where) const {
        if (v.is_zero() || (Rat(1) - K_ * v / Rat(4)).is_zero())
            throw DegenerateDiagonal("interior entry " + where.str() + " lies in {0, 4/K}");
    }

    void sync3(const FriezeIndex& node, long ne_label, long se_label) {
        const Rat* v = find(node);
        const Rat* a = find_ne(ne_label);
        const Rat* b = find_se(se_label);
        const Rat* known = v ? v : (a ? a : b);
        if (!known) return;
        const Rat val = *known;
        put(node, val);
        put_ne(ne_label, val);
        put_se(se_label, val);
    }

    void sync_column(long i) {
        sync3(node_index(i, i + 1), i, i);
        sync3(node_index(i, i + n_ - 1), i - 1, i + n_ - 1);
    }

    void store_all(long i, long j, const HeronianDiamond<Rat>& out) {
        put(node_index(i, j + 1), out.a);
        put_ne(i, out.b);
        put(node_index(i + 1, j), out.c);
        put_se(j, out.d);
        put(node_index(i, j), out.e);
        put(node_index(i + 1, j + 1), out.f);
        put(ne_mid_index(i, j), out.p);
        put(se_mid_index(i, j), out.q);
        put(ne_mid_index(i, j + 1), out.r);
        put(se_mid_index(i + 1, j), out.s);
    }

    void try_diamond(long i, long j) {
        const int h = static_cast<int>(j - i);
        const Rat* a = find(node_index(i, j + 1));
        const Rat* b = find_ne(i);
        const Rat* c = find(node_index(i + 1, j));
        const Rat* d = find_se(j);
        const Rat* e = find(node_index(i, j));
        const Rat* f = find(node_index(i + 1, j + 1));
        const Rat* p = find(ne_mid_index(i, j));
        const Rat* q = find(se_mid_index(i, j));
        const Rat* r = find(ne_mid_index(i, j + 1));
        const Rat* s = find(se_mid_index(i + 1, j));
        try {
            if (h == 1) {
                if (a && d && e && q && !(f && r)) {
                    HeronianDiamond<Rat> in;
                    in.a = *a;
                    in.d = *d;
                    in.e = *e;
                    in.q = *q;
                    store_all(i, j,
                              propagate_degenerate(DegeneratePattern::BottomRowZero,
                                                   Direction::LeftToRight, in, K_));
                }
                if (a && b && f && r && !(e && q)) {
                    HeronianDiamond<Rat> in;
                    in.a = *a;
                    in.b = *b;
                    in.f = *f;
                    in.r = *r;
                    store_all(i, j,
                              propagate_degenerate(DegeneratePattern::BottomRowZero,
                                                   Direction::RightToLeft, in, K_));
                }
            } else if (h == n_ - 1) {
                if (b && c && e && p && !(f && s)) {
                    HeronianDiamond<Rat> in;
                    in.b = *b;
                    in.c = *c;
                    in.e = *e;
                    in.p = *p;
                    store_all(i, j,
                              propagate_degenerate(DegeneratePattern::TopRowZero,
                                                   Direction::LeftToRight, in, K_));
                }
                if (c && d && f && s && !(e && p)) {
                    HeronianDiamond<Rat> in;
                    in.c = *c;
                    in.d = *d;
                    in.f = *f;
                    in.s = *s;
                    store_all(i, j,
                              propagate_degenerate(DegeneratePattern::TopRowZero,
                                                   Direction::RightToLeft, in, K_));
                }
            } else {
                if (a && b && c && d && e && p && q && !(f && r && s)) {
                    require_propagable(*e, node_index(i, j));
                    RightHalf<Rat> rh = propagate_lr(*a, *b, *c, *d, *e, *p, *q, K_);
                    put(node_index(i + 1, j + 1), rh.f);
                    put(ne_mid_index(i, j + 1), rh.r);
                    put(se_mid_index(i + 1, j), rh.s);
                }
                if (a && b && c && d && f && r && s && !(e && p && q)) {
                    require_propagable(*f, node_index(i + 1, j + 1));
                    LeftHalf<Rat> lh = propagate_rl(*a, *b, *c, *d, *f, *r, *s, K_);
                    put(node_index(i, j), lh.e);
                    put(ne_mid_index(i, j), lh.p);
                    put(se_mid_index(i, j), lh.q);
                }
            }
        } catch (const HeronViolation& ex) {
            throw HeronViolation(std::string(ex.what()) + " at diamond " +
                                 node_index(i, j).str());
        }
    }

    std::optional<CayleyMengerDiamond> cm_diamond(long i, long j) const {
        const Rat* a = find(node_index(i, j + 1));
        const Rat* b = find_ne(i);
        const Rat* c = find(node_index(i + 1, j));
        const Rat* d = find_se(j);
        const Rat* e = find(node_index(i, j));
        const Rat* f = find(node_index(i + 1, j + 1));
        if (!(a && b && c && d && e && f)) return std::nullopt;
        return CayleyMengerDiamond{*a, *b, *c, *d, *e, *f};
    }

    // Interlocking block centered on node (i, j): the three known diamonds
    // carry every entry of the fourth except its outermost corner.
    void try_block(long i, long j) {
        auto x1 = cm_diamond(i - 1, j - 1);
        auto x2 = cm_diamond(i - 1, j);
        auto x3 = cm_diamond(i, j - 1);
        auto x4 = cm_diamond(i, j);
        try {
            if (x1 && x2 && x3 && !find(node_index(i + 1, j + 1))) {
                put(node_index(i + 1, j + 1), coherence_solve(SolveSide::Right, *x1, *x2, *x3, K_));
            }
            if (x2 && x3 && x4 && !find(node_index(i - 1, j - 1))) {
                put(node_index(i - 1, j - 1), coherence_solve(SolveSide::Left, *x2, *x3, *x4, K_));
            }
        } catch (const CoherencePivotZero& ex) {
            throw CoherencePivotZero(std::string(ex.what()) + " at block centered " +
                                     node_index(i, j).str());
        } catch (const InvalidMeasurementTable& ex) {
            throw InvalidMeasurementTable(std::string(ex.what()) + " at block centered " +
                                          node_index(i, j).str());
        }
    }

    void emit(Frieze& f, const FriezeIndex& idx) const {
        auto it = vals_.find(idx);
        if (it == vals_.end())
            throw ValidationFailure("propagation could not determine " + idx.str());
        f.values[idx] = it->second;
    }

    FriezeKind kind_;
    int n_;
    Rat K_;
    long wlo_;
    long whi_;
    std::optional<std::uint64_t> shuffle_;
    std::map<FriezeIndex, Rat> vals_;
    std::map<long, Rat> ne_, se_;
    bool progress_ = false;
};

struct DecodedPath {
    long start_col = 0;
    std::vector<FriezeIndex> ints;  // the n-1 integer nodes in order
    std::vector<bool> nw;           // n-2 steps, true = NW, false = NE
};

DecodedPath decode_path(const TraversingPath& path, int n, bool expect_mids) {
    if (n < 4) throw InputError("frieze order must be at least 4");
    const size_t expect = expect_mids ? static_cast<size_t>(2 * n - 3)
                                      : static_cast<size_t>(n - 1);
    if (path.elements.size() != expect)
        throw MalformedPath("path must list " + std::to_string(expect) + " elements, got " +
                            std::to_string(path.elements.size()));
    const FriezeIndex first = path.elements.front().idx;
    if (!first.is_node() || first.J - first.I != 2)
        throw MalformedPath("path must start at a height-1 node (k, k+1), got " + first.str());

    DecodedPath out;
    out.start_col = first.I / 2;
    out.ints.push_back(first);
    std::set<long> need_ne, need_se;
    FriezeIndex cur = first;
    size_t pos = 1;
    while (pos < path.elements.size()) {
        bool nw = false;
        if (expect_mids) {
            const FriezeIndex mid = path.elements[pos].idx;
            if (mid == FriezeIndex{cur.I, cur.J + 1})
                nw = false;
            else if (mid == FriezeIndex{cur.I - 1, cur.J})
                nw = true;
            else
                throw MalformedPath("unexpected midpoint " + mid.str() + " after node " +
                                    cur.str());
            ++pos;
            if (pos >= path.elements.size()) throw MalformedPath("path ends on a midpoint");
        }
        const FriezeIndex nxt = path.elements[pos].idx;
        FriezeIndex want = FriezeIndex{cur.I, cur.J + 2};
        if (expect_mids)
            want = nw ? FriezeIndex{cur.I - 2, cur.J} : FriezeIndex{cur.I, cur.J + 2};
        else if (nxt == FriezeIndex{cur.I - 2, cur.J})
            want = nxt, nw = true;
        if (nxt != want)
            throw MalformedPath("unexpected node " + nxt.str() + " after " + cur.str());
        if (nw)
            need_ne.insert(cur.I / 2 - 1);
        else
            need_se.insert(cur.J / 2);
        out.nw.push_back(nw);
        cur = nxt;
        out.ints.push_back(cur);
        ++pos;
    }

    std::set<long> got_ne, got_se;
    for (const auto& [label, v] : path.ne_lines) got_ne.insert(label);
    for (const auto& [label, v] : path.se_lines) got_se.insert(label);
    if (got_ne != need_ne || got_se != need_se)
        throw MalformedPath("crossed line labels do not match the path steps");
    return out;
}

void require_nondegenerate_value(const PathElement& el, const Rat& K) {
    if (el.value.is_zero() || (Rat(1) - K * el.value / Rat(4)).is_zero())
        throw DegenerateDiagonal("path node " + el.idx.str() + " lies in {0, 4/K}");
}

}  // namespace

Frieze frieze_from_polygon(const std::vector<SpherePoint<Rat>>& points, FriezeKind kind, long lo,
                           long hi) {
    const int n = static_cast<int>(points.size());
    if (n < 4) throw InputError("a frieze needs a polygon with at least 4 vertices");
    if (lo > hi) throw InputError("window lower bound exceeds upper bound");
    for (const auto& pt : points) detail::require_same_sphere(points.front(), pt);

    const auto P = [&](long m) -> const SpherePoint<Rat>& { return points[residue1(m, n) - 1]; };
    const auto X = [&](long u, long v) { return sq_dist(P(u), P(v)); };
    const auto S3 = [&](long u, long v, long w) { return s_kappa(P(u), P(v), P(w)); };

    Frieze f;
    f.kind = kind;
    f.n = n;
    f.K = points.front().cfg.K;
    f.lo = lo;
    f.hi = hi;
    for (long i = lo; i <= hi; ++i) {
        for (long j = i; j <= i + n; ++j) f.values[node_index(i, j)] = X(i, j);
        if (kind == FriezeKind::Heronian) {
            for (long j = i + 1; j <= i + n; ++j) f.values[ne_mid_index(i, j)] = S3(i, i + 1, j);
            for (long j = i; j <= i + n - 1; ++j) f.values[se_mid_index(i, j)] = S3(i, j, j + 1);
        }
    }
    for (long i = lo - 1; i <= hi; ++i) f.ne_lines[i] = X(i, i + 1);
    for (long j = lo; j <= hi + n - 1; ++j) f.se_lines[j] = X(j, j + 1);
    frieze_validate_or_throw(f);
    return f;
}

Frieze frieze_from_path(const TraversingPath& path, int n, const Rat& K, long lo, long hi,
                        std::optional<std::uint64_t> scan_shuffle_seed) {
    if (lo > hi) throw InputError("window lower bound exceeds upper bound");
    const DecodedPath dec = decode_path(path, n, /*expect_mids=*/true);

    for (const auto& el : path.elements)
        if (el.idx.is_node()) require_nondegenerate_value(el, K);
    for (size_t t = 0; t + 1 < dec.ints.size(); ++t) {
        const PathElement& mid = path.elements[2 * t + 1];
        const Rat& v1 = path.elements[2 * t].value;
        const Rat& v2 = path.elements[2 * t + 2].value;
        const Rat& line = dec.nw[t] ? path.ne_lines.at(dec.ints[t + 1].I / 2)
                                    : path.se_lines.at(dec.ints[t].J / 2);
        if (mid.value * mid.value != heron_K(v1, v2, line, K))
            throw HeronViolation("path midpoint " + mid.idx.str() +
                                 " fails its Heron constraint");
    }

    const long wlo = std::min(lo, dec.ints.back().column());
    const long whi = std::max(hi, dec.start_col) + 1;
    StripBuilder b(FriezeKind::Heronian, n, K, wlo, whi, scan_shuffle_seed);
    b.seed_boundary();
    for (const auto& el : path.elements) b.put(el.idx, el.value);
    for (const auto& [i, v] : path.ne_lines) b.put_ne(i, v);
    for (const auto& [j, v] : path.se_lines) b.put_se(j, v);
    b.run();
    b.check_interior_nonvanishing();
    return b.finish(lo, hi);
}

Frieze cm_frieze_from_thickened_path(const ThickenedPath& tp, int n, const Rat& K, long lo,
                                     long hi, std::optional<std::uint64_t> scan_shuffle_seed) {
    if (lo > hi) throw InputError("window lower bound exceeds upper bound");
    const DecodedPath dec = decode_path(tp.base, n, /*expect_mids=*/false);
    if (tp.shifted.size() != dec.ints.size())
        throw MalformedPath("thickened copy must list the (1,1)-shift of every path node");
    for (size_t t = 0; t < dec.ints.size(); ++t)
        if (tp.shifted[t].idx != FriezeIndex{dec.ints[t].I + 2, dec.ints[t].J + 2})
            throw MalformedPath("element " + tp.shifted[t].idx.str() +
                                " is not the (1,1)-shift of " + dec.ints[t].str());
    for (const auto& el : tp.base.elements) require_nondegenerate_value(el, K);

    const long wlo = std::min(lo, dec.ints.back().column());
    const long whi = std::max(hi, dec.start_col + 1);
    StripBuilder b(FriezeKind::CayleyMenger, n, K, wlo, whi, scan_shuffle_seed);
    b.seed_boundary();
    for (const auto& el : tp.base.elements) b.put(el.idx, el.value);
    for (const auto& el : tp.shifted) b.put(el.idx, el.value);
    for (const auto& [i, v] : tp.base.ne_lines) b.put_ne(i, v);
    for (const auto& [j, v] : tp.base.se_lines) b.put_se(j, v);
    b.run();
    b.check_interior_nonvanishing();
    return b.finish(lo, hi);
}

namespace {

std::optional<HeronianDiamond<Rat>> full_heronian_diamond(const Frieze& f, long i, long j) {
    try {
        HeronianDiamond<Rat> d;
        d.a = f.resolve(node_index(i, j + 1));
        d.b = ne_value(f, i);
        d.c = f.resolve(node_index(i + 1, j));
        d.d = se_value(f, j);
        d.e = f.resolve(node_index(i, j));
        d.f = f.resolve(node_index(i + 1, j + 1));
        d.p = f.resolve(ne_mid_index(i, j));
        d.q = f.resolve(se_mid_index(i, j));
        d.r = f.resolve(ne_mid_index(i, j + 1));
        d.s = f.resolve(se_mid_index(i + 1, j));
        return d;
    } catch (const OutsideWindow&) {
        return std::nullopt;
    }
}

std::optional<CayleyMengerDiamond> full_cm_diamond(const Frieze& f, long i, long j) {
    try {
        return CayleyMengerDiamond{f.resolve(node_index(i, j + 1)), ne_value(f, i),
                                   f.resolve(node_index(i + 1, j)), se_value(f, j),
                                   f.resolve(node_index(i, j)),
                                   f.resolve(node_index(i + 1, j + 1))};
    } catch (const OutsideWindow&) {
        return std::nullopt;
    }
}

}  // namespace

Frieze frieze_restrict(const Frieze& z) {
    if (z.kind != FriezeKind::Heronian)
        throw InputError("restriction consumes a Heronian frieze");
    Frieze src = z;
    frieze_validate_or_throw(src);

    for (long i = src.lo; i <= src.hi; ++i)
        for (int h = 1; h <= src.n - 1; ++h) {
            auto d = full_heronian_diamond(src, i, i + h);
            if (!d) continue;
            try {
                restrict_to_cm(*d, src.K);
            } catch (const DegenerateDiagonal& ex) {
                throw DegenerateDiagonal(std::string(ex.what()) + " at diamond " +
                                         node_index(i, i + h).str());
            }
        }

    Frieze out;
    out.kind = FriezeKind::CayleyMenger;
    out.n = src.n;
    out.K = src.K;
    out.lo = src.lo;
    out.hi = src.hi;
    for (const auto& [idx, v] : src.values)
        if (idx.is_node()) out.values[idx] = v;
    out.ne_lines = src.ne_lines;
    out.se_lines = src.se_lines;
    frieze_validate_or_throw(out);
    return out;
}

Frieze frieze_lift(const Frieze& z, int sign) {
    if (z.kind != FriezeKind::CayleyMenger)
        throw InputError("lift consumes a Cayley-Menger frieze");
    if (sign != 1 && sign != -1) throw InputError("sign must be +1 or -1");
    Frieze src = z;
    frieze_validate_or_throw(src);
    const Rat& K = src.K;
    const int n = src.n;

    for (const auto& [idx, v] : src.values) {
        if (!idx.is_node()) continue;
        const long h = (idx.J - idx.I) / 2;
        if (h >= 2 && h <= n - 2 && (v.is_zero() || (Rat(1) - K * v / Rat(4)).is_zero()))
            throw DegenerateDiagonal("interior entry " + idx.str() + " lies in {0, 4/K}");
    }

    struct Dia {
        long i, j;
        int h;
        CayleyMengerDiamond d;
    };
    std::vector<Dia> dias;
    for (long i = src.lo; i <= src.hi; ++i)
        for (int h = 1; h <= n - 1; ++h)
            if (auto d = full_cm_diamond(src, i, i + h))
                dias.push_back({i, i + h, h, *d});

    // Squared midpoint values, one per side of each diamond.
    std::map<FriezeIndex, Rat> sq;
    const auto note_sq = [&](const FriezeIndex& idx, const Rat& v) {
        auto [it, inserted] = sq.emplace(idx, v);
        if (!inserted && it->second != v)
            throw ValidationFailure("inconsistent squared midpoints at " + idx.str());
    };
    for (const auto& dia : dias) {
        const auto& d = dia.d;
        const FriezeIndex P = ne_mid_index(dia.i, dia.j);
        const FriezeIndex Q = se_mid_index(dia.i, dia.j);
        const FriezeIndex R = ne_mid_index(dia.i, dia.j + 1);
        const FriezeIndex S = se_mid_index(dia.i + 1, dia.j);
        if (dia.h == 1) {
            note_sq(Q, heron_K(d.a, d.d, d.e, K));
            note_sq(R, heron_K(d.a, d.d, d.e, K));
        } else if (dia.h == n - 1) {
            note_sq(P, heron_K(d.b, d.c, d.e, K));
            note_sq(S, heron_K(d.b, d.c, d.e, K));
        } else {
            const Rat hp = heron_K(d.b, d.c, d.e, K);
            const Rat hq = heron_K(d.a, d.d, d.e, K);
            const Rat hr = heron_K(d.a, d.b, d.f, K);
            const Rat hs = heron_K(d.c, d.d, d.f, K);
            if (hp.is_zero() || hq.is_zero() || hr.is_zero() || hs.is_zero())
                throw DegenerateDiagonal("a triangle value vanishes at diamond " +
                                         node_index(dia.i, dia.j).str() +
                                         ", lift is not unique up to sign");
            note_sq(P, hp);
            note_sq(Q, hq);
            note_sq(R, hr);
            note_sq(S, hs);
        }
    }

    std::map<FriezeIndex, Rat> mids;
    bool progress = false;
    const auto put_mid = [&](const FriezeIndex& idx, const Rat& v) {
        auto [it, inserted] = mids.emplace(idx, v);
        if (inserted) {
            progress = true;
            return;
        }
        if (it->second != v)
            throw ValidationFailure("sign propagation conflict at " + idx.str());
    };
    for (long i = src.lo; i <= src.hi; ++i) {
        put_mid(se_mid_index(i, i), Rat(0));
        put_mid(se_mid_index(i, i + n - 1), Rat(0));
        put_mid(ne_mid_index(i, i + 1), Rat(0));
        put_mid(ne_mid_index(i, i + n), Rat(0));
    }
    for (const auto& [idx, v] : sq)
        if (v.is_zero()) put_mid(idx, Rat(0));

    // Seed the first midpoint with a nonzero square; the global sign choice
    // is exactly the sign of this entry.
    for (const auto& [idx, v] : sq) {
        if (v.is_zero()) continue;
        auto root = sqrt_exact(v, /*throw_on_negative=*/true);
        if (!root)
            throw ExactSqrtUnavailable("the squared midpoint at " + idx.str() +
                                       " is not a rational square");
        put_mid(idx, Rat(sign) * *root);
        break;
    }

    do {
        progress = false;
        for (const auto& dia : dias) {
            const FriezeIndex P = ne_mid_index(dia.i, dia.j);
            const FriezeIndex Q = se_mid_index(dia.i, dia.j);
            const FriezeIndex R = ne_mid_index(dia.i, dia.j + 1);
            const FriezeIndex S = se_mid_index(dia.i + 1, dia.j);
            const auto known = [&](const FriezeIndex& idx) -> const Rat* {
                auto it = mids.find(idx);
                return it == mids.end() ? nullptr : &it->second;
            };
            if (dia.h == 1) {
                if (const Rat* q = known(Q); q && !known(R)) put_mid(R, *q);
                if (const Rat* r = known(R); r && !known(Q)) put_mid(Q, *r);
                continue;
            }
            if (dia.h == n - 1) {
                if (const Rat* p = known(P); p && !known(S)) put_mid(S, *p);
                if (const Rat* s = known(S); s && !known(P)) put_mid(P, *s);
                continue;
            }
            if (known(P) && known(Q) && known(R) && known(S)) continue;
            const Rat* p = known(P);
            const Rat* q = known(Q);
            const Rat* r = known(R);
            const Rat* s = known(S);
            if (!(p || q || r || s)) continue;
            const Rat pq = -scm_partial(PartialDir::Right, dia.d, K) / Rat(2);
            const Rat rs = -scm_partial(PartialDir::Left, dia.d, K) / Rat(2);
            const Rat qs = scm_partial(PartialDir::DiagUp, dia.d, K) / Rat(2);
            const Rat pr = scm_partial(PartialDir::DiagDown, dia.d, K) / Rat(2);
            const Rat ps = scm_partial(PartialDir::Up, dia.d, K) / Rat(2);
            const Rat rq = scm_partial(PartialDir::Down, dia.d, K) / Rat(2);
            if (p) {
                put_mid(Q, pq / *p);
                put_mid(R, pr / *p);
                put_mid(S, ps / *p);
            } else if (q) {
                put_mid(P, pq / *q);
                put_mid(R, rq / *q);
                put_mid(S, qs / *q);
            } else if (r) {
                put_mid(P, pr / *r);
                put_mid(Q, rq / *r);
                put_mid(S, rs / *r);
            } else {
                put_mid(P, ps / *s);
                put_mid(Q, qs / *s);
                put_mid(R, rs / *s);
            }
        }
    } while (progress);

    Frieze out;
    out.kind = FriezeKind::Heronian;
    out.n = n;
    out.K = K;
    out.lo = src.lo;
    out.hi = src.hi;
    out.values = src.values;
    out.ne_lines = src.ne_lines;
    out.se_lines = src.se_lines;
    for (long i = src.lo; i <= src.hi; ++i) {
        for (long j = i + 1; j <= i + n; ++j) {
            auto it = mids.find(ne_mid_index(i, j));
            if (it == mids.end())
                throw ValidationFailure("sign propagation could not reach " +
                                        ne_mid_index(i, j).str());
            out.values[it->first] = it->second;
        }
        for (long j = i; j <= i + n - 1; ++j) {
            auto it = mids.find(se_mid_index(i, j));
            if (it == mids.end())
                throw ValidationFailure("sign propagation could not reach " +
                                        se_mid_index(i, j).str());
            out.values[it->first] = it->second;
        }
    }
    frieze_validate_or_throw(out);
    return out;
}

FriezeValidationReport frieze_validate(const Frieze& z, const TolerancePolicy& policy) {
    FriezeValidationReport rep;
    FriezeValidationReport::Item parity{"index-parity", {}};
    FriezeValidationReport::Item boundary{"boundary-zeros", {}};
    FriezeValidationReport::Item lines{"line-consistency", {}};
    FriezeValidationReport::Item diamonds{"diamond-equations", {}};
    FriezeValidationReport::Item period{"periodicity", {}};
    FriezeValidationReport::Item glide{"glide-symmetry", {}};
    FriezeValidationReport::Item coherence{"coherence", {}};

    const long two_n = 2L * z.n;
    for (const auto& [idx, v] : z.values) {
        const long h = idx.J - idx.I;
        const bool kind_ok = z.kind == FriezeKind::Heronian
                                 ? (idx.I % 2 == 0 || idx.J % 2 == 0)
                                 : idx.is_node();
        if (h < 0 || h > two_n || !kind_ok || idx.column() < z.lo || idx.column() > z.hi)
            parity.failures.push_back(idx.str());
        if ((h == 0 || h == two_n) && !v.is_zero())
            boundary.failures.push_back(idx.str());
        if (idx.is_midpoint() && (h == 1 || h == two_n - 1) && !v.is_zero())
            boundary.failures.push_back(idx.str());
    }

    const auto stored = [&](const FriezeIndex& idx) -> const Rat* {
        auto it = z.values.find(idx);
        return it == z.values.end() ? nullptr : &it->second;
    };
    const auto stored_ne = [&](long i) -> const Rat* {
        auto it = z.ne_lines.find(i);
        return it == z.ne_lines.end() ? nullptr : &it->second;
    };
    const auto stored_se = [&](long j) -> const Rat* {
        auto it = z.se_lines.find(j);
        return it == z.se_lines.end() ? nullptr : &it->second;
    };

    for (long i = z.lo; i <= z.hi; ++i) {
        const auto check3 = [&](const FriezeIndex& node, long ne_label, long se_label) {
            const Rat* v = stored(node);
            const Rat* a = stored_ne(ne_label);
            const Rat* b = stored_se(se_label);
            const bool ok = (!v || !a || near_equal(*v, *a, policy)) &&
                            (!v || !b || near_equal(*v, *b, policy)) &&
                            (!a || !b || near_equal(*a, *b, policy));
            if (!ok)
                lines.failures.push_back("node " + node.str() + ", NE line " +
                                         std::to_string(ne_label) + ", SE line " +
                                         std::to_string(se_label));
        };
        check3(node_index(i, i + 1), i, i);
        check3(node_index(i, i + z.n - 1), i - 1, i + z.n - 1);
    }

    for (long i = z.lo; i < z.hi; ++i) {
        for (int h = 1; h <= z.n - 1; ++h) {
            const long j = i + h;
            const Rat* a = stored(node_index(i, j + 1));
            const Rat* b = stored_ne(i);
            const Rat* c = stored(node_index(i + 1, j));
            const Rat* d = stored_se(j);
            const Rat* e = stored(node_index(i, j));
            const Rat* f = stored(node_index(i + 1, j + 1));
            if (!(a && b && c && d && e && f)) continue;
            if (z.kind == FriezeKind::Heronian) {
                const Rat* p = stored(ne_mid_index(i, j));
                const Rat* q = stored(se_mid_index(i, j));
                const Rat* r = stored(ne_mid_index(i, j + 1));
                const Rat* s = stored(se_mid_index(i + 1, j));
                if (!(p && q && r && s)) continue;
                const HeronianDiamond<Rat> dia{*a, *b, *c, *d, *e, *f, *p, *q, *r, *s};
                if (!heronian_check(dia, z.K).ok(policy))
                    diamonds.failures.push_back(node_index(i, j).str());
            } else {
                const CayleyMengerDiamond dia{*a, *b, *c, *d, *e, *f};
                if (!cm_check(dia, z.K, policy))
                    diamonds.failures.push_back(node_index(i, j).str());
            }
        }
    }

    for (const auto& [idx, v] : z.values) {
        const FriezeIndex shifted{idx.I + two_n, idx.J + two_n};
        if (const Rat* w = stored(shifted); w && !near_equal(v, *w, policy))
            period.failures.push_back(idx.str());
        const FriezeIndex mirrored = glide_image(idx, z.n);
        if (const Rat* w = stored(mirrored); w && !near_equal(v, *w, policy))
            glide.failures.push_back(idx.str());
    }
    for (const auto& [i, v] : z.ne_lines)
        if (const Rat* w = stored_ne(i + z.n); w && !near_equal(v, *w, policy))
            period.failures.push_back("NE line " + std::to_string(i));
    for (const auto& [j, v] : z.se_lines)
        if (const Rat* w = stored_se(j + z.n); w && !near_equal(v, *w, policy))
            period.failures.push_back("SE line " + std::to_string(j));

    if (z.kind == FriezeKind::CayleyMenger) {
        const auto stored_cm = [&](long i, long j) -> std::optional<CayleyMengerDiamond> {
            const Rat* a = stored(node_index(i, j + 1));
            const Rat* b = stored_ne(i);
            const Rat* c = stored(node_index(i + 1, j));
            const Rat* d = stored_se(j);
            const Rat* e = stored(node_index(i, j));
            const Rat* f = stored(node_index(i + 1, j + 1));
            if (!(a && b && c && d && e && f)) return std::nullopt;
            return CayleyMengerDiamond{*a, *b, *c, *d, *e, *f};
        };
        for (long i = z.lo + 1; i < z.hi; ++i) {
            for (int h = 2; h <= z.n - 2; ++h) {
                const long j = i + h;
                auto x1 = stored_cm(i - 1, j - 1);
                auto x2 = stored_cm(i - 1, j);
                auto x3 = stored_cm(i, j - 1);
                auto x4 = stored_cm(i, j);
                if (!(x1 && x2 && x3 && x4)) continue;
                if (!coherence_check(*x1, *x2, *x3, *x4, z.K, policy))
                    coherence.failures.push_back(node_index(i, j).str());
            }
        }
    }

    rep.items.push_back(std::move(parity));
    rep.items.push_back(std::move(boundary));
    rep.items.push_back(std::move(lines));
    rep.items.push_back(std::move(diamonds));
    rep.items.push_back(std::move(period));
    rep.items.push_back(std::move(glide));
    if (z.kind == FriezeKind::CayleyMenger) rep.items.push_back(std::move(coherence));
    return rep;
}

void frieze_validate_or_throw(Frieze& z, const TolerancePolicy& policy) {
    const FriezeValidationReport rep = frieze_validate(z, policy);
    if (!rep.ok()) {
        std::string msg = "frieze validation failed:";
        for (const auto& item : rep.items)
            for (const auto& failure : item.failures)
                msg += " [" + item.name + "] " + failure;
        throw ValidationFailure(msg);
    }
    z.mark_validated();
}

Triangulation path_to_triangulation(const TraversingPath& path, int n) {
    bool has_mids = false;
    for (const auto& el : path.elements)
        if (el.idx.is_midpoint()) has_mids = true;
    const DecodedPath dec = decode_path(path, n, has_mids);
    std::vector<std::pair<int, int>> diags;
    for (const auto& idx : dec.ints) {
        const long h = (idx.J - idx.I) / 2;
        if (h < 2 || h > n - 2) continue;
        int u = residue1(idx.I / 2, n);
        int v = residue1(idx.J / 2, n);
        if (u > v) std::swap(u, v);
        diags.emplace_back(u, v);
    }
    return Triangulation(n, std::move(diags));
}

namespace {

TraversingPath extract_path_impl(const Frieze& f, long start_column,
                                 const std::vector<bool>& nw_steps, bool with_mids) {
    if (static_cast<int>(nw_steps.size()) != f.n - 2)
        throw InputError("a traversing path of order " + std::to_string(f.n) + " takes " +
                         std::to_string(f.n - 2) + " steps");
    TraversingPath out;
    long i = start_column;
    long j = start_column + 1;
    const auto push = [&](const FriezeIndex& idx) {
        out.elements.push_back({idx, f.resolve(idx)});
    };
    push(node_index(i, j));
    for (bool nw : nw_steps) {
        if (nw) {
            if (with_mids) push(ne_mid_index(i - 1, j));
            out.ne_lines[i - 1] = ne_value(f, i - 1);
            --i;
        } else {
            if (with_mids) push(se_mid_index(i, j));
            out.se_lines[j] = se_value(f, j);
            ++j;
        }
        push(node_index(i, j));
    }
    return out;
}

}  // namespace

TraversingPath extract_path(const Frieze& f, long start_column,
                            const std::vector<bool>& nw_steps) {
    return extract_path_impl(f, start_column, nw_steps, f.kind == FriezeKind::Heronian);
}

ThickenedPath extract_thickened_path(const Frieze& f, long start_column,
                                     const std::vector<bool>& nw_steps) {
    ThickenedPath tp;
    tp.base = extract_path_impl(f, start_column, nw_steps, /*with_mids=*/false);
    for (const auto& el : tp.base.elements) {
        const FriezeIndex shifted{el.idx.I + 2, el.idx.J + 2};
        tp.shifted.push_back({shifted, f.resolve(shifted)});
    }
    return tp;
}

}  // namespace sphf
