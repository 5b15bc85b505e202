#include "sphfrieze/symbolic.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "sphfrieze/diamond.hpp"

namespace sphf {

bool GradedLex::operator()(const Mono& a, const Mono& b) const {
    long da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    if (da != db) return da < db;
    const std::size_t m = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i) {
        const int ea = i < a.size() ? a[i] : 0;
        const int eb = i < b.size() ? b[i] : 0;
        if (ea != eb) return ea < eb;
    }
    return false;
}

// Packed-key plumbing shared by the implementation file. Keys hold a weighted
// degree in the top 16 bits of hi (x-variables weigh 1, p-variables weigh 2)
// followed by 8-bit exponent lanes (variables 0..5 in hi, 6..13 in lo).
// Keeping every exponent below 128 and the weighted degree below 32768 means
// lane arithmetic never carries across lanes, integer comparison is a graded
// lexicographic order, and a masked subtraction tests monomial divisibility
// lane-wise. The p-weight makes the rewrite p^2 -> H strictly decreasing,
// which division in the quotient ring relies on.
struct PolyDetail {
    using Key = Poly::Key;
    using Terms = Poly::Terms;

    static constexpr int kMaxVars = 14;
    static constexpr std::uint64_t kHiMsb = 0x8000808080808080ull;
    static constexpr std::uint64_t kLoMsb = 0x8080808080808080ull;

    static Key checked_add(const Key& a, const Key& b) {
        Key k{a.hi + b.hi, a.lo + b.lo};
        if ((k.hi & kHiMsb) || (k.lo & kLoMsb))
            throw ResourceCap("monomial degree overflow in symbolic arithmetic");
        return k;
    }
    static Key sub(const Key& a, const Key& b) { return Key{a.hi - b.hi, a.lo - b.lo}; }
    static bool divides(const Key& d, const Key& m) {
        return (((m.hi | kHiMsb) - d.hi) & kHiMsb) == kHiMsb &&
               (((m.lo | kLoMsb) - d.lo) & kLoMsb) == kLoMsb;
    }
    static int exponent(const Key& k, int v) {
        return v < 6 ? static_cast<int>((k.hi >> (40 - 8 * v)) & 0xFF)
                     : static_cast<int>((k.lo >> (56 - 8 * (v - 6))) & 0xFF);
    }
    static int plain_degree(const Key& k) {
        int d = 0;
        for (int v = 0; v < kMaxVars; ++v) d += exponent(k, v);
        return d;
    }
    static Key exponent_key(int v, int e, bool p_var) {
        Key k;
        k.hi = static_cast<std::uint64_t>(p_var ? 2 * e : e) << 48;
        if (v < 6)
            k.hi |= static_cast<std::uint64_t>(e) << (40 - 8 * v);
        else
            k.lo |= static_cast<std::uint64_t>(e) << (56 - 8 * (v - 6));
        return k;
    }
    static Mono unpack(const Key& k, int nvars) {
        Mono m(static_cast<std::size_t>(nvars), 0);
        for (int v = 0; v < nvars; ++v) m[static_cast<std::size_t>(v)] = exponent(k, v);
        return m;
    }

    static const Terms& terms(const Poly& p) { return p.terms_; }
    static Poly make(std::shared_ptr<const PolyRing> ring, Terms terms) {
        Poly p;
        p.ring_ = std::move(ring);
        p.terms_ = std::move(terms);
        return p;
    }
    static Poly detached(Poly p) {
        p.ring_ = nullptr;
        return p;
    }
    static Terms take(Poly&& p) { return std::move(p.terms_); }
    static void canonicalize(Poly& p) { p.reduce_p_squares(); }
    static void harmonize(Poly& a, Poly& b) { a.harmonize(b); }
};

namespace {

using Key = PolyDetail::Key;
using Terms = PolyDetail::Terms;

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t h = k.hi * 0x9e3779b97f4a7c15ull;
        h ^= k.lo + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// a + b (or a - b) of two ascending term vectors.
Terms merge_add(const Terms& a, const Terms& b, bool negate_b) {
    Terms out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            out.push_back(*ia++);
        } else if (ia == a.end() || ib->first < ia->first) {
            out.emplace_back(ib->first, negate_b ? -ib->second : ib->second);
            ++ib;
        } else {
            Rat c = negate_b ? ia->second - ib->second : ia->second + ib->second;
            if (!c.is_zero()) out.emplace_back(ia->first, std::move(c));
            ++ia;
            ++ib;
        }
    }
    return out;
}

Terms multiply_terms(const Terms& a, const Terms& b) {
    if (a.empty() || b.empty()) return {};
    const unsigned long long pairs =
        static_cast<unsigned long long>(a.size()) * static_cast<unsigned long long>(b.size());
    if (pairs > (1ull << 26)) {
        if (std::getenv("SPHF_STATS"))
            std::fprintf(stderr, "cap: |a|=%zu |b|=%zu\n", a.size(), b.size());
        throw ResourceCap("term product count exceeds the multiplication cap");
    }
    if (a.size() == 1 || b.size() == 1) {
        const auto& [sk, sc] = a.size() == 1 ? a.front() : b.front();
        const Terms& big = a.size() == 1 ? b : a;
        Terms out;
        out.reserve(big.size());
        for (const auto& [k, c] : big) out.emplace_back(PolyDetail::checked_add(k, sk), c * sc);
        return out;
    }
    // Scaling both factors to integer coefficients lets the accumulation run
    // on plain integers (fused multiply-add, no gcd per pair); the common
    // denominator is divided back out once per distinct output monomial.
    const auto scaled = [](const Terms& t) {
        mpz_class den(1);
        for (const auto& [k, c] : t) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.den().get_mpz_t());
        std::vector<std::pair<Key, mpz_class>> out;
        out.reserve(t.size());
        for (const auto& [k, c] : t) out.emplace_back(k, c.num() * (den / c.den()));
        return std::make_pair(std::move(out), std::move(den));
    };
    const auto [ia, da] = scaled(a);
    const auto [ib, db] = scaled(b);
    std::unordered_map<Key, mpz_class, KeyHash> acc;
    acc.reserve(a.size() + b.size());
    for (const auto& [ka, ca] : ia)
        for (const auto& [kb, cb] : ib) {
            mpz_class& slot = acc[PolyDetail::checked_add(ka, kb)];
            mpz_addmul(slot.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        }
    const mpz_class den = da * db;
    Terms out;
    out.reserve(acc.size());
    for (auto& [k, c] : acc)
        if (c != 0) out.emplace_back(k, Rat(mpq_class(std::move(c), den)));
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
}

}  // namespace

std::shared_ptr<PolyRing> make_ring(std::vector<std::string> x_names,
                                    std::vector<std::string> p_names) {
    if (x_names.size() + p_names.size() > PolyDetail::kMaxVars)
        throw InputError("symbolic rings support at most 14 variables");
    auto ring = std::make_shared<PolyRing>();
    ring->n_x = static_cast<int>(x_names.size());
    ring->names = std::move(x_names);
    ring->names.insert(ring->names.end(), p_names.begin(), p_names.end());
    ring->p_squares.resize(p_names.size());
    return ring;
}

void set_p_square(PolyRing& ring, int p_index, const Poly& square) {
    if (p_index < 0 || p_index >= static_cast<int>(ring.p_squares.size()))
        throw InputError("p-variable index out of range");
    ring.p_squares[static_cast<std::size_t>(p_index)] = PolyDetail::detached(square);
}

Poly::Poly(long c) {
    if (c != 0) terms_.emplace_back(Key{}, Rat(c));
}

Poly::Poly(const Rat& c) {
    if (!c.is_zero()) terms_.emplace_back(Key{}, c);
}

Poly Poly::variable(std::shared_ptr<const PolyRing> ring, int var) {
    if (!ring || var < 0 || var >= static_cast<int>(ring->names.size()))
        throw InputError("polynomial variable index out of range");
    Poly p;
    p.terms_.emplace_back(PolyDetail::exponent_key(var, 1, var >= ring->n_x), Rat(1));
    p.ring_ = std::move(ring);
    return p;
}

Poly Poly::constant(std::shared_ptr<const PolyRing> ring, const Rat& c) {
    Poly p;
    p.ring_ = std::move(ring);
    if (!c.is_zero()) p.terms_.emplace_back(Key{}, c);
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().first == Key{});
}

const Rat& Poly::constant_value() const {
    if (terms_.size() != 1 || !(terms_.front().first == Key{}))
        throw InputError("polynomial is not a nonzero constant");
    return terms_.front().second;
}

int Poly::total_degree() const {
    int deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, PolyDetail::plain_degree(k));
    return deg;
}

std::map<Mono, Rat, GradedLex> Poly::terms() const {
    const int nvars = ring_ ? static_cast<int>(ring_->names.size()) : 0;
    std::map<Mono, Rat, GradedLex> out;
    for (const auto& [k, c] : terms_) out.emplace(PolyDetail::unpack(k, nvars), c);
    return out;
}

Rat Poly::eval(const std::vector<Rat>& values) const {
    const int nvars = ring_ ? static_cast<int>(ring_->names.size()) : 0;
    Rat out(0);
    for (const auto& [k, c] : terms_) {
        Rat term = c;
        for (int v = 0; v < nvars; ++v) {
            const int e = PolyDetail::exponent(k, v);
            if (e == 0) continue;
            if (v >= static_cast<int>(values.size()))
                throw InputError("not enough values for evaluation");
            for (int i = 0; i < e; ++i) term *= values[static_cast<std::size_t>(v)];
        }
        out += term;
    }
    return out;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    const int nvars = ring_ ? static_cast<int>(ring_->names.size()) : PolyDetail::kMaxVars;
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [k, c] = *it;
        const bool negative = c < Rat(0);
        const Rat mag = negative ? -c : c;
        if (out.empty())
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        std::string vars;
        for (int v = 0; v < nvars; ++v) {
            const int e = PolyDetail::exponent(k, v);
            if (e == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += ring_ ? ring_->names[static_cast<std::size_t>(v)] : "v" + std::to_string(v);
            if (e > 1) vars += "^" + std::to_string(e);
        }
        if (vars.empty())
            out += mag.str();
        else if (mag == Rat(1))
            out += vars;
        else
            out += mag.str() + "*" + vars;
    }
    return out;
}

void Poly::harmonize(Poly& other) {
    if (ring_ && other.ring_) {
        if (ring_ != other.ring_) throw InputError("polynomials belong to different rings");
    } else if (ring_) {
        other.ring_ = ring_;
    } else if (other.ring_) {
        ring_ = other.ring_;
    }
}

void Poly::reduce_p_squares() {
    if (!ring_ || ring_->p_squares.empty()) return;
    const int n_x = ring_->n_x;
    const int nvars = static_cast<int>(ring_->names.size());
    Key pmask;
    for (int v = n_x; v < nvars; ++v) {
        if (v < 6)
            pmask.hi |= 0xFEull << (40 - 8 * v);
        else
            pmask.lo |= 0xFEull << (56 - 8 * (v - 6));
    }
    // Worklist rewriting: expanded terms go back on the stack until p-free
    // in the squared sense, then everything is coalesced with a single sort.
    Terms done;
    done.reserve(terms_.size());
    Terms pending;
    for (const auto& [k, c] : terms_) {
        if ((k.hi & pmask.hi) || (k.lo & pmask.lo))
            pending.emplace_back(k, c);
        else
            done.emplace_back(k, c);
    }
    if (pending.empty()) return;
    while (!pending.empty()) {
        auto [k, c] = std::move(pending.back());
        pending.pop_back();
        if (!((k.hi & pmask.hi) || (k.lo & pmask.lo))) {
            done.emplace_back(k, std::move(c));
            continue;
        }
        int pv = n_x;
        while (PolyDetail::exponent(k, pv) < 2) ++pv;
        const Key rest = PolyDetail::sub(k, PolyDetail::exponent_key(pv, 2, true));
        const Poly& square = ring_->p_squares[static_cast<std::size_t>(pv - n_x)];
        for (const auto& [ks, cs] : square.terms_)
            pending.emplace_back(PolyDetail::checked_add(ks, rest), cs * c);
    }
    std::sort(done.begin(), done.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Terms out;
    out.reserve(done.size());
    for (auto& [k, c] : done) {
        if (!out.empty() && out.back().first == k) {
            out.back().second += c;
            if (out.back().second.is_zero()) out.pop_back();
        } else if (!c.is_zero()) {
            out.emplace_back(k, std::move(c));
        }
    }
    terms_ = std::move(out);
}

Poly Poly::operator-() const {
    Poly out = *this;
    for (auto& [k, c] : out.terms_) c = -c;
    return out;
}

Poly& Poly::operator+=(const Poly& o) {
    Poly other = o;
    harmonize(other);
    terms_ = merge_add(terms_, other.terms_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    Poly other = o;
    harmonize(other);
    terms_ = merge_add(terms_, other.terms_, true);
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    Poly other = o;
    harmonize(other);
    terms_ = multiply_terms(terms_, other.terms_);
    reduce_p_squares();
    return *this;
}

Poly& Poly::operator*=(const Rat& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, coef] : terms_) coef *= c;
    return *this;
}

bool operator==(const Poly& a, const Poly& b) {
    Poly diff = a;
    diff -= b;
    return diff.is_zero();
}

std::optional<Poly> exact_divide(const Poly& num, const Poly& div) {
    if (div.is_zero()) throw ZeroDenominator("division by a zero polynomial");
    Poly n = num;
    Poly d = div;
    n.harmonize(d);
    const Terms& nt = n.terms_;
    const Terms& dt = d.terms_;
    const Key dk = dt.back().first;
    const Rat dc = dt.back().second;

    // Long division with the remainder held as a heap of lazy streams: the
    // dividend itself plus, for every quotient term q_j, the products
    // q_j * dt[i]. Each stream is sorted, so the heap always exposes the
    // leading remainder monomial without rebuilding the remainder.
    struct Node {
        Key key;
        std::uint32_t j;  // quotient index, or kDividend for the dividend stream
        std::uint32_t i;  // position within the stream (descending)
    };
    constexpr std::uint32_t kDividend = 0xFFFFFFFFu;
    const auto heap_less = [](const Node& a, const Node& b) { return a.key < b.key; };
    std::vector<Node> heap;
    Terms q;  // built leading-first, reversed at the end

    const auto push = [&](Node node) {
        heap.push_back(node);
        std::push_heap(heap.begin(), heap.end(), heap_less);
    };
    if (!nt.empty())
        push({nt.back().first, kDividend, static_cast<std::uint32_t>(nt.size() - 1)});

    while (!heap.empty()) {
        const Key key = heap.front().key;
        Rat c;
        while (!heap.empty() && heap.front().key == key) {
            std::pop_heap(heap.begin(), heap.end(), heap_less);
            Node node = heap.back();
            heap.pop_back();
            if (node.j == kDividend) {
                c += nt[node.i].second;
                if (node.i > 0) push({nt[node.i - 1].first, kDividend, node.i - 1});
            } else {
                c -= q[node.j].second * dt[node.i].second;
                if (node.i > 0)
                    push({PolyDetail::checked_add(q[node.j].first, dt[node.i - 1].first),
                          node.j, node.i - 1});
            }
        }
        if (c.is_zero()) continue;
        if (!PolyDetail::divides(dk, key)) return std::nullopt;
        const Key t = PolyDetail::sub(key, dk);
        q.emplace_back(t, c / dc);
        // The product against the divisor's leading term cancels here by
        // construction, so the stream starts one position below it.
        if (dt.size() >= 2)
            push({PolyDetail::checked_add(t, dt[dt.size() - 2].first),
                  static_cast<std::uint32_t>(q.size() - 1),
                  static_cast<std::uint32_t>(dt.size() - 2)});
    }
    std::reverse(q.begin(), q.end());
    return PolyDetail::make(n.ring(), std::move(q));
}

namespace {

// p-variables (ring indices) that occur in the polynomial.
std::vector<int> p_vars_in(const Poly& p) {
    std::vector<int> out;
    if (!p.ring()) return out;
    Key acc;
    for (const auto& [k, c] : PolyDetail::terms(p)) {
        acc.hi |= k.hi;
        acc.lo |= k.lo;
    }
    for (int v = p.ring()->n_x; v < static_cast<int>(p.ring()->names.size()); ++v)
        if (PolyDetail::exponent(acc, v) != 0) out.push_back(v);
    return out;
}

// Sign flip of one p-variable (exponents are 0 or 1 in canonical form).
Poly conjugate_p(const Poly& p, int pv) {
    Terms terms = PolyDetail::terms(p);
    for (auto& [k, c] : terms)
        if (PolyDetail::exponent(k, pv) % 2 == 1) c = -c;
    return PolyDetail::make(p.ring(), std::move(terms));
}

// Mask covering the p-variable exponent lanes of a ring.
Key p_lane_mask(const PolyRing& ring) {
    Key mask;
    const int nvars = static_cast<int>(ring.names.size());
    for (int v = ring.n_x; v < nvars; ++v) {
        if (v < 6)
            mask.hi |= 0xFFull << (40 - 8 * v);
        else
            mask.lo |= 0xFFull << (56 - 8 * (v - 6));
    }
    return mask;
}

// Long division performed directly in the ring where p^2 = H holds. Every
// canonical quotient term factors as t * p_S where S is the set of
// p-variables it shares with a reducer and t is p-disjoint from all of the
// reducer's p-variables, so their product multiplies out termwise with no
// rewriting and its head survives. The reducer family consists of
// canonical(p_S * d_T) where d_T is the divisor with the p-variables in T
// eliminated by iterated conjugation norms; the norms only ever multiply
// divisor-sized polynomials, and the x-only full norm catches remainders
// whose leading monomial carries no p-variables at all. Each emission
// subtracts an exact multiple of the divisor and strictly lowers the
// remainder's leading monomial, so the routine terminates and a returned
// quotient is always exact; a std::nullopt may still be spurious when
// reducer heads collide, and the caller falls back to rationalization.
std::optional<Poly> quotient_heap_divide_impl(const Poly& num, const Poly& div) {
    Poly n = num;
    Poly d = div;
    PolyDetail::harmonize(n, d);
    const Terms& nt = PolyDetail::terms(n);
    if (nt.empty()) return PolyDetail::make(n.ring(), Terms{});

    const std::vector<int> pvars = p_vars_in(d);
    if (pvars.size() > 6) return std::nullopt;  // reducer family would be large
    const std::size_t nsub = std::size_t{1} << pvars.size();

    const auto lane_mask = [](const std::vector<int>& vars, std::size_t member_mask) {
        Key mask;
        for (std::size_t b = 0; b < vars.size(); ++b) {
            if (!(member_mask >> b & 1)) continue;
            const int v = vars[b];
            if (v < 6)
                mask.hi |= 0xFFull << (40 - 8 * v);
            else
                mask.lo |= 0xFFull << (56 - 8 * (v - 6));
        }
        return mask;
    };

    // Conjugation-norm chain: elim[T] has the p-variables of T removed and
    // equals factor[T] * d in the quotient ring.
    std::vector<Poly> elim(nsub), factor(nsub);
    elim[0] = d;
    factor[0] = PolyDetail::make(d.ring(), Terms{{Key{}, Rat(1)}});
    for (std::size_t t = 1; t < nsub; ++t) {
        const std::size_t b = static_cast<std::size_t>(std::countr_zero(t));
        const std::size_t prev = t & (t - 1);
        const int v = pvars[b];
        bool present = false;
        for (const auto& [k, c] : PolyDetail::terms(elim[prev]))
            if (PolyDetail::exponent(k, v) != 0) present = true;
        if (!present) {
            elim[t] = elim[prev];
            factor[t] = factor[prev];
            continue;
        }
        const Poly conj = conjugate_p(elim[prev], v);
        elim[t] = elim[prev] * conj;
        factor[t] = factor[prev] * conj;
    }

    // Reducer p_S * elim[T] for disjoint S and T, scanned cheapest first so
    // the plain divisor is preferred when several match.
    struct Reducer {
        Terms terms;
        Key lead;
        Key offset;  // exponents of p_S itself
        Key pmask;   // lanes of the p-variables the reducer still contains
        Rat lc;
        std::uint32_t chain;  // index into factor[]
        int rank;
    };
    std::vector<Reducer> reducers;
    for (std::size_t t = 0; t < nsub; ++t) {
        if (elim[t].is_zero()) continue;
        for (std::size_t s = 0; s < nsub; ++s) {
            if (s & t) continue;
            Key off;
            for (std::size_t b = 0; b < pvars.size(); ++b)
                if (s >> b & 1)
                    off = PolyDetail::checked_add(off,
                                                  PolyDetail::exponent_key(pvars[b], 1, true));
            Poly bs = PolyDetail::make(d.ring(), Terms{{off, Rat(1)}});
            bs *= elim[t];
            Terms bt = PolyDetail::take(std::move(bs));
            if (bt.empty()) continue;
            const Key lead = bt.back().first;
            const Rat lc = bt.back().second;
            const int rank = std::popcount(t) * 8 + std::popcount(s);
            Key pm;
            for (const auto& [k, c] : bt) {
                pm.hi |= k.hi;
                pm.lo |= k.lo;
            }
            pm.hi &= lane_mask(pvars, nsub - 1).hi;
            pm.lo &= lane_mask(pvars, nsub - 1).lo;
            reducers.push_back(
                {std::move(bt), lead, off, pm, lc, static_cast<std::uint32_t>(t), rank});
        }
    }
    std::stable_sort(reducers.begin(), reducers.end(),
                     [](const Reducer& a, const Reducer& b) { return a.rank < b.rank; });

    struct Node {
        Key key;
        std::uint32_t j;  // emission index, or kDividend for the dividend stream
        std::uint32_t i;  // position within the stream (descending)
    };
    constexpr std::uint32_t kDividend = 0xFFFFFFFFu;
    const auto heap_less = [](const Node& a, const Node& b) { return a.key < b.key; };
    std::vector<Node> heap;
    struct Emit {
        Key t;  // p-disjoint part of the quotient term
        Rat c;
        std::uint32_t s;  // reducer index
    };
    std::vector<Emit> q;

    const auto push = [&](Node node) {
        heap.push_back(node);
        std::push_heap(heap.begin(), heap.end(), heap_less);
    };
    push({nt.back().first, kDividend, static_cast<std::uint32_t>(nt.size() - 1)});

    while (!heap.empty()) {
        const Key key = heap.front().key;
        Rat c;
        while (!heap.empty() && heap.front().key == key) {
            std::pop_heap(heap.begin(), heap.end(), heap_less);
            Node node = heap.back();
            heap.pop_back();
            if (node.j == kDividend) {
                c += nt[node.i].second;
                if (node.i > 0) push({nt[node.i - 1].first, kDividend, node.i - 1});
            } else {
                const Emit& e = q[node.j];
                const Terms& bt = reducers[e.s].terms;
                c -= e.c * bt[node.i].second;
                if (node.i > 0)
                    push({PolyDetail::checked_add(e.t, bt[node.i - 1].first), node.j, node.i - 1});
            }
        }
        if (c.is_zero()) continue;
        const Reducer* hit = nullptr;
        Key t;
        for (const Reducer& r : reducers) {
            if (!PolyDetail::divides(r.lead, key)) continue;
            const Key cand = PolyDetail::sub(key, r.lead);
            if ((cand.hi & r.pmask.hi) || (cand.lo & r.pmask.lo)) continue;
            hit = &r;
            t = cand;
            break;
        }
        if (!hit) {
            if (std::getenv("SPHF_STATS")) {
                std::fprintf(stderr, "stuck: |n|=%zu |d|=%zu P=%zu emitted=%zu key=[",
                             nt.size(), PolyDetail::terms(d).size(), pvars.size(), q.size());
                const int nv = static_cast<int>(n.ring()->names.size());
                for (int v = 0; v < nv; ++v)
                    std::fprintf(stderr, "%d%s", PolyDetail::exponent(key, v),
                                 v + 1 == nv ? "" : " ");
                std::fprintf(stderr, "]\n");
                for (const Reducer& r : reducers) {
                    std::fprintf(stderr, "  reducer S=[");
                    for (int v = 0; v < nv; ++v)
                        std::fprintf(stderr, "%d", PolyDetail::exponent(r.offset, v));
                    std::fprintf(stderr, "] lead=[");
                    for (int v = 0; v < nv; ++v)
                        std::fprintf(stderr, "%d%s", PolyDetail::exponent(r.lead, v),
                                     v + 1 == nv ? "" : " ");
                    std::fprintf(stderr, "] div=%d\n", PolyDetail::divides(r.lead, key) ? 1 : 0);
                }
            }
            return std::nullopt;
        }
        q.push_back({t, c / hit->lc,
                     static_cast<std::uint32_t>(hit - reducers.data())});
        // The product against the reducer's leading term cancels here by
        // construction, so the stream starts one position below it.
        if (hit->terms.size() >= 2)
            push({PolyDetail::checked_add(t, hit->terms[hit->terms.size() - 2].first),
                  static_cast<std::uint32_t>(q.size() - 1),
                  static_cast<std::uint32_t>(hit->terms.size() - 2)});
    }
    // Quotient contribution of an emission against p_S * elim[T] is
    // (t + offset) * factor[T]; group by chain so each factor multiplies once.
    std::vector<Terms> grouped(nsub);
    for (Emit& e : q)
        grouped[reducers[e.s].chain].emplace_back(
            PolyDetail::checked_add(e.t, reducers[e.s].offset), std::move(e.c));
    Poly result = PolyDetail::make(n.ring(), Terms{});
    for (std::size_t t = 0; t < nsub; ++t) {
        if (grouped[t].empty()) continue;
        std::sort(grouped[t].begin(), grouped[t].end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Poly part = PolyDetail::make(n.ring(), std::move(grouped[t]));
        if (t != 0) part *= factor[t];
        result += part;
    }
    return result;
}

std::optional<Poly> quotient_heap_divide(const Poly& num, const Poly& div) {
    try {
        return quotient_heap_divide_impl(num, div);
    } catch (const ResourceCap&) {
        // A norm blowup only disables this route; the caller falls back.
        return std::nullopt;
    }
}

struct QdivStats {
    long xonly_ok = 0, xonly_fail = 0, quot_ok = 0, quot_fail = 0, rat_ok = 0, rat_fail = 0;
    double quot_seconds = 0, rat_seconds = 0;
    ~QdivStats() {
        if (!std::getenv("SPHF_STATS")) return;
        std::fprintf(stderr,
                     "qdiv: x-only %ld ok / %ld fail, quotient %ld ok / %ld fail (%.2fs), "
                     "rationalized %ld ok / %ld fail (%.2fs)\n",
                     xonly_ok, xonly_fail, quot_ok, quot_fail, quot_seconds, rat_ok, rat_fail,
                     rat_seconds);
    }
};
QdivStats g_qdiv_stats;

struct SecondsInto {
    double& sink;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    ~SecondsInto() {
        sink += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Division in the ring where p^2 = H holds. Free long division cannot see
// quotients whose existence needs that relation. When the divisor's leading
// monomial is p-free, division in the quotient ring itself is complete.
// Otherwise the divisor is rationalized: multiplying both sides by the
// p-conjugate removes one p-variable per pass ((a+bp)(a-bp) = a^2-b^2*H)
// until free long division applies; a quotient found through the rescaled
// instance is verified back.
std::optional<Poly> quotient_exact_divide(const Poly& num, const Poly& div) {
    const std::vector<int> ps = p_vars_in(div);
    if (ps.empty()) {
        // An x-only divisor never forms p-squares, so free long division
        // decides divisibility componentwise over the p-monomials.
        auto q = exact_divide(num, div);
        ++(q ? g_qdiv_stats.xonly_ok : g_qdiv_stats.xonly_fail);
        return q;
    }
    // Try the direct quotient-ring division first; when it gets stuck,
    // conjugate one p-variable at a time ((a+bp)(a-bp) = a^2-b^2*H removes
    // p from the divisor) and retry, so the numerator-side products stay as
    // small as possible. Conjugation can rescale by a zero divisor, so any
    // quotient found after rescaling is verified against the original pair.
    Poly n = num;
    Poly d = div;
    for (int level = 0;; ++level) {
        const std::vector<int> pd = p_vars_in(d);
        std::optional<Poly> q;
        if (pd.empty()) {
            SecondsInto timer{g_qdiv_stats.rat_seconds};
            q = exact_divide(n, d);
        } else {
            SecondsInto timer{level == 0 ? g_qdiv_stats.quot_seconds : g_qdiv_stats.rat_seconds};
            q = quotient_heap_divide(n, d);
        }
        if (q && *q * div == num) {
            ++(level == 0 ? g_qdiv_stats.quot_ok : g_qdiv_stats.rat_ok);
            return q;
        }
        if (level == 0) ++g_qdiv_stats.quot_fail;
        if (pd.empty()) {
            // The x-only level is decisive: no quotient exists.
            ++g_qdiv_stats.rat_fail;
            return std::nullopt;
        }
        SecondsInto timer{g_qdiv_stats.rat_seconds};
        try {
            const Poly conj = conjugate_p(d, pd.front());
            n = n * conj;
            d = d * conj;
        } catch (const ResourceCap&) {
            ++g_qdiv_stats.rat_fail;
            return std::nullopt;  // leave the residual in place instead
        }
        if (d.is_zero()) {
            ++g_qdiv_stats.rat_fail;
            return std::nullopt;
        }
    }
}

}  // namespace

TrackedFraction::TrackedFraction(Poly num, std::shared_ptr<const AtomContext> ctx)
    : num_(std::move(num)), ctx_(std::move(ctx)) {}

Poly TrackedFraction::denominator_poly() const {
    Poly den(1L);
    for (const auto& [id, exp] : atom_den_)
        for (int e = 0; e < exp; ++e) den *= ctx_->atoms[static_cast<std::size_t>(id)];
    for (const Poly& r : residuals_) den *= r;
    return den;
}

Rat TrackedFraction::eval(const std::vector<Rat>& values) const {
    Rat den(1);
    if (ctx_)
        for (const auto& [id, exp] : atom_den_) {
            const Rat a = ctx_->atoms[static_cast<std::size_t>(id)].eval(values);
            for (int e = 0; e < exp; ++e) den *= a;
        }
    for (const Poly& r : residuals_) den *= r.eval(values);
    if (den.is_zero()) throw ZeroDenominator("denominator vanishes at the evaluation point");
    return num_.eval(values) / den;
}

std::string TrackedFraction::str() const {
    std::string out = num_.str();
    if (atom_den_.empty() && residuals_.empty()) return out;
    out = "(" + out + ") / (";
    bool first = true;
    for (const auto& [id, exp] : atom_den_) {
        if (!first) out += " * ";
        first = false;
        out += ctx_ ? ctx_->atom_names[static_cast<std::size_t>(id)]
                    : "atom" + std::to_string(id);
        if (exp > 1) out += "^" + std::to_string(exp);
    }
    for (const Poly& r : residuals_) {
        if (!first) out += " * ";
        first = false;
        out += "[" + r.str() + "]";
    }
    return out + ")";
}

void TrackedFraction::harmonize(TrackedFraction& other) {
    if (ctx_ && other.ctx_) {
        if (ctx_ != other.ctx_) throw InputError("fractions belong to different atom contexts");
    } else if (ctx_) {
        other.ctx_ = ctx_;
    } else if (other.ctx_) {
        ctx_ = other.ctx_;
    }
}

void TrackedFraction::check_cap() const {
    if (!ctx_) return;
    std::size_t total = num_.term_count();
    for (const Poly& r : residuals_) total += r.term_count();
    if (total > ctx_->monomial_cap)
        throw ResourceCap("symbolic entry holds " + std::to_string(total) +
                          " monomials, over the cap of " + std::to_string(ctx_->monomial_cap));
}

void TrackedFraction::clear_residuals() {
    if (num_.is_zero()) {
        atom_den_.clear();
        residuals_.clear();
        factors_.clear();
        return;
    }
    if (!ctx_ || !ctx_->greedy_clear) return;
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto it = residuals_.begin(); it != residuals_.end();) {
            if (it->is_constant()) {
                num_ *= Rat(1) / it->constant_value();
                factors_.clear();
                it = residuals_.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
        // Cancelling atoms out of the numerator first keeps the dividends of
        // the residual divisions below as small as possible.
        for (auto it = atom_den_.begin(); it != atom_den_.end();) {
            while (it->second > 0) {
                if (auto q = exact_divide(num_, ctx_->atoms[static_cast<std::size_t>(it->first)])) {
                    num_ = std::move(*q);
                    factors_.clear();
                    --it->second;
                    progress = true;
                } else {
                    break;
                }
            }
            it = it->second == 0 ? atom_den_.erase(it) : std::next(it);
        }
        for (auto it = residuals_.begin(); it != residuals_.end();) {
            if (auto q = quotient_exact_divide(num_, *it)) {
                num_ = std::move(*q);
                factors_.clear();
                it = residuals_.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
        for (Poly& r : residuals_) {
            for (std::size_t id = 0; id < ctx_->atoms.size(); ++id) {
                if (ctx_->atoms[id].is_constant()) continue;
                while (auto q = exact_divide(r, ctx_->atoms[id])) {
                    r = std::move(*q);
                    ++atom_den_[static_cast<int>(id)];
                    progress = true;
                }
            }
        }
    }
}

TrackedFraction TrackedFraction::operator-() const {
    TrackedFraction out = *this;
    out.num_ = -out.num_;
    out.factors_.clear();
    return out;
}

TrackedFraction& TrackedFraction::operator+=(const TrackedFraction& o) {
    TrackedFraction other = o;
    harmonize(other);
    std::map<int, int> den;
    for (const auto& [id, e] : atom_den_) den[id] = e;
    for (const auto& [id, e] : other.atom_den_) den[id] = std::max(den[id], e);
    Poly left = num_;
    Poly right = other.num_;
    if (ctx_)
        for (const auto& [id, e] : den) {
            const Poly& atom = ctx_->atoms[static_cast<std::size_t>(id)];
            auto mine = atom_den_.find(id);
            auto theirs = other.atom_den_.find(id);
            const int el = mine == atom_den_.end() ? 0 : mine->second;
            const int er = theirs == other.atom_den_.end() ? 0 : theirs->second;
            for (int k = el; k < e; ++k) left *= atom;
            for (int k = er; k < e; ++k) right *= atom;
        }
    for (const Poly& r : other.residuals_) left *= r;
    for (const Poly& r : residuals_) right *= r;
    num_ = left + right;
    factors_.clear();
    atom_den_ = std::move(den);
    residuals_.insert(residuals_.end(), other.residuals_.begin(), other.residuals_.end());
    clear_residuals();
    check_cap();
    return *this;
}

TrackedFraction& TrackedFraction::operator-=(const TrackedFraction& o) { return *this += -o; }

TrackedFraction& TrackedFraction::operator*=(const TrackedFraction& o) {
    TrackedFraction other = o;
    harmonize(other);
    std::vector<Poly> combined;
    if (factors_.empty())
        combined.push_back(num_);
    else
        combined = std::move(factors_);
    if (other.factors_.empty())
        combined.push_back(other.num_);
    else
        combined.insert(combined.end(), other.factors_.begin(), other.factors_.end());
    num_ *= other.num_;
    factors_ = std::move(combined);
    if (factors_.size() > 16) factors_.clear();
    for (const auto& [id, e] : other.atom_den_) atom_den_[id] += e;
    residuals_.insert(residuals_.end(), other.residuals_.begin(), other.residuals_.end());
    clear_residuals();
    check_cap();
    return *this;
}

TrackedFraction& TrackedFraction::operator/=(const TrackedFraction& o) {
    TrackedFraction other = o;
    harmonize(other);
    if (other.is_zero()) throw ZeroDenominator("division by a zero symbolic entry");
    // The divisor's denominator joins our numerator. Its atom part cancels
    // against our own atom ledger first so the numerator stays small.
    for (const auto& [id, e] : other.atom_den_) {
        int remaining = e;
        auto mine = atom_den_.find(id);
        if (mine != atom_den_.end()) {
            const int cancel = std::min(mine->second, remaining);
            mine->second -= cancel;
            remaining -= cancel;
            if (mine->second == 0) atom_den_.erase(mine);
        }
        if (remaining > 0) {
            const Poly& atom = ctx_->atoms[static_cast<std::size_t>(id)];
            for (int k = 0; k < remaining; ++k) num_ *= atom;
            factors_.clear();
        }
    }
    for (const Poly& r : other.residuals_) {
        num_ *= r;
        factors_.clear();
    }
    if (other.factors_.empty()) {
        if (other.num_.is_constant())
            num_ *= Rat(1) / other.num_.constant_value();
        else
            residuals_.push_back(other.num_);
    } else {
        for (const Poly& f : other.factors_) {
            if (f.is_constant())
                num_ *= Rat(1) / f.constant_value();
            else
                residuals_.push_back(f);
        }
    }
    clear_residuals();
    check_cap();
    return *this;
}

bool operator==(const TrackedFraction& a, const TrackedFraction& b) {
    TrackedFraction x = a;
    TrackedFraction y = b;
    x.harmonize(y);
    return x.num_ * y.denominator_poly() == y.num_ * x.denominator_poly();
}

const TrackedFraction& SymbolicFrieze::at(const FriezeIndex& idx) const {
    auto it = values.find(idx);
    if (it == values.end()) throw OutsideWindow("no stored value at " + idx.str());
    return it->second;
}

Rat SymbolicFrieze::eval_at(const FriezeIndex& idx, const std::vector<Rat>& vals) const {
    return at(idx).eval(vals);
}

namespace {

using TF = TrackedFraction;

// Symbolic mirror of the numeric propagation engine: same completion rules
// over the tracked-fraction scalar, redundant Heron checks skipped (entries
// satisfy them identically by construction).
class SymbolicBuilder {
  public:
    SymbolicBuilder(int n, TF K, long wlo, long whi)
        : n_(n), K_(std::move(K)), wlo_(wlo), whi_(whi) {}

    void put(const FriezeIndex& idx, const TF& v) {
        auto [it, inserted] = vals_.emplace(idx, v);
        if (inserted) progress_ = true;
    }
    void put_ne(long i, const TF& v) {
        if (ne_.emplace(i, v).second) progress_ = true;
    }
    void put_se(long j, const TF& v) {
        if (se_.emplace(j, v).second) progress_ = true;
    }

    void seed_boundary() {
        for (long i = wlo_; i <= whi_; ++i) {
            put(node_index(i, i), TF(0));
            put(node_index(i, i + n_), TF(0));
            put(se_mid_index(i, i), TF(0));
            put(se_mid_index(i, i + n_ - 1), TF(0));
            put(ne_mid_index(i, i + 1), TF(0));
            put(ne_mid_index(i, i + n_), TF(0));
        }
    }

    void run() {
        do {
            progress_ = false;
            for (long i = wlo_; i <= whi_; ++i) sync_column(i);
            for (long i = wlo_; i < whi_; ++i)
                for (int h = 1; h <= n_ - 1; ++h) try_diamond(i, i + h);
        } while (progress_);
    }

    SymbolicFrieze finish(long lo, long hi) const {
        SymbolicFrieze f;
        f.n = n_;
        f.lo = lo;
        f.hi = hi;
        for (long i = lo; i <= hi; ++i) {
            for (long j = i; j <= i + n_; ++j) emit(f, node_index(i, j));
            for (long j = i + 1; j <= i + n_; ++j) emit(f, ne_mid_index(i, j));
            for (long j = i; j <= i + n_ - 1; ++j) emit(f, se_mid_index(i, j));
        }
        for (long i = lo - 1; i <= hi; ++i) {
            auto it = ne_.find(i);
            if (it == ne_.end())
                throw ValidationFailure("propagation could not determine NE line " +
                                        std::to_string(i));
            f.ne_lines.emplace(i, it->second);
        }
        for (long j = lo; j <= hi + n_ - 1; ++j) {
            auto it = se_.find(j);
            if (it == se_.end())
                throw ValidationFailure("propagation could not determine SE line " +
                                        std::to_string(j));
            f.se_lines.emplace(j, it->second);
        }
        return f;
    }

  private:
    void emit(SymbolicFrieze& f, const FriezeIndex& idx) const {
        auto it = vals_.find(idx);
        if (it == vals_.end())
            throw ValidationFailure("propagation could not determine " + idx.str());
        f.values.emplace(idx, it->second);
    }

    const TF* find(const FriezeIndex& idx) const {
        auto it = vals_.find(idx);
        return it == vals_.end() ? nullptr : &it->second;
    }
    const TF* find_ne(long i) const {
        auto it = ne_.find(i);
        return it == ne_.end() ? nullptr : &it->second;
    }
    const TF* find_se(long j) const {
        auto it = se_.find(j);
        return it == se_.end() ? nullptr : &it->second;
    }

    void sync3(const FriezeIndex& node, long ne_label, long se_label) {
        const TF* v = find(node);
        const TF* a = find_ne(ne_label);
        const TF* b = find_se(se_label);
        const TF* known = v ? v : (a ? a : b);
        if (!known) return;
        const TF val = *known;
        put(node, val);
        put_ne(ne_label, val);
        put_se(se_label, val);
    }

    void sync_column(long i) {
        sync3(node_index(i, i + 1), i, i);
        sync3(node_index(i, i + n_ - 1), i - 1, i + n_ - 1);
    }

    void store_all(long i, long j, const HeronianDiamond<TF>& out) {
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
        const TF* a = find(node_index(i, j + 1));
        const TF* b = find_ne(i);
        const TF* c = find(node_index(i + 1, j));
        const TF* d = find_se(j);
        const TF* e = find(node_index(i, j));
        const TF* f = find(node_index(i + 1, j + 1));
        const TF* p = find(ne_mid_index(i, j));
        const TF* q = find(se_mid_index(i, j));
        const TF* r = find(ne_mid_index(i, j + 1));
        const TF* s = find(se_mid_index(i + 1, j));
        PropagateOptions opts;
        opts.skip_checks = true;
        if (h == 1) {
            if (a && d && e && q && !(f && r)) {
                HeronianDiamond<TF> in;
                in.a = *a;
                in.d = *d;
                in.e = *e;
                in.q = *q;
                store_all(i, j,
                          propagate_degenerate(DegeneratePattern::BottomRowZero,
                                               Direction::LeftToRight, in, K_, opts));
            }
            if (a && b && f && r && !(e && q)) {
                HeronianDiamond<TF> in;
                in.a = *a;
                in.b = *b;
                in.f = *f;
                in.r = *r;
                store_all(i, j,
                          propagate_degenerate(DegeneratePattern::BottomRowZero,
                                               Direction::RightToLeft, in, K_, opts));
            }
        } else if (h == n_ - 1) {
            if (b && c && e && p && !(f && s)) {
                HeronianDiamond<TF> in;
                in.b = *b;
                in.c = *c;
                in.e = *e;
                in.p = *p;
                store_all(i, j,
                          propagate_degenerate(DegeneratePattern::TopRowZero,
                                               Direction::LeftToRight, in, K_, opts));
            }
            if (c && d && f && s && !(e && p)) {
                HeronianDiamond<TF> in;
                in.c = *c;
                in.d = *d;
                in.f = *f;
                in.s = *s;
                store_all(i, j,
                          propagate_degenerate(DegeneratePattern::TopRowZero,
                                               Direction::RightToLeft, in, K_, opts));
            }
        } else {
            if (a && b && c && d && e && p && q && !(f && r && s)) {
                RightHalf<TF> rh = propagate_lr(*a, *b, *c, *d, *e, *p, *q, K_, opts);
                put(node_index(i + 1, j + 1), rh.f);
                put(ne_mid_index(i, j + 1), rh.r);
                put(se_mid_index(i + 1, j), rh.s);
            }
            if (a && b && c && d && f && r && s && !(e && p && q)) {
                LeftHalf<TF> lh = propagate_rl(*a, *b, *c, *d, *f, *r, *s, K_, opts);
                put(node_index(i, j), lh.e);
                put(ne_mid_index(i, j), lh.p);
                put(se_mid_index(i, j), lh.q);
            }
        }
    }

    int n_;
    TF K_;
    long wlo_, whi_;
    std::map<FriezeIndex, TF> vals_;
    std::map<long, TF> ne_, se_;
    bool progress_ = false;
};

}  // namespace

SymbolicFrieze symbolic_propagate(int n, const Rat& K, const std::vector<bool>& nw_steps,
                                  const SymbolicOptions& options) {
    if (n < 4 || n > 6) throw InputError("symbolic propagation supports orders 4 to 6");
    if (static_cast<int>(nw_steps.size()) != n - 2)
        throw MalformedPath("a traversing path of order " + std::to_string(n) + " takes " +
                            std::to_string(n - 2) + " steps");
    const long lo = options.lo.value_or(-1);
    const long hi = options.hi.value_or(n - 1);
    if (lo > hi) throw InputError("window lower bound exceeds upper bound");

    struct MidVar {
        FriezeIndex idx;
        FriezeIndex below;  // path node before the step
        FriezeIndex above;  // path node after the step
        bool ne;
        long line;
    };
    std::vector<FriezeIndex> nodes;
    std::vector<MidVar> mids;
    long pi = 0, pj = 1;
    nodes.push_back(node_index(pi, pj));
    for (bool nw : nw_steps) {
        const FriezeIndex prev = node_index(pi, pj);
        if (nw) {
            mids.push_back({ne_mid_index(pi - 1, pj), prev, node_index(pi - 1, pj), true, pi - 1});
            --pi;
        } else {
            mids.push_back({se_mid_index(pi, pj), prev, node_index(pi, pj + 1), false, pj});
            ++pj;
        }
        nodes.push_back(node_index(pi, pj));
    }

    const auto node_name = [](const FriezeIndex& idx) {
        return "x(" + std::to_string(idx.I / 2) + "," + std::to_string(idx.J / 2) + ")";
    };
    const auto side_name = [](long t) {
        return "x(" + std::to_string(t) + "," + std::to_string(t + 1) + ")";
    };

    std::vector<std::string> x_names, p_names;
    std::map<FriezeIndex, int> node_var;
    for (const FriezeIndex& idx : nodes) {
        node_var[idx] = static_cast<int>(x_names.size());
        x_names.push_back(node_name(idx));
    }
    std::map<long, int> ne_var, se_var;
    for (const MidVar& m : mids) {
        (m.ne ? ne_var : se_var)[m.line] = static_cast<int>(x_names.size());
        x_names.push_back(side_name(m.line));
    }
    for (const MidVar& m : mids) {
        const long a = m.ne ? m.line : m.below.I / 2;
        const long b = m.ne ? m.line + 1 : m.below.J / 2;
        const long c = m.ne ? m.below.J / 2 : m.line + 1;
        p_names.push_back("p(" + std::to_string(a) + "," + std::to_string(b) + "," +
                          std::to_string(c) + ")");
    }

    auto ring = make_ring(std::move(x_names), std::move(p_names));
    const Poly Kp(K);
    for (std::size_t t = 0; t < mids.size(); ++t) {
        const MidVar& m = mids[t];
        const Poly va = Poly::variable(ring, node_var.at(m.below));
        const Poly vb = Poly::variable(ring, node_var.at(m.above));
        const Poly vl = Poly::variable(ring, (m.ne ? ne_var : se_var).at(m.line));
        set_p_square(*ring, static_cast<int>(t), heron_K(va, vb, vl, Kp));
    }

    auto ctx = std::make_shared<AtomContext>();
    ctx->greedy_clear = options.greedy_clear;
    ctx->monomial_cap = options.monomial_cap;
    const Rat quarter_K = K / Rat(4);
    for (const FriezeIndex& idx : nodes) {
        const long h = (idx.J - idx.I) / 2;
        if (h < 2 || h > n - 2) continue;
        const int v = node_var.at(idx);
        ctx->atoms.push_back(Poly::variable(ring, v));
        ctx->atom_names.push_back(ring->names[static_cast<std::size_t>(v)]);
        if (!K.is_zero()) {
            ctx->atoms.push_back(Poly(1L) - Poly(quarter_K) * Poly::variable(ring, v));
            ctx->atom_names.push_back("1-(K/4)" + ring->names[static_cast<std::size_t>(v)]);
        }
    }

    const long wlo = std::min(lo, nodes.back().column());
    const long whi = std::max(hi, nodes.front().column()) + 1;
    SymbolicBuilder b(n, TF(K), wlo, whi);
    b.seed_boundary();
    for (const FriezeIndex& idx : nodes)
        b.put(idx, TF(Poly::variable(ring, node_var.at(idx)), ctx));
    for (const MidVar& m : mids) {
        const int pv = ring->n_x + static_cast<int>(&m - mids.data());
        b.put(m.idx, TF(Poly::variable(ring, pv), ctx));
        const TF line(Poly::variable(ring, (m.ne ? ne_var : se_var).at(m.line)), ctx);
        if (m.ne)
            b.put_ne(m.line, line);
        else
            b.put_se(m.line, line);
    }
    b.run();

    SymbolicFrieze f = b.finish(lo, hi);
    f.K = K;
    f.ring = ring;
    f.atoms = ctx;
    return f;
}

LaurentReport laurent_verify(int n, const Rat& K, const std::vector<bool>& nw_steps,
                             const SymbolicOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const SymbolicFrieze f = symbolic_propagate(n, K, nw_steps, options);
    LaurentReport rep;
    rep.n = n;
    rep.curvature = K;
    rep.all_clean = true;
    for (const auto& [idx, tf] : f.values) {
        LaurentEntry e;
        e.idx = idx;
        e.clean = tf.clean();
        for (const auto& [id, exp] : tf.atom_denominator())
            e.atom_exponents[f.atoms->atom_names[static_cast<std::size_t>(id)]] = exp;
        for (const Poly& r : tf.residual_denominators()) {
            e.residuals.push_back(r.str());
            rep.worst_residual_degree = std::max(rep.worst_residual_degree, r.total_degree());
        }
        if (!e.clean) rep.all_clean = false;
        rep.entries.push_back(std::move(e));
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::string LaurentReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["curvature"] = curvature.str();
    j["all_clean"] = all_clean;
    j["worst_residual_degree"] = worst_residual_degree;
    j["seconds"] = seconds;
    j["entries"] = nlohmann::json::array();
    for (const LaurentEntry& e : entries) {
        nlohmann::json je;
        je["index"] = e.idx.str();
        je["status"] = e.clean ? "clean" : "residual";
        je["atom_exponents"] = nlohmann::json::object();
        for (const auto& [name, exp] : e.atom_exponents) je["atom_exponents"][name] = exp;
        je["residuals"] = e.residuals;
        j["entries"].push_back(std::move(je));
    }
    return j.dump(2);
}

}  // namespace sphf
