#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hexagon_fixture.hpp"
#include "sphfrieze/diamond.hpp"
#include "sphfrieze/errors.hpp"
#include "sphfrieze/frieze.hpp"
#include "sphfrieze/symbolic.hpp"

using namespace sphf;

namespace {

const Rat K49 = Rat(1, 49);

int res6(long m) {
    long r = m % 6;
    if (r <= 0) r += 6;
    return static_cast<int>(r);
}

Rat hx(long i, long j) { return hexfix::x(res6(i), res6(j)); }
Rat hs(long i, long j, long k) { return hexfix::s(res6(i), res6(j), res6(k)); }

// Atom exponents of a tracked fraction keyed by atom name.
std::map<std::string, int> atoms_by_name(const TrackedFraction& tf) {
    std::map<std::string, int> out;
    for (const auto& [id, exp] : tf.atom_denominator())
        out[tf.context()->atom_names[static_cast<std::size_t>(id)]] = exp;
    return out;
}

}  // namespace

TEST_CASE("polynomial arithmetic is exact and canonical") {
    auto ring = make_ring({"x", "y"});
    const Poly x = Poly::variable(ring, 0);
    const Poly y = Poly::variable(ring, 1);

    CHECK((x + Poly(1)) * (x - Poly(1)) + Poly(1) == x * x);
    CHECK((x + y) * (x - y) == x * x - y * y);
    CHECK(Poly(3) * x - x * Poly(3) == Poly());
    CHECK((x - x).is_zero());
    CHECK(Poly().is_zero());
    CHECK(Poly(5).is_constant());
    CHECK(Poly(5).constant_value() == Rat(5));
    CHECK((x * y + Poly(2)).total_degree() == 2);
    CHECK((x * x * y - x * y).term_count() == 2);

    const Poly p = x * x * y - Rat(1, 2) * y + Poly(3);
    CHECK(p.eval({Rat(2), Rat(5)}) == Rat(2) * Rat(2) * Rat(5) - Rat(5, 2) + Rat(3));
    CHECK(p.str() == "x^2*y - 1/2*y + 3");
    CHECK(Poly().str() == "0");

    const Poly other = Poly::variable(make_ring({"z"}), 0);
    CHECK_THROWS_AS(x + other, InputError);
}

TEST_CASE("p-variables square to their installed polynomials") {
    auto ring = make_ring({"a", "b", "c"}, {"p"});
    const Poly a = Poly::variable(ring, 0);
    const Poly b = Poly::variable(ring, 1);
    const Poly c = Poly::variable(ring, 2);
    const Poly p = Poly::variable(ring, 3);
    const Poly K(K49);
    const Poly H = heron_K(a, b, c, K);
    set_p_square(*ring, 0, H);

    CHECK(p * p == H);
    CHECK(p * p * p == H * p);
    CHECK((a + p) * (a - p) == a * a - H);

    // Reduction is confluent: grouping the factors differently cannot change
    // the canonical form.
    const Poly q1 = ((p * a) * p) * b;
    const Poly q2 = (p * p) * (a * b);
    CHECK(q1 == q2);
    for (const auto& [mono, coef] : q2.terms()) CHECK(mono[3] <= 1);

    CHECK_THROWS_AS(set_p_square(*ring, 1, H), InputError);
}

TEST_CASE("exact division returns the quotient exactly when it exists") {
    auto ring = make_ring({"x", "y"});
    const Poly x = Poly::variable(ring, 0);
    const Poly y = Poly::variable(ring, 1);

    auto q = exact_divide(x * x - y * y, x - y);
    REQUIRE(q.has_value());
    CHECK(*q == x + y);

    const Poly a = Poly(3) * x * x * y - Rat(1, 2) * x * y + Poly(7);
    const Poly b = x * x * x - Poly(2) * x * y * y + y - Poly(5);
    auto ab = exact_divide(a * b, b);
    REQUIRE(ab.has_value());
    CHECK(*ab == a);
    auto ba = exact_divide(a * b, a);
    REQUIRE(ba.has_value());
    CHECK(*ba == b);

    CHECK_FALSE(exact_divide(x * x + y * y, x - y).has_value());
    CHECK_FALSE(exact_divide(x, x * x).has_value());

    auto zero = exact_divide(Poly(), b);
    REQUIRE(zero.has_value());
    CHECK(zero->is_zero());
    CHECK_THROWS_AS(exact_divide(x, Poly()), ZeroDenominator);
}

TEST_CASE("tracked fractions clear their residual denominators greedily") {
    auto ring = make_ring({"x", "y"});
    const Poly x = Poly::variable(ring, 0);
    const Poly y = Poly::variable(ring, 1);
    auto ctx = std::make_shared<AtomContext>();
    ctx->atoms = {x};
    ctx->atom_names = {"x"};

    TrackedFraction a(x * x * y, ctx);
    a /= TrackedFraction(x, ctx);
    CHECK(a.clean());
    CHECK(a.atom_denominator().empty());
    CHECK(a.numerator() == x * y);

    TrackedFraction b(y, ctx);
    b /= TrackedFraction(x, ctx);
    CHECK(b.clean());
    CHECK(atoms_by_name(b) == std::map<std::string, int>{{"x", 1}});
    CHECK(b.numerator() == y);
    CHECK(b.eval({Rat(3), Rat(6)}) == Rat(2));
    CHECK_THROWS_AS(b.eval({Rat(0), Rat(6)}), ZeroDenominator);

    // y/x * x = y again: the atom exponent cancels against the numerator.
    TrackedFraction c = b * TrackedFraction(x, ctx);
    CHECK(c.atom_denominator().empty());
    CHECK(c.numerator() == y);
    CHECK(c == TrackedFraction(y, ctx));

    TrackedFraction d(x + y, ctx);
    d /= TrackedFraction(Poly(4), ctx);
    CHECK(d.clean());
    CHECK(d.numerator() == Rat(1, 4) * x + Rat(1, 4) * y);

    CHECK_THROWS_AS(b / TrackedFraction(0), ZeroDenominator);

    // Addition brings both terms over the shared denominator.
    TrackedFraction s = b + TrackedFraction(x, ctx);
    CHECK(s.clean());
    CHECK(atoms_by_name(s) == std::map<std::string, int>{{"x", 1}});
    CHECK(s.numerator() == y + x * x);
    CHECK(s - TrackedFraction(x, ctx) == b);
}

TEST_CASE("the completed quad entry has the predicted atom denominator") {
    const SymbolicFrieze f = symbolic_propagate(4, K49, {false, true});
    REQUIRE(f.ring != nullptr);
    CHECK(f.atoms->atom_names ==
          std::vector<std::string>{"x(0,2)", "1-(K/4)x(0,2)"});

    const TrackedFraction& quad = f.at(node_index(1, 3));
    CHECK(quad.clean());
    CHECK(atoms_by_name(quad) ==
          std::map<std::string, int>{{"x(0,2)", 1}, {"1-(K/4)x(0,2)", 1}});

    for (const auto& [idx, tf] : f.values) {
        INFO(idx.str());
        CHECK(tf.clean());
    }
}

TEST_CASE("disabling greedy clearing leaves raw residual denominators") {
    SymbolicOptions opt;
    opt.greedy_clear = false;
    const SymbolicFrieze f = symbolic_propagate(4, K49, {false, true}, opt);
    const TrackedFraction& quad = f.at(node_index(1, 3));
    CHECK_FALSE(quad.clean());
    CHECK_FALSE(quad.residual_denominators().empty());
    CHECK(quad.atom_denominator().empty());
}

TEST_CASE("laurent reports are clean for small orders at both curvatures") {
    const LaurentReport r4 = laurent_verify(4, K49, {false, true});
    CHECK(r4.all_clean);
    CHECK(r4.n == 4);
    CHECK(r4.curvature == K49);
    CHECK(r4.worst_residual_degree == 0);
    CHECK_FALSE(r4.entries.empty());
    bool found = false;
    for (const LaurentEntry& e : r4.entries) {
        CHECK(e.clean);
        if (e.idx == node_index(1, 3)) {
            found = true;
            CHECK(e.atom_exponents ==
                  std::map<std::string, int>{{"x(0,2)", 1}, {"1-(K/4)x(0,2)", 1}});
        }
    }
    CHECK(found);

    CHECK(laurent_verify(4, Rat(0), {true, false}).all_clean);
    CHECK(laurent_verify(5, K49, {false, false, false}).all_clean);
    CHECK(laurent_verify(5, Rat(0), {false, true, false}).all_clean);

    const std::string json = r4.to_json();
    CHECK(json.find("\"n\": 4") != std::string::npos);
    CHECK(json.find("\"all_clean\": true") != std::string::npos);
    CHECK(json.find("\"curvature\": \"1/49\"") != std::string::npos);
    CHECK(json.find("\"status\": \"clean\"") != std::string::npos);
    CHECK(json.find("\"atom_exponents\"") != std::string::npos);
    CHECK(json.find("\"residuals\"") != std::string::npos);
}

TEST_CASE("symbolic entries specialize to the hexagon frieze") {
    const SymbolicFrieze sym = symbolic_propagate(6, K49, {false, false, false, false});
    REQUIRE(sym.ring->names ==
            std::vector<std::string>{"x(0,1)", "x(0,2)", "x(0,3)", "x(0,4)", "x(0,5)", "x(1,2)",
                                     "x(2,3)", "x(3,4)", "x(4,5)", "p(0,1,2)", "p(0,2,3)",
                                     "p(0,3,4)", "p(0,4,5)"});

    // The hexagon path through nodes (2,3)..(2,7) carries exactly these
    // values, listed in ring order.
    const std::vector<Rat> vals = {hx(2, 3),    hx(2, 4),    hx(2, 5),    hx(2, 6),   hx(2, 7),
                                   hx(3, 4),    hx(4, 5),    hx(5, 6),    hx(6, 7),   hs(2, 3, 4),
                                   hs(2, 4, 5), hs(2, 5, 6), hs(2, 6, 7)};

    const Frieze num = frieze_from_polygon(hexfix::points(), FriezeKind::Heronian, 1, 7);
    for (const auto& [idx, tf] : sym.values) {
        const FriezeIndex shifted{idx.I + 4, idx.J + 4};
        INFO(idx.str());
        CHECK(tf.eval(vals) == num.at(shifted));
    }
    for (const auto& [i, tf] : sym.ne_lines) CHECK(tf.eval(vals) == num.ne_line(i + 2));
    for (const auto& [j, tf] : sym.se_lines) CHECK(tf.eval(vals) == num.se_line(j + 2));
}

TEST_CASE("symbolic runs respect their input contracts and caps") {
    CHECK_THROWS_AS(symbolic_propagate(3, K49, {false}), InputError);
    CHECK_THROWS_AS(symbolic_propagate(7, K49, std::vector<bool>(5, false)), InputError);
    CHECK_THROWS_AS(symbolic_propagate(5, K49, {false, true}), MalformedPath);
    SymbolicOptions bad;
    bad.lo = 2;
    bad.hi = 1;
    CHECK_THROWS_AS(symbolic_propagate(4, K49, {false, true}, bad), InputError);

    SymbolicOptions tiny;
    tiny.monomial_cap = 5;
    CHECK_THROWS_AS(symbolic_propagate(4, K49, {false, true}, tiny), ResourceCap);
}
