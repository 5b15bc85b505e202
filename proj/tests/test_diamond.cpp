#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "euclidean_oracle.hpp"
#include "hexagon_fixture.hpp"
#include "sphfrieze/diamond.hpp"
#include "sphfrieze/geometry.hpp"

using namespace sphf;

namespace {

const Rat K49(1, 49);

HeronianDiamond<Rat> master_diamond() {
    return {Rat(14), Rat(70), Rat(74), Rat(98), Rat(56),
            Rat(50), Rat(-84), Rat(28), Rat(42), Rat(-82)};
}

CayleyMengerDiamond master_cm() {
    return {Rat(14), Rat(70), Rat(74), Rat(98), Rat(56), Rat(50)};
}

HeronianDiamond<Rat> diamond_from_points(const SpherePoint<Rat>& p1, const SpherePoint<Rat>& p2,
                                         const SpherePoint<Rat>& p3, const SpherePoint<Rat>& p4) {
    HeronianDiamond<Rat> d;
    d.a = sq_dist(p1, p4);
    d.b = sq_dist(p1, p2);
    d.c = sq_dist(p2, p3);
    d.d = sq_dist(p3, p4);
    d.e = sq_dist(p1, p3);
    d.f = sq_dist(p2, p4);
    d.p = s_kappa(p1, p2, p3);
    d.q = s_kappa(p1, p3, p4);
    d.r = s_kappa(p1, p2, p4);
    d.s = s_kappa(p2, p3, p4);
    return d;
}

HeronianDiamond<Rat> diamond_from_plane(const euclid::PlanePoint& p1, const euclid::PlanePoint& p2,
                                        const euclid::PlanePoint& p3,
                                        const euclid::PlanePoint& p4) {
    HeronianDiamond<Rat> d;
    d.a = euclid::sq_dist(p1, p4);
    d.b = euclid::sq_dist(p1, p2);
    d.c = euclid::sq_dist(p2, p3);
    d.d = euclid::sq_dist(p3, p4);
    d.e = euclid::sq_dist(p1, p3);
    d.f = euclid::sq_dist(p2, p4);
    d.p = euclid::four_area(p1, p2, p3);
    d.q = euclid::four_area(p1, p3, p4);
    d.r = euclid::four_area(p1, p2, p4);
    d.s = euclid::four_area(p2, p3, p4);
    return d;
}

bool corner_ok(const Rat& v, const Rat& K) {
    return !v.is_zero() && !(Rat(1) - K * v / Rat(4)).is_zero();
}

HeronianDiamond<Rat> random_sphere_diamond(std::mt19937_64& rng, const SphereConfig& cfg) {
    for (;;) {
        const auto p1 = random_rational_sphere_point(rng(), cfg);
        const auto p2 = random_rational_sphere_point(rng(), cfg);
        const auto p3 = random_rational_sphere_point(rng(), cfg);
        const auto p4 = random_rational_sphere_point(rng(), cfg);
        HeronianDiamond<Rat> d = diamond_from_points(p1, p2, p3, p4);
        if (corner_ok(d.e, cfg.K) && corner_ok(d.f, cfg.K)) return d;
    }
}

CayleyMengerDiamond cm_part(const HeronianDiamond<Rat>& d) {
    return {d.a, d.b, d.c, d.d, d.e, d.f};
}

// Central difference of the bordered determinant; exact because the
// determinant is quadratic in every entry.
Rat oracle_partial(PartialDir dir, const CayleyMengerDiamond& d, const Rat& K) {
    auto table = [](const CayleyMengerDiamond& cm) {
        return std::vector<std::vector<Rat>>{{Rat(0), cm.b, cm.e, cm.a},
                                             {cm.b, Rat(0), cm.c, cm.f},
                                             {cm.e, cm.c, Rat(0), cm.d},
                                             {cm.a, cm.f, cm.d, Rat(0)}};
    };
    auto entry = [](CayleyMengerDiamond& cm, PartialDir dir) -> Rat& {
        switch (dir) {
            case PartialDir::Left: return cm.e;
            case PartialDir::Right: return cm.f;
            case PartialDir::Up: return cm.a;
            case PartialDir::Down: return cm.c;
            case PartialDir::DiagUp: return cm.b;
            default: return cm.d;
        }
    };
    const Rat h(1, 7);
    CayleyMengerDiamond plus = d;
    CayleyMengerDiamond minus = d;
    entry(plus, dir) += h;
    entry(minus, dir) -= h;
    return (euclid::bordered_det(table(plus), K) - euclid::bordered_det(table(minus), K)) /
           (Rat(2) * h);
}

struct CoherenceBlock {
    CayleyMengerDiamond x1, x2, x3, x4;
};

CoherenceBlock block_from_points(const std::array<SpherePoint<Rat>, 6>& p) {
    auto cm = [&](int i, int j, int k, int l) {
        return cm_part(diamond_from_points(p[i - 1], p[j - 1], p[k - 1], p[l - 1]));
    };
    return {cm(1, 2, 4, 5), cm(1, 2, 5, 6), cm(2, 3, 4, 5), cm(2, 3, 5, 6)};
}

}  // namespace

TEST_CASE("Heron polynomial values") {
    CHECK(heron_K(Rat(70), Rat(74), Rat(56), K49) == Rat(7056));
    CHECK(heron_K(Rat(14), Rat(98), Rat(56), K49) == Rat(784));
    CHECK(heron_K(Rat(14), Rat(70), Rat(50), K49) == Rat(1764));
    CHECK(heron_K(Rat(74), Rat(98), Rat(50), K49) == Rat(6724));
    // Symmetric in all three arguments.
    CHECK(heron_K(Rat(56), Rat(70), Rat(74), K49) == Rat(7056));
}

TEST_CASE("diamond equation report") {
    CHECK(heronian_check(master_diamond(), K49).ok());

    HeronianDiamond<Rat> bad = master_diamond();
    bad.f = Rat(51);
    const auto report = heronian_check(bad, K49);
    CHECK(!report.ok());
    CHECK(report.residuals[0].is_zero());
    CHECK(!report.residuals[2].is_zero());
}

TEST_CASE("rightward completion") {
    const auto got = propagate_lr(Rat(14), Rat(70), Rat(74), Rat(98), Rat(56), Rat(-84),
                                  Rat(28), K49);
    CHECK(got.f == Rat(50));
    CHECK(got.r == Rat(42));
    CHECK(got.s == Rat(-82));

    CHECK_THROWS_AS(propagate_lr(Rat(14), Rat(70), Rat(74), Rat(98), Rat(56), Rat(-84),
                                 Rat(29), K49),
                    HeronViolation);
    CHECK_THROWS_AS(propagate_lr(Rat(14), Rat(70), Rat(74), Rat(98), Rat(0), Rat(0), Rat(0),
                                 K49),
                    DegenerateDiagonal);
    CHECK_THROWS_AS(propagate_lr(Rat(14), Rat(70), Rat(74), Rat(98), Rat(196), Rat(0), Rat(0),
                                 K49),
                    DegenerateDiagonal);
}

TEST_CASE("leftward completion") {
    const auto got = propagate_rl(Rat(14), Rat(70), Rat(74), Rat(98), Rat(50), Rat(42),
                                  Rat(-82), K49);
    CHECK(got.e == Rat(56));
    CHECK(got.p == Rat(-84));
    CHECK(got.q == Rat(28));
}

TEST_CASE("reflections") {
    const auto d = master_diamond();
    const auto v = flip_vertical(d);
    CHECK(v.a == d.c);
    CHECK(v.b == d.d);
    CHECK(v.e == d.e);
    CHECK(v.p == d.q);
    CHECK(v.s == d.r);
    CHECK(heronian_check(v, K49).ok());
    const auto vv = flip_vertical(v);
    CHECK(vv.a == d.a);
    CHECK(vv.p == d.p);

    const auto h = flip_horizontal(d, K49);
    CHECK(h.e == d.f);
    CHECK(h.b == d.d);
    CHECK(h.p == d.s);
    CHECK(h.q == d.r);
    CHECK(heronian_check(h, K49).ok());
    const auto hh = flip_horizontal(h, K49);
    CHECK(hh.e == d.e);
    CHECK(hh.p == d.p);

    HeronianDiamond<Rat> degenerate = d;
    degenerate.e = Rat(0);
    CHECK_THROWS_AS(flip_horizontal(degenerate, K49), DegenerateDiagonal);
    degenerate.e = Rat(196);
    CHECK_THROWS_AS(flip_horizontal(degenerate, K49), DegenerateDiagonal);
}

TEST_CASE("degenerate completions") {
    HeronianDiamond<Rat> in;
    in.b = Rat(70);
    in.c = Rat(74);
    in.e = Rat(56);
    in.p = Rat(-84);
    const auto top_lr =
        propagate_degenerate(DegeneratePattern::TopRowZero, Direction::LeftToRight, in, K49);
    CHECK(top_lr.d == Rat(56));
    CHECK(top_lr.f == Rat(70));
    CHECK(top_lr.s == Rat(-84));
    CHECK(top_lr.a.is_zero());
    CHECK(top_lr.q.is_zero());
    CHECK(top_lr.r.is_zero());
    CHECK(heronian_check(top_lr, K49).ok());

    HeronianDiamond<Rat> back;
    back.c = Rat(74);
    back.d = Rat(56);
    back.f = Rat(70);
    back.s = Rat(-84);
    const auto top_rl =
        propagate_degenerate(DegeneratePattern::TopRowZero, Direction::RightToLeft, back, K49);
    CHECK(top_rl.b == Rat(70));
    CHECK(top_rl.e == Rat(56));
    CHECK(top_rl.p == Rat(-84));
    CHECK(heronian_check(top_rl, K49).ok());

    HeronianDiamond<Rat> bottom;
    bottom.a = Rat(56);
    bottom.d = Rat(74);
    bottom.e = Rat(70);
    bottom.q = Rat(-84);
    const auto bot_lr = propagate_degenerate(DegeneratePattern::BottomRowZero,
                                             Direction::LeftToRight, bottom, K49);
    CHECK(bot_lr.b == Rat(70));
    CHECK(bot_lr.f == Rat(74));
    CHECK(bot_lr.r == Rat(-84));
    CHECK(bot_lr.c.is_zero());
    CHECK(heronian_check(bot_lr, K49).ok());

    HeronianDiamond<Rat> bottom_back;
    bottom_back.a = Rat(56);
    bottom_back.b = Rat(70);
    bottom_back.f = Rat(74);
    bottom_back.r = Rat(-84);
    const auto bot_rl = propagate_degenerate(DegeneratePattern::BottomRowZero,
                                             Direction::RightToLeft, bottom_back, K49);
    CHECK(bot_rl.e == Rat(70));
    CHECK(bot_rl.d == Rat(74));
    CHECK(bot_rl.q == Rat(-84));
    CHECK(heronian_check(bot_rl, K49).ok());

    in.p = Rat(1);
    CHECK_THROWS_AS(
        propagate_degenerate(DegeneratePattern::TopRowZero, Direction::LeftToRight, in, K49),
        HeronViolation);
}

TEST_CASE("random point quadruples satisfy the diamond equations") {
    std::mt19937_64 rng(1001);
    const SphereConfig cfgs[] = {SphereConfig::from_radius(Rat(7)),
                                 SphereConfig::from_curvature(Rat(1, 2)),
                                 SphereConfig::from_curvature(Rat(3))};
    for (int i = 0; i < 500; ++i) {
        const SphereConfig& cfg = cfgs[i % 3];
        const auto d = diamond_from_points(random_rational_sphere_point(rng(), cfg),
                                           random_rational_sphere_point(rng(), cfg),
                                           random_rational_sphere_point(rng(), cfg),
                                           random_rational_sphere_point(rng(), cfg));
        CHECK(heronian_check(d, cfg.K).ok());
    }
}

TEST_CASE("midpoint sum identities") {
    std::mt19937_64 rng(1002);
    const SphereConfig cfg = SphereConfig::from_radius(Rat(7));
    const Rat K = cfg.K;
    for (int i = 0; i < 500; ++i) {
        const auto d = random_sphere_diamond(rng, cfg);
        const Rat gap = d.p + d.q - d.r - d.s;
        const Rat half_K = K / Rat(2);
        CHECK(gap == half_K * (d.a * d.p + d.b * d.q - d.e * d.r));
        CHECK(gap == half_K * (d.f * d.p - d.c * d.r - d.b * d.s));
        CHECK(gap == half_K * (d.d * d.p + d.c * d.q - d.e * d.s));
        CHECK(gap == half_K * (d.f * d.q - d.d * d.r - d.a * d.s));
    }
}

TEST_CASE("curvature-free midpoint relations") {
    std::mt19937_64 rng(1003);
    const SphereConfig cfg = SphereConfig::from_curvature(Rat(1, 2));
    for (int i = 0; i < 500; ++i) {
        const auto d = random_sphere_diamond(rng, cfg);
        CHECK(d.a * (d.p + d.s) == d.q * (d.f - d.b) + d.r * (d.e - d.d));
        CHECK(d.b * (d.s + d.q) == d.p * (d.f - d.a) + d.r * (d.e - d.c));
        CHECK(d.c * (d.q + d.r) == d.p * (d.f - d.d) + d.s * (d.e - d.b));
        CHECK(d.d * (d.r + d.p) == d.q * (d.f - d.c) + d.s * (d.e - d.a));
        CHECK(d.e * (d.r - d.s) == d.p * (d.a - d.d) + d.q * (d.b - d.c));
        CHECK(d.f * (d.p - d.q) == d.r * (d.c - d.d) + d.s * (d.b - d.a));
    }
}

TEST_CASE("quadrilateral product identities") {
    std::mt19937_64 rng(1004);
    const SphereConfig cfg = SphereConfig::from_radius(Rat(7));
    const Rat K = cfg.K;
    for (int i = 0; i < 500; ++i) {
        const auto d = random_sphere_diamond(rng, cfg);
        const Rat sides = d.a - d.b + d.c - d.d;
        CHECK(Rat(4) * d.e * d.f * (Rat(1) - K * d.e / Rat(4)) ==
              (d.p + d.q) * (d.p + d.q) + sides * sides -
                  K * d.e * (d.a - d.b) * (d.c - d.d));
        CHECK(Rat(4) * d.e * d.f * (Rat(1) - K * d.f / Rat(4)) ==
              (d.r + d.s) * (d.r + d.s) + sides * sides -
                  K * d.f * (d.a - d.d) * (d.c - d.b));
        CHECK(d.a * d.b - d.a * d.c - d.b * d.d + d.c * d.d - d.a * d.e - d.b * d.e -
                  d.c * d.e - d.d * d.e + d.e * d.e + Rat(2) * d.e * d.f +
                  K / Rat(2) * (d.a * d.c * d.e + d.b * d.d * d.e - d.e * d.e * d.f) ==
              d.p * d.q);
    }
}

TEST_CASE("completion round trips") {
    std::mt19937_64 rng(1005);
    const SphereConfig cfg = SphereConfig::from_radius(Rat(7));
    for (int i = 0; i < 200; ++i) {
        const auto d = random_sphere_diamond(rng, cfg);
        const auto right = propagate_lr(d.a, d.b, d.c, d.d, d.e, d.p, d.q, cfg.K);
        CHECK(right.f == d.f);
        CHECK(right.r == d.r);
        CHECK(right.s == d.s);
        const auto left = propagate_rl(d.a, d.b, d.c, d.d, d.f, d.r, d.s, cfg.K);
        CHECK(left.e == d.e);
        CHECK(left.p == d.p);
        CHECK(left.q == d.q);
    }
}

TEST_CASE("bordered determinant") {
    const std::vector<std::vector<Rat>> triangle{{Rat(0), Rat(70), Rat(56)},
                                                 {Rat(70), Rat(0), Rat(74)},
                                                 {Rat(56), Rat(74), Rat(0)}};
    CHECK(scm_det(triangle, K49) == Rat(-7056));

    CHECK(scm_det(master_cm(), K49).is_zero());
    CayleyMengerDiamond off = master_cm();
    off.f = Rat(51);
    CHECK(!scm_det(off, K49).is_zero());

    const auto& p = hexfix::points();
    std::vector<std::vector<Rat>> five(5, std::vector<Rat>(5, Rat(0)));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) five[i][j] = sq_dist(p[i], p[j]);
    CHECK(scm_det(five, K49).is_zero());

    using Table = std::vector<std::vector<Rat>>;
    const Table too_small{{Rat(0)}};
    CHECK_THROWS_AS(scm_det(too_small, K49), InvalidMeasurementTable);
    const Table asymmetric{{Rat(0), Rat(1), Rat(2)},
                           {Rat(1), Rat(0), Rat(3)},
                           {Rat(9), Rat(3), Rat(0)}};
    CHECK_THROWS_AS(scm_det(asymmetric, K49), InvalidMeasurementTable);
    const Table diag{{Rat(1), Rat(1), Rat(2)},
                     {Rat(1), Rat(0), Rat(3)},
                     {Rat(2), Rat(3), Rat(0)}};
    CHECK_THROWS_AS(scm_det(diag, K49), InvalidMeasurementTable);
    const Table two_by_two{{Rat(0), Rat(1)}, {Rat(1), Rat(0)}};
    CHECK_THROWS_AS(scm_det(two_by_two, K49), InvalidMeasurementTable);
}

TEST_CASE("determinant partial derivatives") {
    CHECK(scm_partial(PartialDir::Right, master_cm(), K49) == Rat(4704));

    std::mt19937_64 rng(1006);
    std::uniform_int_distribution<long> num(-50, 50);
    std::uniform_int_distribution<long> den(1, 9);
    const PartialDir dirs[] = {PartialDir::Left,   PartialDir::Right,  PartialDir::Up,
                               PartialDir::Down,   PartialDir::DiagUp, PartialDir::DiagDown};
    for (int i = 0; i < 200; ++i) {
        const CayleyMengerDiamond cm{Rat(num(rng), den(rng)), Rat(num(rng), den(rng)),
                                     Rat(num(rng), den(rng)), Rat(num(rng), den(rng)),
                                     Rat(num(rng), den(rng)), Rat(num(rng), den(rng))};
        const Rat K = i % 2 == 0 ? K49 : Rat(0);
        for (const PartialDir dir : dirs)
            CHECK(scm_partial(dir, cm, K) == oracle_partial(dir, cm, K));
        // The squared horizontal partials against the determinant itself.
        const Rat M = scm_det(cm, K);
        const Rat right = scm_partial(PartialDir::Right, cm, K);
        CHECK(right * right == Rat(-8) * cm.e * (Rat(1) - K * cm.e / Rat(4)) * M +
                                   Rat(4) * heron_K(cm.b, cm.c, cm.e, K) *
                                       heron_K(cm.a, cm.d, cm.e, K));
        const Rat left = scm_partial(PartialDir::Left, cm, K);
        CHECK(left * left == Rat(-8) * cm.f * (Rat(1) - K * cm.f / Rat(4)) * M +
                                 Rat(4) * heron_K(cm.a, cm.b, cm.f, K) *
                                     heron_K(cm.c, cm.d, cm.f, K));
    }
}

TEST_CASE("partials of a midpoint-bearing diamond factor into products") {
    std::mt19937_64 rng(1007);
    const SphereConfig cfg = SphereConfig::from_radius(Rat(7));
    for (int i = 0; i < 200; ++i) {
        const auto d = random_sphere_diamond(rng, cfg);
        const auto cm = cm_part(d);
        CHECK(scm_partial(PartialDir::Left, cm, cfg.K) == Rat(-2) * d.r * d.s);
        CHECK(scm_partial(PartialDir::Right, cm, cfg.K) == Rat(-2) * d.p * d.q);
        CHECK(scm_partial(PartialDir::DiagUp, cm, cfg.K) == Rat(2) * d.q * d.s);
        CHECK(scm_partial(PartialDir::DiagDown, cm, cfg.K) == Rat(2) * d.p * d.r);
        CHECK(scm_partial(PartialDir::Up, cm, cfg.K) == Rat(2) * d.p * d.s);
        CHECK(scm_partial(PartialDir::Down, cm, cfg.K) == Rat(2) * d.r * d.q);
    }
}

TEST_CASE("cospherical check") {
    CHECK(cm_check(master_cm(), K49));
    CayleyMengerDiamond off = master_cm();
    off.a = Rat(15);
    CHECK(!cm_check(off, K49));
}

TEST_CASE("forgetting midpoints") {
    CHECK(restrict_to_cm(master_diamond(), K49) == master_cm());

    HeronianDiamond<Rat> bad = master_diamond();
    bad.p = Rat(84);
    CHECK_THROWS_AS(restrict_to_cm(bad, K49), HeronViolation);

    // A valid diamond whose horizontal corners are both degenerate: the
    // third point repeats the first and the fourth is antipodal to the
    // second, so e = 0 and f = 4/K.
    const HeronianDiamond<Rat> pinched{Rat(126), Rat(70), Rat(70),   Rat(126), Rat(0),
                                       Rat(196), Rat(0),  Rat(0),    Rat(0),   Rat(0)};
    CHECK(heronian_check(pinched, K49).ok());
    CHECK_THROWS_AS(restrict_to_cm(pinched, K49), DegenerateDiagonal);
}

TEST_CASE("reconstructing midpoints") {
    const auto minus = lift_to_heronian(master_cm(), K49, -1);
    CHECK(minus.p == Rat(-84));
    CHECK(minus.q == Rat(28));
    CHECK(minus.r == Rat(42));
    CHECK(minus.s == Rat(-82));

    const auto plus = lift_to_heronian(master_cm(), K49, 1);
    CHECK(plus.p == Rat(84));
    CHECK(plus.q == Rat(-28));
    CHECK(plus.r == Rat(-42));
    CHECK(plus.s == Rat(82));

    CayleyMengerDiamond off = master_cm();
    off.a = Rat(15);
    CHECK_THROWS_AS(lift_to_heronian(off, K49, 1), InvalidMeasurementTable);
    CHECK_THROWS_AS(lift_to_heronian(master_cm(), K49, 0), InputError);

    // Regular tetrahedron: cospherical, but the midpoints are irrational.
    const Rat t(392, 3);
    const CayleyMengerDiamond tetra{t, t, t, t, t, t};
    REQUIRE(cm_check(tetra, K49));
    CHECK_THROWS_AS(lift_to_heronian(tetra, K49, 1), ExactSqrtUnavailable);

    // A vanishing triangle value leaves the lift underdetermined.
    const auto& p = hexfix::points();
    const auto degenerate = cm_part(diamond_from_points(p[0], p[1], p[2], p[2]));
    CHECK_THROWS_AS(lift_to_heronian(degenerate, K49, 1), DegenerateDiagonal);
}

TEST_CASE("midpoint reconstruction round trips") {
    std::mt19937_64 rng(1008);
    const SphereConfig cfgs[] = {SphereConfig::from_radius(Rat(7)),
                                 SphereConfig::from_curvature(Rat(1, 2))};
    int done = 0;
    for (int i = 0; i < 500 && done < 300; ++i) {
        const SphereConfig& cfg = cfgs[i % 2];
        const auto d = random_sphere_diamond(rng, cfg);
        if (d.p.is_zero() || d.q.is_zero() || d.r.is_zero() || d.s.is_zero()) continue;
        const auto cm = restrict_to_cm(d, cfg.K);
        const auto again = lift_to_heronian(cm, cfg.K, d.p.sign());
        CHECK(again.p == d.p);
        CHECK(again.q == d.q);
        CHECK(again.r == d.r);
        CHECK(again.s == d.s);
        const auto flipped = lift_to_heronian(cm, cfg.K, -d.p.sign());
        CHECK(flipped.p == -d.p);
        CHECK(flipped.q == -d.q);
        CHECK(flipped.r == -d.r);
        CHECK(flipped.s == -d.s);
        ++done;
    }
    CHECK(done == 300);
}

TEST_CASE("coherence of interlocking diamonds") {
    const auto& p = hexfix::points();
    const auto block =
        block_from_points({p[0], p[1], p[2], p[3], p[4], p[5]});
    CHECK(block.x1 == CayleyMengerDiamond{Rat(126), Rat(70), Rat(50), Rat(74), Rat(14), Rat(52)});
    CHECK(block.x2 == CayleyMengerDiamond{Rat(140), Rat(70), Rat(52), Rat(26), Rat(126), Rat(26)});
    CHECK(block.x3 == CayleyMengerDiamond{Rat(52), Rat(74), Rat(98), Rat(74), Rat(50), Rat(170)});
    CHECK(block.x4 == CayleyMengerDiamond{Rat(26), Rat(74), Rat(170), Rat(26), Rat(52), Rat(116)});
    CHECK(coherence_check(block.x1, block.x2, block.x3, block.x4, K49));

    auto broken = block;
    broken.x2.b = Rat(71);
    CHECK_THROWS_AS(coherence_check(broken.x1, broken.x2, broken.x3, broken.x4, K49),
                    InterlockMismatch);

    CHECK(coherence_solve(SolveSide::Right, block.x1, block.x2, block.x3, K49) == Rat(116));
    CHECK(coherence_solve(SolveSide::Left, block.x2, block.x3, block.x4, K49) == Rat(14));

    CHECK_THROWS_AS(coherence_solve(SolveSide::Right, broken.x1, broken.x2, broken.x3, K49),
                    InterlockMismatch);
    auto warped = block;
    warped.x1.e = Rat(15);
    CHECK_THROWS_AS(coherence_solve(SolveSide::Right, warped.x1, warped.x2, warped.x3, K49),
                    InvalidMeasurementTable);

    // Coincident points put the shared center at zero.
    const auto pinched = block_from_points({p[0], p[1], p[2], p[3], p[1], p[5]});
    CHECK_THROWS_AS(
        coherence_solve(SolveSide::Right, pinched.x1, pinched.x2, pinched.x3, K49),
        CoherencePivotZero);

    // A repeated corner collapses a triangle value, so the pivot vanishes.
    const auto flat = block_from_points({p[0], p[1], p[2], p[3], p[0], p[5]});
    CHECK_THROWS_AS(coherence_solve(SolveSide::Right, flat.x1, flat.x2, flat.x3, K49),
                    CoherencePivotZero);
}

TEST_CASE("random coherent blocks") {
    std::mt19937_64 rng(1009);
    const SphereConfig cfg = SphereConfig::from_radius(Rat(7));
    int solved = 0;
    for (int i = 0; i < 300 && solved < 200; ++i) {
        std::array<SpherePoint<Rat>, 6> pts{
            random_rational_sphere_point(rng(), cfg), random_rational_sphere_point(rng(), cfg),
            random_rational_sphere_point(rng(), cfg), random_rational_sphere_point(rng(), cfg),
            random_rational_sphere_point(rng(), cfg), random_rational_sphere_point(rng(), cfg)};
        const auto block = block_from_points(pts);
        CHECK(coherence_check(block.x1, block.x2, block.x3, block.x4, cfg.K));
        try {
            CHECK(coherence_solve(SolveSide::Right, block.x1, block.x2, block.x3, cfg.K) ==
                  block.x4.f);
            CHECK(coherence_solve(SolveSide::Left, block.x2, block.x3, block.x4, cfg.K) ==
                  block.x1.e);
            ++solved;
        } catch (const CoherencePivotZero&) {
        }
    }
    CHECK(solved == 200);
}

TEST_CASE("zero curvature against the plane oracle") {
    std::mt19937_64 rng(1010);
    const Rat K0(0);
    for (int i = 0; i < 200; ++i) {
        const auto p1 = euclid::random_point(rng);
        const auto p2 = euclid::random_point(rng);
        const auto p3 = euclid::random_point(rng);
        const auto p4 = euclid::random_point(rng);
        const auto d = diamond_from_plane(p1, p2, p3, p4);
        CHECK(heronian_check(d, K0).ok());
        CHECK(d.p * d.p == heron_K(d.b, d.c, d.e, K0));
        CHECK(scm_det(cm_part(d), K0) ==
              euclid::bordered_det(euclid::distance_table({p1, p2, p3, p4}), K0));
        CHECK(scm_det(cm_part(d), K0).is_zero());
        if (!d.e.is_zero()) {
            const auto right = propagate_lr(d.a, d.b, d.c, d.d, d.e, d.p, d.q, K0);
            CHECK(right.f == d.f);
            CHECK(right.r == d.r);
            CHECK(right.s == d.s);
        }
        if (!d.p.is_zero() && !d.q.is_zero() && !d.r.is_zero() && !d.s.is_zero()) {
            const auto cm = restrict_to_cm(d, K0);
            const auto again = lift_to_heronian(cm, K0, d.p.sign());
            CHECK(again.s == d.s);
        }
    }
}
