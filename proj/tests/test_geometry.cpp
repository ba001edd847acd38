#include "gpelab/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gpe;

namespace {

ConvexPolygon unit_square() { return ConvexPolygon::rectangle(0, 0, 1, 1); }

// Random rational in [-bound, bound] with small denominator.
Rational random_rat(std::mt19937_64& rng, long bound = 4, long max_den = 12) {
    std::uniform_int_distribution<long> d(1, max_den);
    long dd = d(rng);
    std::uniform_int_distribution<long> num(-bound * dd, bound * dd);
    return rat(num(rng), dd);
}

// Random convex polygon: convex hull of a handful of rational points.
std::optional<ConvexPolygon> random_convex(std::mt19937_64& rng) {
    std::vector<Point> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({random_rat(rng), random_rat(rng)});
    // gift wrapping on exact predicates
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return std::nullopt;
    std::vector<Point> hull;
    for (int pass = 0; pass < 2; ++pass) {
        std::size_t base = hull.size();
        for (const Point& p : pts) {
            while (hull.size() >= base + 2 &&
                   orient(hull[hull.size() - 2], hull.back(), p) <= 0)
                hull.pop_back();
            hull.push_back(p);
        }
        hull.pop_back();
        if (pass == 0) std::reverse(pts.begin(), pts.end());
    }
    return ConvexPolygon::make(hull);
}

} // namespace

TEST_CASE("canonical form: ccw, lex-min start, collinear middles dropped") {
    auto p = ConvexPolygon::make({{rat(1), rat(1)}, {rat(0), rat(1)}, {rat(0), rat(0)},
                                  {rat(1, 2), rat(0)}, {rat(1), rat(0)}});
    REQUIRE(p);
    CHECK(p->size() == 4);
    CHECK(p->vertex(0) == Point{rat(0), rat(0)});
    CHECK(*p == unit_square());

    CHECK(!ConvexPolygon::make({{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(2), rat(0)}}));
    CHECK(!ConvexPolygon::make({{rat(0), rat(0)}, {rat(1), rat(1)}}));
    CHECK_THROWS_AS(ConvexPolygon::make({{rat(0), rat(0)}, {rat(2), rat(0)}, {rat(2), rat(2)},
                                         {rat(1), rat(1, 2)}, {rat(0), rat(2)}}),
                    std::invalid_argument);
}

TEST_CASE("measures of simple shapes") {
    ConvexPolygon sq = unit_square();
    CHECK(sq.area() == 1);
    CHECK(sq.perimeter().exact());
    CHECK(sq.perimeter().lo == 4);
    Interval d = sq.diameter();
    CHECK(d.lo * d.lo <= 2);
    CHECK(d.hi * d.hi >= 2);

    auto tri = ConvexPolygon::make({{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(0), rat(1)}});
    REQUIRE(tri);
    CHECK(tri->area() == rat(1, 2));

    CHECK(ConvexPolygon::rectangle(0, 0, rat(1, 2), 1).area() == rat(1, 2));
    CHECK(ConvexPolygon::rectangle(0, 0, rat(1, 2), 1).perimeter().lo == 3);
}

TEST_CASE("halfplane clipping: spec cases") {
    ConvexPolygon sq = unit_square();
    auto left = clip_halfplane(sq, {rat(1), rat(0)}, rat(1, 2));
    REQUIRE(left);
    CHECK(*left == ConvexPolygon::rectangle(0, 0, rat(1, 2), 1));

    auto all = clip_halfplane(sq, {rat(1), rat(0)}, rat(2));
    REQUIRE(all);
    CHECK(*all == sq);

    CHECK(!clip_halfplane(sq, {rat(1), rat(0)}, rat(-1)));
    CHECK(!clip_halfplane(sq, {rat(1), rat(0)}, rat(0)));  // grazing edge, zero area
    CHECK_THROWS_AS(clip_halfplane(sq, {rat(0), rat(0)}, rat(1)), std::invalid_argument);
}

TEST_CASE("convex intersection: spec cases") {
    ConvexPolygon sq = unit_square();
    ConvexPolygon shifted = ConvexPolygon::rectangle(rat(1, 2), 0, rat(3, 2), 1);
    auto inter = intersect_convex(sq, shifted);
    REQUIRE(inter);
    CHECK(*inter == ConvexPolygon::rectangle(rat(1, 2), 0, 1, 1));
    auto sym = intersect_convex(shifted, sq);
    REQUIRE(sym);
    CHECK(*sym == *inter);

    auto self = intersect_convex(sq, sq);
    REQUIRE(self);
    CHECK(*self == sq);

    CHECK(!intersect_convex(sq, ConvexPolygon::rectangle(1, 0, 2, 1)));
}

TEST_CASE("affine images: spec cases") {
    ConvexPolygon sq = unit_square();
    CHECK(apply_affine(AffineMap::identity(), sq) == sq);
    CHECK(apply_affine(AffineMap::translate({rat(1, 3), rat(0)}), sq) ==
          ConvexPolygon::rectangle(rat(1, 3), 0, rat(4, 3), 1));
    AffineMap baker_piece(rat(2), rat(0), rat(0), rat(1, 2), {rat(0), rat(0)});
    CHECK(apply_affine(baker_piece, sq) == ConvexPolygon::rectangle(0, 0, 2, rat(1, 2)));

    // Orientation renormalized under a reflection.
    AffineMap mirror(rat(-1), rat(0), rat(0), rat(1), {rat(1), rat(0)});
    CHECK(apply_affine(mirror, sq) == sq);
    CHECK_THROWS_AS(AffineMap(rat(1), rat(2), rat(2), rat(4), {rat(0), rat(0)}),
                    std::invalid_argument);
}

TEST_CASE("affine maps compose, invert and classify") {
    AffineMap rot(rat(3, 5), rat(-4, 5), rat(4, 5), rat(3, 5), {rat(1), rat(2)});
    CHECK(rot.orthogonal_linear());
    AffineMap shear(rat(1), rat(1), rat(0), rat(1), {rat(0), rat(0)});
    CHECK(!shear.orthogonal_linear());
    AffineMap id = rot.compose(rot.inverse());
    CHECK(id == AffineMap::identity());
    Point p{rat(1, 3), rat(2, 7)};
    CHECK(rot.inverse()(rot(p)) == p);
}

TEST_CASE("property: clip idempotence and area additivity") {
    std::mt19937_64 rng(0x5eed0001);
    int done = 0;
    while (done < 300) {
        auto poly = random_convex(rng);
        if (!poly) continue;
        Point normal{random_rat(rng), random_rat(rng)};
        if (sign(normal.x) == 0 && sign(normal.y) == 0) continue;
        Rational off = random_rat(rng);
        auto once = clip_halfplane(*poly, normal, off);
        if (once) {
            auto twice = clip_halfplane(*once, normal, off);
            REQUIRE(twice);
            CHECK(*twice == *once);
        }
        // split by the same line: areas add exactly
        auto other = clip_halfplane(*poly, {-normal.x, -normal.y}, -off);
        Rational a = once ? once->area() : Rational(0);
        Rational b = other ? other->area() : Rational(0);
        CHECK(a + b == poly->area());
        ++done;
    }
}

TEST_CASE("property: affine images scale area by |det| exactly") {
    std::mt19937_64 rng(0x5eed0002);
    int done = 0;
    while (done < 200) {
        auto poly = random_convex(rng);
        if (!poly) continue;
        Rational a = random_rat(rng), b = random_rat(rng);
        Rational c = random_rat(rng), d = random_rat(rng);
        if (sign(a * d - b * c) == 0) continue;
        AffineMap m(a, b, c, d, {random_rat(rng), random_rat(rng)});
        ConvexPolygon img = apply_affine(m, *poly);
        CHECK(img.area() == abs(m.det()) * poly->area());
        ++done;
    }
}
