#include "gpelab/rational.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gpe;

TEST_CASE("rational parsing and canonical printing") {
    CHECK(parse_rational("1/2") == rat(1, 2));
    CHECK(parse_rational("-6/4") == rat(-3, 2));
    CHECK(parse_rational("7") == rat(7));
    CHECK(rational_to_string(rat(4, 2)) == "2");
    CHECK(rational_to_string(rat(-1, 3)) == "-1/3");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("parse-print round trip is exact") {
    for (const char* text : {"12345678901234567890/987654321098765432123",
                             "-3/7", "0", "1000000000000000000000000"}) {
        Rational r = parse_rational(text);
        CHECK(parse_rational(rational_to_string(r)) == r);
    }
}

TEST_CASE("sqrt enclosure handles perfect squares exactly") {
    Interval r = sqrt_enclosure(rat(9, 4));
    CHECK(r.exact());
    CHECK(r.lo == rat(3, 2));
    CHECK(sqrt_enclosure(rat(0)).exact());
}

TEST_CASE("sqrt enclosure brackets irrational roots tightly") {
    Interval r = sqrt_enclosure(rat(2));
    CHECK(r.lo * r.lo <= 2);
    CHECK(r.hi * r.hi >= 2);
    CHECK(r.width() <= rat(1, 1) / Rational(BigInt(1) << 39));
    // 1/2 scaled through: relative width still certified
    Interval big = sqrt_enclosure(rat(123456789, 7));
    CHECK(big.lo * big.lo <= rat(123456789, 7));
    CHECK(big.hi * big.hi >= rat(123456789, 7));
}

TEST_CASE("interval arithmetic") {
    Interval a(rat(1), rat(2)), b(rat(3), rat(4));
    Interval s = a + b;
    CHECK(s.lo == 4);
    CHECK(s.hi == 6);
    CHECK((rat(3) * a).hi == 6);
    CHECK(overlaps(a, Interval(rat(2), rat(5))));
    CHECK(!overlaps(a, Interval(rat(3), rat(5))));
    CHECK_THROWS_AS(Interval(rat(2), rat(1)), std::logic_error);
}

TEST_CASE("decimal rendering at 12 significant digits") {
    CHECK(to_decimal(rat(5)) == "5.00000000000e+00");
    CHECK(to_decimal(rat(0)) == "0");
    CHECK(to_decimal(rat(1, 3), 12, Round::Down) == "3.33333333333e-01");
    CHECK(to_decimal(rat(1, 3), 12, Round::Up) == "3.33333333334e-01");
    CHECK(to_decimal(rat(-1, 3), 12, Round::Down) == "-3.33333333334e-01");
    CHECK(to_decimal(rat(999999999999, 1)) == "9.99999999999e+11");
    CHECK(to_decimal(rat(1, 1000)) == "1.00000000000e-03");
    // rounding carry into a new leading digit
    CHECK(to_decimal(parse_rational("999999999999999/1000"), 12, Round::Nearest) ==
          "1.00000000000e+12");
}

TEST_CASE("log of rationals at any magnitude") {
    Rational big = Rational(BigInt(1) << 200);
    CHECK(log_rational(big) == Catch::Approx(200 * std::log(2.0)).epsilon(1e-14));
    CHECK(log_rational(rat(1)) == 0.0);
    CHECK(log_rational(rat(1, 8)) == Catch::Approx(-3 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_rational(rat(0)), std::domain_error);
}

TEST_CASE("bit length tracks the larger component") {
    CHECK(bit_length(rat(1)) == 1);
    CHECK(bit_length(Rational(BigInt(1) << 100, BigInt(3))) == 101);
}
