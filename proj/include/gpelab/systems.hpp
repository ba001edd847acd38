#pragma once

// Named builtin exchange systems used by the CLI and the test suites.

#include "gpelab/gpe.hpp"

#include <functional>
#include <map>
#include <string>

namespace gpe {

// 2x2 grid of quadrants, every piece the identity.
inline GpeSystem make_identity_grid() {
    const Rational h = rat(1, 2);
    PolygonPartition part;
    part.space = ConvexPolygon::rectangle(0, 0, 1, 1);
    part.atoms = {ConvexPolygon::rectangle(0, 0, h, h), ConvexPolygon::rectangle(h, 0, 1, h),
                  ConvexPolygon::rectangle(0, h, h, 1), ConvexPolygon::rectangle(h, h, 1, 1)};
    std::vector<AffineMap> maps(4, AffineMap::identity());
    return GpeSystem(std::move(part), std::move(maps), Flavor::Euclidean);
}

// Circle rotation by 3/5 as a two-strip exchange: widths (2/5, 3/5).
inline GpeSystem make_rotation2() {
    const ConvexPolygon space = ConvexPolygon::rectangle(0, 0, 1, 1);
    return make_rectangle_exchange(
        space, {{rat(0), rat(0), rat(2, 5), rat(1), Point{rat(3, 5), rat(0)}},
                {rat(2, 5), rat(0), rat(1), rat(1), Point{rat(-2, 5), rat(0)}}});
}

// Three-strip presentation of the rotation by 4/5: widths (1/5, 2/5, 2/5).
inline GpeSystem make_rectangle3() {
    const ConvexPolygon space = ConvexPolygon::rectangle(0, 0, 1, 1);
    return make_rectangle_exchange(
        space, {{rat(0), rat(0), rat(1, 5), rat(1), Point{rat(4, 5), rat(0)}},
                {rat(1, 5), rat(0), rat(3, 5), rat(1), Point{rat(-1, 5), rat(0)}},
                {rat(3, 5), rat(0), rat(1), rat(1), Point{rat(-1, 5), rat(0)}}});
}

// Non-measure-preserving two-strip affine exchange: piece determinants 1/2
// and 3/2, joint images still tile the square.
inline GpeSystem make_affine2() {
    PolygonPartition part;
    part.space = ConvexPolygon::rectangle(0, 0, 1, 1);
    part.atoms = {ConvexPolygon::rectangle(0, 0, rat(1, 2), 1),
                  ConvexPolygon::rectangle(rat(1, 2), 0, 1, 1)};
    std::vector<AffineMap> maps;
    maps.emplace_back(rat(1, 2), rat(0), rat(0), rat(1), Point{rat(0), rat(0)});
    maps.emplace_back(rat(3, 2), rat(0), rat(0), rat(1), Point{rat(-1, 2), rat(0)});
    return make_affine_exchange(std::move(part), std::move(maps));
}

// Quarter-turn about the center cycling the four quadrants: (x,y) -> (1-y, x).
inline GpeSystem make_euclid4() {
    const Rational h = rat(1, 2);
    PolygonPartition part;
    part.space = ConvexPolygon::rectangle(0, 0, 1, 1);
    part.atoms = {ConvexPolygon::rectangle(0, 0, h, h), ConvexPolygon::rectangle(h, 0, 1, h),
                  ConvexPolygon::rectangle(h, h, 1, 1), ConvexPolygon::rectangle(0, h, h, 1)};
    std::vector<AffineMap> maps(
        4, AffineMap(rat(0), rat(-1), rat(1), rat(0), Point{rat(1), rat(0)}));
    return make_euclidean_exchange(std::move(part), std::move(maps));
}

// Each strip reflected across its own vertical midline (det = -1 pieces).
inline GpeSystem make_mirror2() {
    PolygonPartition part;
    part.space = ConvexPolygon::rectangle(0, 0, 1, 1);
    part.atoms = {ConvexPolygon::rectangle(0, 0, rat(1, 2), 1),
                  ConvexPolygon::rectangle(rat(1, 2), 0, 1, 1)};
    std::vector<AffineMap> maps;
    maps.emplace_back(rat(-1), rat(0), rat(0), rat(1), Point{rat(1, 2), rat(0)});
    maps.emplace_back(rat(-1), rat(0), rat(0), rat(1), Point{rat(3, 2), rat(0)});
    return make_euclidean_exchange(std::move(part), std::move(maps));
}

inline const std::map<std::string, std::function<GpeSystem()>>& builtin_systems() {
    static const std::map<std::string, std::function<GpeSystem()>> reg = {
        {"baker", make_baker},         {"identity4", make_identity_grid},
        {"rotation2", make_rotation2}, {"rectangle3", make_rectangle3},
        {"affine2", make_affine2},     {"euclid4", make_euclid4},
        {"mirror2", make_mirror2},
    };
    return reg;
}

} // namespace gpe
