#pragma once

// Generalized polygon exchanges T : (X,P) -> (X,Q).  The source partition and
// the per-atom invertible affine maps are the defining data; the target
// partition is always derived as Q_i = T_i(P_i) and then validated.

#include "gpelab/geometry.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

struct PolygonPartition {
    ConvexPolygon space;
    std::vector<ConvexPolygon> atoms;
};

enum class Flavor { Affine, Euclidean };

inline const char* flavor_name(Flavor f) {
    return f == Flavor::Euclidean ? "euclidean" : "affine";
}

struct Violation {
    enum class Code {
        AtomOutsideSpace,
        SourceInteriorOverlap,
        TargetInteriorOverlap,
        SourceAreaDeficit,
        TargetAreaDeficit,
        NonInvertibleMap,
        NonOrthogonalMap,
        EdgeLengthChanged,
        TargetAtomOutsideSpace,
        EmptyPartition,
    };
    Code code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const {
        if (ok()) return "valid";
        std::ostringstream os;
        for (const auto& v : violations) os << v.message << "\n";
        return os.str();
    }
};

namespace detail {

inline void check_partition(const PolygonPartition& part, bool target, ValidationReport& report) {
    const char* which = target ? "target" : "source";
    if (part.atoms.empty()) {
        report.violations.push_back({Violation::Code::EmptyPartition,
                                     std::string(which) + " partition has no atoms"});
        return;
    }
    Rational covered(0);
    for (std::size_t i = 0; i < part.atoms.size(); ++i) {
        covered += part.atoms[i].area();
        auto inter = intersect_convex(part.atoms[i], part.space);
        if (!inter || inter->area() != part.atoms[i].area()) {
            auto code = target ? Violation::Code::TargetAtomOutsideSpace
                               : Violation::Code::AtomOutsideSpace;
            report.violations.push_back(
                {code, std::string(which) + " atom " + std::to_string(i) + " outside space"});
        }
        for (std::size_t j = i + 1; j < part.atoms.size(); ++j) {
            if (intersect_convex(part.atoms[i], part.atoms[j])) {
                auto code = target ? Violation::Code::TargetInteriorOverlap
                                   : Violation::Code::SourceInteriorOverlap;
                report.violations.push_back({code, std::string(which) + " interior overlap: atoms " +
                                                       std::to_string(i) + "," + std::to_string(j)});
            }
        }
    }
    if (covered != part.space.area()) {
        auto code =
            target ? Violation::Code::TargetAreaDeficit : Violation::Code::SourceAreaDeficit;
        report.violations.push_back(
            {code, std::string(which) + " atom areas sum to " + rational_to_string(covered) +
                       ", space area is " + rational_to_string(part.space.area())});
    }
}

} // namespace detail

// Exact area-additivity partition test: atoms inside the space, pairwise
// interior-disjoint, areas summing to the space area.
inline ValidationReport validate_partition(const PolygonPartition& part, bool target = false) {
    ValidationReport report;
    detail::check_partition(part, target, report);
    return report;
}

class GpeSystem {
  public:
    GpeSystem(PolygonPartition source, std::vector<AffineMap> piece_maps,
              Flavor flavor = Flavor::Affine)
        : source_(std::move(source)), maps_(std::move(piece_maps)), flavor_(flavor) {
        if (maps_.size() != source_.atoms.size())
            throw std::invalid_argument("one piece map per atom required");
        target_.space = source_.space;
        target_.atoms.reserve(maps_.size());
        for (std::size_t i = 0; i < maps_.size(); ++i)
            target_.atoms.push_back(apply_affine(maps_[i], source_.atoms[i]));
    }

    const PolygonPartition& source() const { return source_; }
    const PolygonPartition& target() const { return target_; }
    const ConvexPolygon& space() const { return source_.space; }
    const std::vector<AffineMap>& piece_maps() const { return maps_; }
    std::size_t atom_count() const { return source_.atoms.size(); }
    Flavor flavor() const { return flavor_; }

    ValidationReport validate() const {
        ValidationReport report;
        detail::check_partition(source_, false, report);
        detail::check_partition(target_, true, report);
        if (flavor_ == Flavor::Euclidean) {
            for (std::size_t i = 0; i < maps_.size(); ++i) {
                if (!maps_[i].orthogonal_linear()) {
                    report.violations.push_back(
                        {Violation::Code::NonOrthogonalMap,
                         "piece map " + std::to_string(i) + " is not a Euclidean isometry"});
                    continue;
                }
                // Isometries preserve every edge length exactly; compare
                // squared lengths so the check stays in rational arithmetic.
                const auto& atom = source_.atoms[i];
                for (std::size_t e = 0; e < atom.size(); ++e) {
                    Rational before = squared_distance(atom.vertex(e), atom.vertex(e + 1));
                    Rational after = squared_distance(maps_[i](atom.vertex(e)),
                                                      maps_[i](atom.vertex(e + 1)));
                    if (before != after) {
                        report.violations.push_back(
                            {Violation::Code::EdgeLengthChanged,
                             "piece map " + std::to_string(i) + " changed an edge length"});
                        break;
                    }
                }
            }
        }
        return report;
    }

    GpeSystem inverse() const {
        PolygonPartition inv_source = target_;
        std::vector<AffineMap> inv_maps;
        inv_maps.reserve(maps_.size());
        for (const auto& m : maps_) inv_maps.push_back(m.inverse());
        return GpeSystem(std::move(inv_source), std::move(inv_maps), flavor_);
    }

    // Index of the atom holding p strictly inside, if any.
    std::optional<std::size_t> locate(const Point& p) const {
        for (std::size_t i = 0; i < source_.atoms.size(); ++i)
            if (source_.atoms[i].contains_interior(p)) return i;
        return std::nullopt;
    }

  private:
    PolygonPartition source_;
    PolygonPartition target_;
    std::vector<AffineMap> maps_;
    Flavor flavor_;
};

// ---------------------------------------------------------------------------
// Orbits.  Iterates are defined only while the point stays off the partition
// boundary; a boundary point stops the orbit with SingularHit.

struct OrbitResult {
    std::vector<Point> points;          // x, Tx, ..., up to the last defined iterate
    std::vector<std::size_t> itinerary; // atom index used at each successful step
    std::optional<std::size_t> singular_step;

    bool regular() const { return !singular_step.has_value(); }
};

inline OrbitResult evaluate(const GpeSystem& g, const Point& x, std::size_t steps) {
    if (!g.space().contains(x)) throw std::invalid_argument("point outside the space");
    OrbitResult orbit;
    orbit.points.push_back(x);
    Point cur = x;
    for (std::size_t k = 0; k < steps; ++k) {
        auto atom = g.locate(cur);
        if (!atom) {
            orbit.singular_step = k;
            return orbit;
        }
        cur = g.piece_maps()[*atom](cur);
        orbit.itinerary.push_back(*atom);
        orbit.points.push_back(cur);
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// Builtin families.

// Two vertical strips split at x = 1/2; (2x, y/2) and (2x-1, y/2+1/2).
inline GpeSystem make_baker() {
    PolygonPartition part;
    part.space = ConvexPolygon::rectangle(0, 0, 1, 1);
    part.atoms = {ConvexPolygon::rectangle(0, 0, rat(1, 2), 1),
                  ConvexPolygon::rectangle(rat(1, 2), 0, 1, 1)};
    std::vector<AffineMap> maps;
    maps.emplace_back(rat(2), rat(0), rat(0), rat(1, 2), Point{rat(0), rat(0)});
    maps.emplace_back(rat(2), rat(0), rat(0), rat(1, 2), Point{rat(-1), rat(1, 2)});
    return GpeSystem(std::move(part), std::move(maps));
}

struct RectangleSpec {
    Rational x0, y0, x1, y1;
    Point translation;
};

// Axis-parallel rectangles moved by translations; throws on non-partitions.
inline GpeSystem make_rectangle_exchange(const ConvexPolygon& space,
                                         const std::vector<RectangleSpec>& strips) {
    PolygonPartition part;
    part.space = space;
    std::vector<AffineMap> maps;
    for (const auto& s : strips) {
        part.atoms.push_back(ConvexPolygon::rectangle(s.x0, s.y0, s.x1, s.y1));
        maps.push_back(AffineMap::translate(s.translation));
    }
    GpeSystem g(std::move(part), std::move(maps), Flavor::Euclidean);
    auto report = g.validate();
    if (!report.ok()) throw std::invalid_argument("not a rectangle exchange:\n" + report.to_string());
    return g;
}

inline GpeSystem make_affine_exchange(PolygonPartition partition, std::vector<AffineMap> maps) {
    GpeSystem g(std::move(partition), std::move(maps), Flavor::Affine);
    auto report = g.validate();
    if (!report.ok()) throw std::invalid_argument("not an affine exchange:\n" + report.to_string());
    return g;
}

// Requires every linear part orthogonal (rational rotations / reflections).
inline GpeSystem make_euclidean_exchange(PolygonPartition partition, std::vector<AffineMap> maps) {
    for (std::size_t i = 0; i < maps.size(); ++i)
        if (!maps[i].orthogonal_linear())
            throw std::invalid_argument("piece map " + std::to_string(i) +
                                        " is not a Euclidean isometry");
    GpeSystem g(std::move(partition), std::move(maps), Flavor::Euclidean);
    auto report = g.validate();
    if (!report.ok())
        throw std::invalid_argument("not a Euclidean exchange:\n" + report.to_string());
    return g;
}

} // namespace gpe
