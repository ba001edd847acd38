#pragma once

// GPE description files.  Whitespace-separated tokens, '#' comments to end
// of line, all numbers exact rationals in canonical lowest-terms form.
//
//   gpe 1
//   flavor affine|euclidean
//   space <k> <x y>*k
//   atoms <n>
//   atom <k> <x y>*k          (n times, each followed by its map)
//   map <a b c d> <tx ty>     (linear row-major, then translation)
//
// parse(print(g)) restores g bit-exactly; print(parse(f)) == f for files
// produced by print.

#include "gpelab/gpe.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

class TokenStream {
  public:
    explicit TokenStream(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens_.push_back(tok);
        }
    }

    std::string next(const char* what) {
        if (pos_ >= tokens_.size())
            throw ParseError(std::string("unexpected end of file, expected ") + what);
        return tokens_[pos_++];
    }
    void expect(const std::string& word) {
        std::string t = next(word.c_str());
        if (t != word) throw ParseError("expected '" + word + "', got '" + t + "'");
    }
    Rational rational(const char* what) {
        std::string t = next(what);
        try {
            return parse_rational(t);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }
    unsigned long count(const char* what) {
        std::string t = next(what);
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("bad count for ") + what + ": " + t);
        }
    }
    bool exhausted() const { return pos_ == tokens_.size(); }

  private:
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

inline ConvexPolygon parse_polygon(TokenStream& ts, const char* what) {
    unsigned long k = ts.count(what);
    if (k < 3) throw ParseError(std::string(what) + " needs at least 3 vertices");
    std::vector<Point> verts;
    verts.reserve(k);
    for (unsigned long i = 0; i < k; ++i) {
        Rational x = ts.rational("vertex x");
        Rational y = ts.rational("vertex y");
        verts.emplace_back(std::move(x), std::move(y));
    }
    std::optional<ConvexPolygon> poly;
    try {
        poly = ConvexPolygon::make(std::move(verts));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
    if (!poly) throw ParseError(std::string(what) + " is degenerate");
    return *poly;
}

} // namespace detail

inline GpeSystem parse_gpe(std::istream& in) {
    detail::TokenStream ts(in);
    ts.expect("gpe");
    if (ts.next("format version") != "1") throw ParseError("unsupported gpe format version");
    ts.expect("flavor");
    std::string flavor_word = ts.next("flavor value");
    Flavor flavor;
    if (flavor_word == "affine")
        flavor = Flavor::Affine;
    else if (flavor_word == "euclidean")
        flavor = Flavor::Euclidean;
    else
        throw ParseError("unknown flavor: " + flavor_word);

    ts.expect("space");
    PolygonPartition part;
    part.space = detail::parse_polygon(ts, "space");
    ts.expect("atoms");
    unsigned long n = ts.count("atom count");
    if (n == 0) throw ParseError("gpe needs at least one atom");
    std::vector<AffineMap> maps;
    for (unsigned long i = 0; i < n; ++i) {
        ts.expect("atom");
        part.atoms.push_back(detail::parse_polygon(ts, "atom"));
        ts.expect("map");
        Rational a = ts.rational("map a"), b = ts.rational("map b");
        Rational c = ts.rational("map c"), d = ts.rational("map d");
        Rational tx = ts.rational("map tx"), ty = ts.rational("map ty");
        try {
            maps.emplace_back(std::move(a), std::move(b), std::move(c), std::move(d),
                              Point{std::move(tx), std::move(ty)});
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("map ") + std::to_string(i) + ": " + e.what());
        }
    }
    if (!ts.exhausted()) throw ParseError("trailing tokens after last map");
    return GpeSystem(std::move(part), std::move(maps), flavor);
}

inline GpeSystem parse_gpe_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open gpe file: " + path);
    return parse_gpe(in);
}

inline void print_gpe(std::ostream& os, const GpeSystem& g) {
    auto put_polygon = [&os](const ConvexPolygon& poly) {
        os << poly.size();
        for (const Point& p : poly.vertices())
            os << "  " << rational_to_string(p.x) << " " << rational_to_string(p.y);
        os << "\n";
    };
    os << "gpe 1\n";
    os << "flavor " << flavor_name(g.flavor()) << "\n";
    os << "space ";
    put_polygon(g.space());
    os << "atoms " << g.atom_count() << "\n";
    for (std::size_t i = 0; i < g.atom_count(); ++i) {
        os << "atom ";
        put_polygon(g.source().atoms[i]);
        const AffineMap& m = g.piece_maps()[i];
        os << "map " << rational_to_string(m.linear[0]) << " " << rational_to_string(m.linear[1])
           << " " << rational_to_string(m.linear[2]) << " " << rational_to_string(m.linear[3])
           << "  " << rational_to_string(m.translation.x) << " "
           << rational_to_string(m.translation.y) << "\n";
    }
}

inline std::string gpe_to_string(const GpeSystem& g) {
    std::ostringstream os;
    print_gpe(os, g);
    return os.str();
}

} // namespace gpe
