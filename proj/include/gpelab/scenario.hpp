#pragma once

// Scenario-driven orchestration: a scenario file fixes the system, depth,
// estimator window, tolerances, caps and seed, and a run writes the CSV and
// report artifacts.  Runs are deterministic: same scenario, same bytes.

#include "gpelab/billiard_report.hpp"
#include "gpelab/entropy.hpp"
#include "gpelab/gpe_io.hpp"
#include "gpelab/oracle.hpp"
#include "gpelab/systems.hpp"
#include "gpelab/unfolding.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

struct Scenario {
    enum class Kind { Exchange, Billiard };

    std::string system_name;
    Kind kind = Kind::Exchange;
    std::optional<GpeSystem> system;      // resolved at parse time
    std::optional<BilliardTable> table;

    std::size_t levels = 8;
    double window = 0.25;
    double tolerance = 1e-6;
    std::uint64_t cap_cells = 1u << 20;
    std::size_t cap_bits = 8192;
    std::uint64_t seed = 20240701;
    std::size_t samples = 16;
    std::size_t oracle_grid = 64;
    std::string out_dir = "out";
};

// Exit codes for the CLI; spec'd distinct failures.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kParseError = 2,
    kValidationFailed = 3,
    kResourceCap = 4,
    kInternalError = 5,
};

inline Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
    Scenario sc;
    std::string line;
    if (!std::getline(in, line) || line != "scenario 1")
        throw ParseError("scenario file must start with 'scenario 1'");
    bool have_system = false;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto rest = [&ls, &key, lineno]() {
            std::string v;
            if (!(ls >> v))
                throw ParseError("missing value for '" + key + "' on line " +
                                 std::to_string(lineno));
            return v;
        };
        auto numeric = [&rest, &key, lineno]() {
            std::string v = rest();
            try {
                return std::stod(v);
            } catch (const std::exception&) {
                throw ParseError("bad numeric value for '" + key + "': " + v);
            }
        };
        if (key == "system") {
            std::string name = rest();
            have_system = true;
            sc.system_name = name;
            if (name == "gpe" || name == "billiard") {
                std::string path_word;
                if (!(ls >> path_word)) throw ParseError("'" + name + "' needs a file path");
                std::filesystem::path p = base_dir / path_word;
                if (!std::filesystem::exists(p))
                    throw ParseError("system file not found: " + p.string());
                if (name == "gpe") {
                    sc.kind = Scenario::Kind::Exchange;
                    sc.system = parse_gpe_file(p.string());
                    sc.system_name = "gpe:" + path_word;
                } else {
                    sc.kind = Scenario::Kind::Billiard;
                    try {
                        sc.table = parse_table_file(p.string());
                    } catch (const std::exception& e) {
                        throw ParseError(e.what());
                    }
                    sc.system_name = "billiard:" + path_word;
                }
            } else if (name == "billiard-square") {
                sc.kind = Scenario::Kind::Billiard;
                sc.table = BilliardTable::unit_square();
            } else if (name == "billiard-triangle") {
                sc.kind = Scenario::Kind::Billiard;
                sc.table = BilliardTable::right_triangle();
            } else {
                auto it = builtin_systems().find(name);
                if (it == builtin_systems().end())
                    throw ParseError("unknown system: " + name);
                sc.kind = Scenario::Kind::Exchange;
                sc.system = it->second();
            }
        } else if (key == "levels") {
            sc.levels = static_cast<std::size_t>(numeric());
            if (sc.levels < 1) throw ParseError("levels must be >= 1");
        } else if (key == "window") {
            sc.window = numeric();
            if (!(sc.window > 0) || sc.window > 1) throw ParseError("window must be in (0,1]");
        } else if (key == "tol") {
            sc.tolerance = numeric();
            if (!(sc.tolerance > 0)) throw ParseError("tol must be positive");
        } else if (key == "cap_cells") {
            sc.cap_cells = static_cast<std::uint64_t>(numeric());
            if (sc.cap_cells == 0) throw ParseError("cap_cells must be positive");
        } else if (key == "cap_bits") {
            sc.cap_bits = static_cast<std::size_t>(numeric());
            if (sc.cap_bits == 0) throw ParseError("cap_bits must be positive");
        } else if (key == "seed") {
            sc.seed = static_cast<std::uint64_t>(numeric());
        } else if (key == "samples") {
            sc.samples = static_cast<std::size_t>(numeric());
            if (sc.samples == 0) throw ParseError("samples must be positive");
        } else if (key == "oracle_grid") {
            sc.oracle_grid = static_cast<std::size_t>(numeric());
            if (sc.oracle_grid < 4) throw ParseError("oracle_grid too small");
        } else if (key == "out") {
            sc.out_dir = rest();
        } else {
            throw ParseError("unknown scenario key: " + key);
        }
    }
    if (!have_system) throw ParseError("scenario is missing a 'system' line");
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    return parse_scenario(in, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Artifact generation (in-memory; run() writes them to disk).

struct ExchangeArtifacts {
    std::string levels_csv;
    std::string bounds_txt;
    std::string bounds_csv;
    std::optional<CapHit> cap;
};

inline ExchangeArtifacts build_exchange_artifacts(const Scenario& sc) {
    const GpeSystem& g = *sc.system;
    JoinOptions opts;
    opts.max_cells = sc.cap_cells;
    opts.max_coord_bits = sc.cap_bits;
    JoinRun run = join_sequence(g, sc.levels, opts);
    ExchangeArtifacts art;
    art.cap = run.cap;
    art.levels_csv = levels_csv(run);
    if (run.levels.size() >= 4) {
        auto sample = draw_regular_samples(g, sc.samples, run.levels.size(), sc.seed);
        if (!sample.empty()) {
            BoundReport report =
                check_bounds(g, run.levels.size(), sample, sc.window, sc.tolerance, opts);
            report.system_name = sc.system_name;
            art.bounds_txt = bound_report_text(report);
            art.bounds_csv = bound_report_csv(report);
        }
    }
    return art;
}

struct BilliardArtifacts {
    std::string singular_csv;
    std::string curves_dump;
    std::string evidence_txt;
};

inline BilliardArtifacts build_billiard_artifacts(const Scenario& sc) {
    const BilliardTable& t = *sc.table;
    BilliardArtifacts art;
    auto counts = count_itinerary_cells(t, sc.levels);
    SingularSetResult sing = singular_set(t, sc.levels);

    std::string csv = "n,cell_count,singular_length,length_lower_bound_flag\n";
    char buf[64];
    for (std::size_t k = 0; k < sc.levels; ++k) {
        std::snprintf(buf, sizeof(buf), "%.12g", sing.cumulative[k]);
        csv += std::to_string(k + 1) + "," + std::to_string(counts[k]) + "," + buf + "," +
               (sing.lower_bound_flag ? "1" : "0") + "\n";
    }
    art.singular_csv = std::move(csv);

    std::ostringstream dump;
    dump << "# gpelab curves 1: columns s theta, blocks: curve <id> generation <g> side <i> "
            "vertex <v> samples <k>\n";
    for (std::size_t id = 0; id < sing.pieces.size(); ++id) {
        const auto& piece = sing.pieces[id];
        dump << "curve " << id << " generation " << piece.generation << " side " << piece.side
             << " vertex " << piece.vertex << " samples " << piece.samples.size() << "\n";
        for (const PhasePoint& p : piece.samples) {
            std::snprintf(buf, sizeof(buf), "%.12g %.12g", p.s, p.theta);
            dump << buf << "\n";
        }
    }
    art.curves_dump = dump.str();
    art.evidence_txt = as_gpe_report(t).to_text();
    return art;
}

// ---------------------------------------------------------------------------

struct RunOutcome {
    int exit_code = kOk;
    std::string message;
    std::vector<std::string> written;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

inline RunOutcome run_scenario(const Scenario& sc) {
    RunOutcome outcome;
    std::filesystem::path dir(sc.out_dir);
    std::filesystem::create_directories(dir);
    if (sc.kind == Scenario::Kind::Exchange) {
        auto report = sc.system->validate();
        if (!report.ok()) {
            outcome.exit_code = kValidationFailed;
            outcome.message = "validation failed:\n" + report.to_string();
            return outcome;
        }
        ExchangeArtifacts art = build_exchange_artifacts(sc);
        write_file(dir / "levels.csv", art.levels_csv);
        outcome.written.push_back((dir / "levels.csv").string());
        if (!art.bounds_txt.empty()) {
            write_file(dir / "bounds.txt", art.bounds_txt);
            write_file(dir / "bounds.csv", art.bounds_csv);
            outcome.written.push_back((dir / "bounds.txt").string());
            outcome.written.push_back((dir / "bounds.csv").string());
        }
        if (art.cap) {
            outcome.exit_code = kResourceCap;
            outcome.message = art.cap->describe() + " (partial levels retained)";
        }
    } else {
        BilliardArtifacts art = build_billiard_artifacts(sc);
        write_file(dir / "singular.csv", art.singular_csv);
        write_file(dir / "curves.dump", art.curves_dump);
        write_file(dir / "gpe_evidence.txt", art.evidence_txt);
        outcome.written.push_back((dir / "singular.csv").string());
        outcome.written.push_back((dir / "curves.dump").string());
        outcome.written.push_back((dir / "gpe_evidence.txt").string());
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Invariant suite for `verify`.

struct VerifyCheck {
    std::string name;
    bool pass;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

// Does `cover` contain `covered` as point sets?  Both are overlay outputs.
inline bool segments_cover(const std::vector<Segment>& cover,
                           const std::vector<Segment>& covered) {
    for (const Segment& s : covered) {
        LineKey key = line_through(s.a, s.b);
        Point dir{-key.ny, key.nx};
        Rational ta = dot(dir, s.a), tb = dot(dir, s.b);
        if (ta > tb) std::swap(ta, tb);
        std::vector<std::pair<Rational, Rational>> spans;
        for (const Segment& c : cover) {
            if (!(line_through(c.a, c.b) == key)) continue;
            Rational ca = dot(dir, c.a), cb = dot(dir, c.b);
            if (ca > cb) std::swap(ca, cb);
            if (cb < ta || ca > tb) continue;
            spans.emplace_back(std::move(ca), std::move(cb));
        }
        std::sort(spans.begin(), spans.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Rational reach = ta;
        for (const auto& sp : spans) {
            if (sp.first > reach) return false;
            if (sp.second > reach) reach = sp.second;
            if (reach >= tb) break;
        }
        if (reach < tb) return false;
    }
    return true;
}

} // namespace detail

inline VerifyReport verify_exchange(const Scenario& sc) {
    VerifyReport vr;
    const GpeSystem& g = *sc.system;
    auto add = [&vr](std::string name, bool pass, std::string detail = "") {
        vr.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    auto validation = g.validate();
    add("validation", validation.ok(), validation.to_string());
    if (!validation.ok()) return vr;

    JoinOptions opts;
    opts.max_cells = sc.cap_cells;
    opts.max_coord_bits = sc.cap_bits;
    JoinRun run = join_sequence(g, sc.levels, opts);
    add("levels-completed", !run.cap, run.cap ? run.cap->describe() : "");

    bool area_ok = true, nest_ok = true, mono_ok = true, perim_ok = true;
    Rational space_area = g.space().area();
    for (std::size_t li = 0; li < run.levels.size(); ++li) {
        const JoinLevel& level = run.levels[li];
        Rational total(0);
        for (const auto& c : level.cells) total += c.region.area();
        if (total != space_area) area_ok = false;

        if (li > 0) {
            const JoinLevel& prev = run.levels[li - 1];
            if (level.stats.atom_count < prev.stats.atom_count) mono_ok = false;
            if (level.stats.skeleton_length.hi < prev.stats.skeleton_length.lo) mono_ok = false;
            for (const auto& c : level.cells) {
                std::vector<std::uint32_t> prefix(c.itinerary.begin(), c.itinerary.end() - 1);
                auto it = std::lower_bound(prev.cells.begin(), prev.cells.end(), prefix,
                                           [](const JoinCell& cell, const auto& key) {
                                               return cell.itinerary < key;
                                           });
                if (it == prev.cells.end() || it->itinerary != prefix) {
                    nest_ok = false;
                    continue;
                }
                auto inter = intersect_convex(c.region, it->region);
                if (!inter || inter->area() != c.region.area()) nest_ok = false;
            }
        }

        auto [bdy, interior] = skeleton_boundary_split(level.skeleton, g.space());
        Interval rhs = g.space().perimeter() + Rational(2) * interior;
        if (!overlaps(level.stats.per_atom_edge_sum, rhs)) perim_ok = false;
    }
    add("area-conservation", area_ok);
    add("nesting", nest_ok);
    add("monotonicity", mono_ok);
    add("perimeter-skeleton-identity", perim_ok);

    if (run.levels.size() >= 3) {
        bool cover_ok = true;
        for (std::size_t li = 1; li < std::min<std::size_t>(3, run.levels.size()); ++li)
            if (!detail::segments_cover(run.levels[li].skeleton, run.levels[li - 1].skeleton))
                cover_ok = false;
        add("skeleton-nested-point-sets", cover_ok);
    }

    // Oracle equivalence at small depth.
    std::size_t oracle_depth = std::min<std::size_t>(4, run.levels.size());
    auto oracle_counts = grid_itinerary_counts(g, oracle_depth, sc.oracle_grid);
    bool oracle_ok = true;
    std::string oracle_detail;
    for (std::size_t k = 0; k < oracle_depth; ++k) {
        if (oracle_counts[k] != run.levels[k].stats.atom_count) {
            oracle_ok = false;
            oracle_detail += "level " + std::to_string(k + 1) + ": oracle " +
                             std::to_string(oracle_counts[k]) + " vs " +
                             std::to_string(run.levels[k].stats.atom_count) + "; ";
        }
    }
    add("oracle-equivalence", oracle_ok, oracle_detail);

    // Dynamics consistency: the cell holding x agrees with the orbit itinerary.
    if (run.levels.size() >= 2) {
        bool dyn_ok = true;
        auto sample = draw_regular_samples(g, std::min<std::size_t>(sc.samples, 8),
                                           run.levels.size(), sc.seed);
        const JoinLevel& deepest = run.levels.back();
        for (const Point& x : sample) {
            OrbitResult orbit = evaluate(g, x, deepest.n);
            for (const auto& cell : deepest.cells) {
                if (cell.region.contains_interior(x)) {
                    for (std::size_t k = 0; k < cell.itinerary.size(); ++k)
                        if (cell.itinerary[k] != orbit.itinerary[k]) dyn_ok = false;
                    break;
                }
            }
        }
        add("itinerary-dynamics-consistency", dyn_ok);
    }

    if (run.levels.size() >= 4) {
        auto sample = draw_regular_samples(g, sc.samples, run.levels.size(), sc.seed);
        if (!sample.empty()) {
            BoundReport report =
                check_bounds(g, run.levels.size(), sample, sc.window, sc.tolerance, opts);
            add("theorem5-h-le-theta", !report.bound_violated,
                "margin=" + std::to_string(report.margin_h_le_theta));
            add("theorem4-b-growth-le-theta", report.b_growth_le_theta);
            // Finite-n lambda may exceed finite-n theta; record, don't gate.
            add("lyapunov-reported", true,
                "sup=" + std::to_string(report.lyapunov_sup) +
                    " uniformity_N=" + std::to_string(report.uniformity_N));
        }
    }

    // Determinism: rebuild and compare bytes.
    ExchangeArtifacts a1 = build_exchange_artifacts(sc);
    ExchangeArtifacts a2 = build_exchange_artifacts(sc);
    add("determinism", a1.levels_csv == a2.levels_csv && a1.bounds_txt == a2.bounds_txt);
    return vr;
}

inline VerifyReport verify_billiard(const Scenario& sc) {
    VerifyReport vr;
    const BilliardTable& t = *sc.table;
    auto add = [&vr](std::string name, bool pass, std::string detail = "") {
        vr.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    GpeEvidence ev = as_gpe_report(t);
    add("gpe-evidence", ev.pass, ev.to_text());
    add("involution", ev.involution_max_error < 1e-9,
        "max_error=" + std::to_string(ev.involution_max_error));

    // Finsler closed forms on axis-aligned test segments.
    double f1 = finsler_length({{0.0, 0.3, 0, 0}, {0.0, 1.1, 0, 0}});
    double f2 = finsler_length({{0.0, M_PI / 2, 0, 0}, {1.0, M_PI / 2, 0, 0}});
    double f3 = finsler_length({{0.0, M_PI / 6, 0, 0}, {2.0, M_PI / 6, 0, 0}});
    bool finsler_ok = std::fabs(f1 - 0.8) < 1e-12 && std::fabs(f2 - 1.0) < 1e-12 &&
                      std::fabs(f3 - 1.0) < 1e-12;
    add("finsler-closed-forms", finsler_ok);

    std::size_t oracle_depth = std::min<std::size_t>(3, sc.levels);
    auto counts = count_itinerary_cells(t, oracle_depth);
    auto oracle = billiard_grid_cell_counts(t, oracle_depth, 320, 320);
    bool oracle_ok = true;
    std::string detail;
    for (std::size_t k = 0; k < oracle_depth; ++k) {
        detail += std::to_string(counts[k]) + "/" + std::to_string(oracle[k]) + " ";
        if (counts[k] != oracle[k]) oracle_ok = false;
    }
    add("count-oracle-equivalence", oracle_ok, detail);

    auto full_counts = count_itinerary_cells(t, std::min<std::size_t>(sc.levels, 12));
    bool mono = true;
    for (std::size_t k = 1; k < full_counts.size(); ++k)
        if (full_counts[k] < full_counts[k - 1]) mono = false;
    add("count-monotonicity", mono);

    std::size_t rev_depth = std::min<std::size_t>(4, sc.levels);
    SingularSetOptions back_opts, fwd_opts;
    fwd_opts.forward = true;
    auto back = singular_set(t, rev_depth, back_opts);
    auto fwd = singular_set(t, rev_depth, fwd_opts);
    bool rev_ok = true;
    for (std::size_t k = 0; k < rev_depth; ++k) {
        double a = back.per_generation[k], b = fwd.per_generation[k];
        if (std::fabs(a - b) > 0.02 * std::max(1.0, std::max(a, b))) rev_ok = false;
    }
    add("time-reversal-length-symmetry", rev_ok);

    bool sing_mono = true;
    for (std::size_t k = 1; k < back.cumulative.size(); ++k)
        if (back.cumulative[k] < back.cumulative[k - 1] - 1e-12) sing_mono = false;
    add("singular-length-monotone", sing_mono);

    BilliardArtifacts a1 = build_billiard_artifacts(sc);
    BilliardArtifacts a2 = build_billiard_artifacts(sc);
    add("determinism", a1.singular_csv == a2.singular_csv && a1.curves_dump == a2.curves_dump);
    return vr;
}

inline VerifyReport verify_scenario(const Scenario& sc) {
    return sc.kind == Scenario::Kind::Exchange ? verify_exchange(sc) : verify_billiard(sc);
}

} // namespace gpe
