#pragma once

// Structural evidence that the billiard ball map is a generalized polygon
// exchange on its first-return partition: grid component counts against the
// geometric atom count, coverage of the regular set, the time-reversal
// involution, and sampled continuity on atom interiors.  Grid checks are
// evidence, not proofs; the report says which.

#include "gpelab/billiard.hpp"

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

struct GpeEvidence {
    std::size_t atoms_geometric = 0;      // m(m-1) for convex tables
    std::size_t atoms_grid_forward = 0;   // connected label components
    std::size_t atoms_grid_backward = 0;  // same for the time-reversed map
    bool atom_counts_match = false;
    double coverage = 0;        // labeled fraction of the phase grid
    double coverage_fine = 0;   // at twice the resolution
    bool coverage_improves = false;
    double involution_max_error = 0;
    double continuity_max_stretch = 0;  // masked away from grazing angles
    bool pass = false;

    std::string to_text() const {
        std::ostringstream os;
        os << "atoms_geometric " << atoms_geometric << "\n";
        os << "atoms_grid_forward " << atoms_grid_forward << "\n";
        os << "atoms_grid_backward " << atoms_grid_backward << "\n";
        os << "atom_counts_match " << (atom_counts_match ? 1 : 0) << "\n";
        os << "coverage " << coverage << "\n";
        os << "coverage_fine " << coverage_fine << "\n";
        os << "coverage_improves " << (coverage_improves ? 1 : 0) << "\n";
        os << "involution_max_error " << involution_max_error << "\n";
        os << "continuity_max_stretch " << continuity_max_stretch << "\n";
        os << "pass " << (pass ? 1 : 0) << "\n";
        return os.str();
    }
};

namespace detail {

// Labels one side's (u, theta) grid block and counts connected components of
// equal labels; -1 marks vertex hits (excluded).
struct GridBlock {
    std::size_t nu, nth;
    std::vector<int> labels;  // nu * nth

    int& at(std::size_t a, std::size_t b) { return labels[a * nth + b]; }
    int at(std::size_t a, std::size_t b) const { return labels[a * nth + b]; }
};

inline GridBlock classify_side(const BilliardTable& t, std::size_t side, std::size_t nu,
                               std::size_t nth, bool backward) {
    GridBlock block{nu, nth, std::vector<int>(nu * nth, -1)};
    const auto& sd = t.side(side);
    for (std::size_t a = 0; a < nu; ++a) {
        double u = (2.0 * static_cast<double>(a) + 1) / (2.0 * static_cast<double>(nu));
        for (std::size_t b = 0; b < nth; ++b) {
            double theta = M_PI * (2.0 * static_cast<double>(b) + 1) /
                           (2.0 * static_cast<double>(nth));
            PhasePoint p{sd.offset + u * sd.len, theta, 0, 0};
            Bounce bounce = backward ? billiard_map_backward(t, p) : billiard_map(t, p);
            if (bounce.status == Bounce::Status::Ok)
                block.at(a, b) = static_cast<int>(bounce.side);
        }
    }
    return block;
}

inline std::size_t count_components(const GridBlock& block) {
    std::vector<char> seen(block.labels.size(), 0);
    std::size_t comps = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < block.labels.size(); ++start) {
        if (seen[start] || block.labels[start] < 0) continue;
        ++comps;
        stack.assign(1, start);
        seen[start] = 1;
        int label = block.labels[start];
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            std::size_t a = cur / block.nth, b = cur % block.nth;
            const std::size_t neigh[4][2] = {{a + 1, b}, {a - 1, b}, {a, b + 1}, {a, b - 1}};
            for (const auto& nb : neigh) {
                if (nb[0] >= block.nu || nb[1] >= block.nth) continue;  // wraps catch a-1 < 0
                std::size_t id = nb[0] * block.nth + nb[1];
                if (!seen[id] && block.labels[id] == label) {
                    seen[id] = 1;
                    stack.push_back(id);
                }
            }
        }
    }
    return comps;
}

} // namespace detail

inline GpeEvidence as_gpe_report(const BilliardTable& t, std::size_t grid = 160) {
    GpeEvidence ev;
    const std::size_t m = t.side_count();
    if (t.convex()) ev.atoms_geometric = m * (m - 1);

    std::size_t labeled = 0, total = 0, labeled_fine = 0, total_fine = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto block = detail::classify_side(t, i, grid, grid, false);
        ev.atoms_grid_forward += detail::count_components(block);
        for (int lab : block.labels) labeled += lab >= 0;
        total += block.labels.size();

        auto block_b = detail::classify_side(t, i, grid, grid, true);
        ev.atoms_grid_backward += detail::count_components(block_b);

        auto fine = detail::classify_side(t, i, 2 * grid, 2 * grid, false);
        for (int lab : fine.labels) labeled_fine += lab >= 0;
        total_fine += fine.labels.size();
    }
    ev.coverage = static_cast<double>(labeled) / static_cast<double>(total);
    ev.coverage_fine = static_cast<double>(labeled_fine) / static_cast<double>(total_fine);
    ev.coverage_improves = ev.coverage_fine >= ev.coverage;
    ev.atom_counts_match = !t.convex() || (ev.atoms_grid_forward == ev.atoms_geometric &&
                                           ev.atoms_grid_backward == ev.atoms_geometric);

    // Involution and masked continuity over a coarse sample.
    double max_inv = 0, max_stretch = 0;
    const std::size_t sn = 24;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& sd = t.side(i);
        for (std::size_t a = 0; a < sn; ++a) {
            double u = (2.0 * static_cast<double>(a) + 1) / (2.0 * sn);
            for (std::size_t b = 0; b < sn; ++b) {
                double theta = M_PI * (2.0 * static_cast<double>(b) + 1) / (2.0 * sn);
                PhasePoint p{sd.offset + u * sd.len, theta, 0, 0};
                Bounce fwd = billiard_map(t, p);
                if (fwd.status != Bounce::Status::Ok) continue;
                Bounce back = billiard_map_backward(t, fwd.next);
                if (back.status == Bounce::Status::Ok) {
                    double ds = std::fabs(back.next.s - p.s);
                    ds = std::min(ds, t.perimeter_d() - ds);
                    double dth = std::fabs(back.next.theta - p.theta);
                    max_inv = std::max(max_inv, ds + dth);
                }
                // Continuity: compare against a nearby same-atom point.
                if (std::sin(theta) < 0.2 || std::sin(fwd.next.theta) < 0.2) continue;
                double h = 1e-6;
                PhasePoint q{p.s + h * sd.len, theta, 0, 0};
                Bounce fq = billiard_map(t, q);
                if (fq.status != Bounce::Status::Ok || fq.side != fwd.side) continue;
                double num = std::fabs(fq.next.s - fwd.next.s) +
                             std::fabs(fq.next.theta - fwd.next.theta);
                max_stretch = std::max(max_stretch, num / (h * sd.len));
            }
        }
    }
    ev.involution_max_error = max_inv;
    ev.continuity_max_stretch = max_stretch;

    ev.pass = ev.atom_counts_match && ev.coverage > 0.95 && ev.coverage_improves &&
              ev.involution_max_error < 1e-9 && ev.continuity_max_stretch < 1e3;
    return ev;
}

} // namespace gpe
