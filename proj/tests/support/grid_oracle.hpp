#pragma once

// Exhaustive-search optimum for GridHazard. Exact: any trajectory decomposes
// into safe shortest walks between pellet pickups plus optional deliberate
// deaths used as teleports back to the start, so a DP over
// (eaten-pellet mask, position node, deaths) covers every strategy.

#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "iil/envs.hpp"

namespace iil::test {

inline constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

// Shortest walk lengths from `from` to every cell, treating hazards as
// forbidden. Stepping onto a hazard is handled separately as a death move.
inline std::vector<std::size_t> safe_bfs(const iil::GridHazardEnv& env, std::size_t from) {
    const auto& cfg = env.config();
    const std::size_t w = cfg.width, h = cfg.height, cells = w * h;
    std::vector<std::size_t> dist(cells, kInf);
    if (env.hazard_mask()[from]) return dist;
    std::deque<std::size_t> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        const std::size_t x = c % w, y = c / w;
        const std::ptrdiff_t moves[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
        for (const auto& m : moves) {
            const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x) + m[0];
            const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(y) + m[1];
            if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) ||
                ny >= static_cast<std::ptrdiff_t>(h))
                continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
            if (env.hazard_mask()[n] || dist[n] != kInf) continue;
            dist[n] = dist[c] + 1;
            queue.push_back(n);
        }
    }
    return dist;
}

// Maximum number of pellets collectible within the step cap, allowing up to
// lives-1 deliberate deaths as teleports. This is the true optimal
// undiscounted return, since every pellet is worth exactly +1.
inline double grid_optimal_return(const iil::GridHazardEnv& env) {
    const auto& cfg = env.config();
    const std::size_t w = cfg.width, cells = w * cfg.height;

    std::vector<std::size_t> pellet_cells;
    for (std::size_t c = 0; c < cells; ++c)
        if (env.pellet_mask()[c]) pellet_cells.push_back(c);
    const std::size_t np = pellet_cells.size();

    // Node 0 = start cell; nodes 1..np = pellets.
    std::vector<std::size_t> node_cell{0};
    for (std::size_t c : pellet_cells) node_cell.push_back(c);
    const std::size_t nn = node_cell.size();

    std::vector<std::vector<std::size_t>> dist(nn);
    std::vector<std::size_t> die_cost(nn, kInf);
    for (std::size_t a = 0; a < nn; ++a) {
        auto d = safe_bfs(env, node_cell[a]);
        dist[a].resize(nn);
        for (std::size_t b = 0; b < nn; ++b) dist[a][b] = d[node_cell[b]];
        // Cheapest way to die from node a: walk to a cell adjacent to a
        // hazard, then step onto it.
        for (std::size_t c = 0; c < cells; ++c) {
            if (d[c] == kInf) continue;
            const std::size_t x = c % w, y = c / w;
            const std::ptrdiff_t moves[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
            for (const auto& m : moves) {
                const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x) + m[0];
                const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(y) + m[1];
                if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) ||
                    ny >= static_cast<std::ptrdiff_t>(cfg.height))
                    continue;
                const std::size_t n =
                    static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
                if (env.hazard_mask()[n]) die_cost[a] = std::min(die_cost[a], d[c] + 1);
            }
        }
    }

    const std::size_t max_deaths = cfg.lives > 0 ? cfg.lives - 1 : 0;
    const std::size_t masks = std::size_t{1} << np;
    // best[mask][node][deaths] = fewest steps to that configuration.
    std::vector<std::size_t> best(masks * nn * (max_deaths + 1), kInf);
    auto at = [&](std::size_t mask, std::size_t node, std::size_t deaths) -> std::size_t& {
        return best[(mask * nn + node) * (max_deaths + 1) + deaths];
    };
    at(0, 0, 0) = 0;

    std::size_t best_pellets = 0;
    for (std::size_t mask = 0; mask < masks; ++mask) {
        // Death moves within the same mask (always land on node 0).
        for (std::size_t d = 0; d < max_deaths; ++d)
            for (std::size_t a = 0; a < nn; ++a) {
                const std::size_t cur = at(mask, a, d);
                if (cur == kInf || die_cost[a] == kInf) continue;
                std::size_t& slot = at(mask, 0, d + 1);
                slot = std::min(slot, cur + die_cost[a]);
            }
        for (std::size_t d = 0; d <= max_deaths; ++d)
            for (std::size_t a = 0; a < nn; ++a) {
                const std::size_t cur = at(mask, a, d);
                if (cur == kInf || cur > cfg.max_steps) continue;
                best_pellets = std::max<std::size_t>(
                    best_pellets, static_cast<std::size_t>(std::popcount(mask)));
                for (std::size_t j = 0; j < np; ++j) {
                    if (mask & (std::size_t{1} << j)) continue;
                    if (dist[a][j + 1] == kInf) continue;
                    std::size_t& slot = at(mask | (std::size_t{1} << j), j + 1, d);
                    slot = std::min(slot, cur + dist[a][j + 1]);
                }
            }
    }
    return static_cast<double>(best_pellets);
}

}  // namespace iil::test
