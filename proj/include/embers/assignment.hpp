// Exact max-weight bipartite assignment on integer weights.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace embers {

// Solves max-weight bipartite matching where weight 0 means "no edge".
// Returns per-row column assignment (-1 = unmatched); only rows assigned
// through a positive-weight edge count as matched.
class AssignmentSolver {
public:
    // weights[r][c] >= 0; rows and cols need not be equal.
    static std::vector<int> solve(const std::vector<std::vector<std::int64_t>>& weights,
                                  std::int64_t* total = nullptr) {
        const int rows = static_cast<int>(weights.size());
        const int cols = rows ? static_cast<int>(weights[0].size()) : 0;
        const int n = std::max(rows, cols);
        if (n == 0) {
            if (total) *total = 0;
            return {};
        }
        std::int64_t wmax = 0;
        for (const auto& row : weights)
            for (std::int64_t w : row) wmax = std::max(wmax, w);

        // Pad to square; minimize cost = wmax - weight (dummies cost wmax).
        auto cost = [&](int r, int c) -> std::int64_t {
            if (r < rows && c < cols) return wmax - weights[r][c];
            return wmax;
        };

        // Jonker-Volgenant style shortest augmenting path, 1-indexed.
        const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
        std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
        std::vector<int> p(n + 1, 0), way(n + 1, 0);
        for (int i = 1; i <= n; ++i) {
            p[0] = i;
            int j0 = 0;
            std::vector<std::int64_t> minv(n + 1, kInf);
            std::vector<char> used(n + 1, 0);
            do {
                used[j0] = 1;
                int i0 = p[j0], j1 = 0;
                std::int64_t delta = kInf;
                for (int j = 1; j <= n; ++j) {
                    if (used[j]) continue;
                    std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                for (int j = 0; j <= n; ++j) {
                    if (used[j]) {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
            } while (p[j0] != 0);
            do {
                int j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0);
        }

        std::vector<int> rowsol(rows, -1);
        std::int64_t sum = 0;
        for (int j = 1; j <= n; ++j) {
            int r = p[j] - 1, c = j - 1;
            if (r >= 0 && r < rows && c < cols && weights[r][c] > 0) {
                rowsol[r] = c;
                sum += weights[r][c];
            }
        }
        if (total) *total = sum;
        return rowsol;
    }

    // Best achievable total weight alone.
    static std::int64_t best_total(const std::vector<std::vector<std::int64_t>>& weights) {
        std::int64_t t = 0;
        solve(weights, &t);
        return t;
    }
};

}  // namespace embers
