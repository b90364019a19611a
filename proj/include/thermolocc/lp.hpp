#pragma once

// Dense phase-one simplex for feasibility problems {A x = b, x >= 0}.
// Bland's rule guarantees termination, including in exact arithmetic.

#include <cstddef>
#include <optional>
#include <vector>

#include "numeric.hpp"

namespace thermolocc {

struct LpOptions {
    /// Phase-one objective (sum of artificials on scaled rows) accepted as feasible.
    double feasibility_tol = 1e-9;
    std::size_t max_iterations = 200000;
};

template <class S>
std::optional<std::vector<S>> find_feasible_point(const DenseMatrix<S>& a, std::vector<S> b,
                                                  const LpOptions& opt = {}) {
    using T = NumericTraits<S>;
    const std::size_t m = a.rows(), n = a.cols();
    if (b.size() != m) throw Error("find_feasible_point: rhs size mismatch");
    if (m == 0) return std::vector<S>(n, S(0));

    const std::size_t width = n + m + 1; // originals, artificials, rhs
    std::vector<std::vector<S>> tab(m, std::vector<S>(width, S(0)));
    for (std::size_t r = 0; r < m; ++r) {
        S scale(1);
        if constexpr (!T::exact) {
            S s(0);
            for (std::size_t c = 0; c < n; ++c) s = std::max<S>(s, T::abs(a(r, c)));
            if (s > S(0)) scale = s;
        }
        S sign = b[r] < S(0) ? S(-1) : S(1);
        for (std::size_t c = 0; c < n; ++c) tab[r][c] = sign * a(r, c) / scale;
        tab[r][n + r] = S(1);
        tab[r][width - 1] = sign * b[r] / scale;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

    // Reduced costs of the phase-one objective (sum of artificials).
    std::vector<S> cost(width, S(0));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) cost[c] -= tab[r][c];
    for (std::size_t r = 0; r < m; ++r) cost[width - 1] -= tab[r][width - 1];

    auto pivot = [&](std::size_t pr, std::size_t pc) {
        S p = tab[pr][pc];
        for (auto& x : tab[pr]) x /= p;
        tab[pr][pc] = S(1);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == pr || T::is_zero(tab[r][pc])) {
                if (r != pr) tab[r][pc] = S(0);
                continue;
            }
            S f = tab[r][pc];
            for (std::size_t c = 0; c < width; ++c) tab[r][c] -= f * tab[pr][c];
            tab[r][pc] = S(0);
        }
        if (!T::is_zero(cost[pc])) {
            S f = cost[pc];
            for (std::size_t c = 0; c < width; ++c) cost[c] -= f * tab[pr][c];
        }
        cost[pc] = S(0);
        basis[pr] = pc;
    };

    for (std::size_t iter = 0;; ++iter) {
        if (iter > opt.max_iterations) throw Error("simplex iteration limit exceeded");
        std::size_t enter = width;
        for (std::size_t c = 0; c + 1 < width; ++c)
            if (T::is_negative(cost[c])) {
                enter = c;
                break;
            }
        if (enter == width) break;
        std::size_t leave = m;
        S best(0);
        for (std::size_t r = 0; r < m; ++r) {
            if (!T::is_positive(tab[r][enter])) continue;
            S ratio = tab[r][width - 1] / tab[r][enter];
            if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave == m) break; // unbounded direction cannot occur in phase one
        pivot(leave, enter);
    }

    // cost[rhs] holds minus the phase-one objective.
    S objective = -cost[width - 1];
    if constexpr (T::exact) {
        if (objective != S(0)) return std::nullopt;
    } else {
        if (objective > S(opt.feasibility_tol)) return std::nullopt;
    }

    std::vector<S> x(n, S(0));
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < n) x[basis[r]] = tab[r][width - 1];
    if constexpr (!T::exact)
        for (auto& v : x)
            if (v < S(0)) v = S(0);
    return x;
}

} // namespace thermolocc
