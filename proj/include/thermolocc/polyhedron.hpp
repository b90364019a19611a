#pragma once

// Vertex and extreme-ray enumeration for polyhedra of the form
//     { x : A x = b,  x_j >= 0 for j in J }
// by the double description method (Motzkin et al.) applied to the homogenised
// cone over the affine parametrisation of {A x = b}.

#include <algorithm>
#include <cstddef>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "numeric.hpp"

namespace thermolocc {

template <class S>
struct Polyhedron {
    DenseMatrix<S> a_eq;
    std::vector<S> b_eq;
    std::vector<std::size_t> nonneg; // coordinates constrained to be >= 0
    std::size_t dimension = 0;       // number of coordinates
};

template <class S>
struct PolyhedronVertex {
    std::vector<S> point;
    std::vector<std::size_t> active; // coordinates of `nonneg` that vanish
};

template <class S>
struct VertexEnumeration {
    std::vector<PolyhedronVertex<S>> vertices;
    std::vector<std::vector<S>> rays; // extreme rays of the recession cone, max-norm 1
};

namespace detail {

template <class S>
void normalise_max(std::vector<S>& v) {
    S m = max_abs(v);
    if (NumericTraits<S>::is_zero(m)) return;
    for (auto& x : v) x /= m;
}

template <class S>
bool approx_equal(const std::vector<S>& a, const std::vector<S>& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if constexpr (NumericTraits<S>::exact) {
            if (a[i] != b[i]) return false;
        } else {
            if (std::abs(a[i] - b[i]) > tol) return false;
        }
    }
    return true;
}

template <class S>
std::vector<std::vector<S>> invert(const std::vector<std::vector<S>>& rows) {
    const std::size_t n = rows.size();
    DenseMatrix<S> a(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = rows[r][c];
    std::vector<std::vector<S>> cols;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<S> e(n, S(0));
        e[i] = S(1);
        auto sol = solve_affine(a, e);
        if (!sol.basis.empty()) throw Error("invert: singular matrix");
        cols.push_back(sol.origin);
    }
    return cols;
}

} // namespace detail

/// Enumerates all vertices (with their active sign constraints) and extreme rays.
/// Throws if the polyhedron contains a line. Returns an empty result if infeasible.
template <class S>
VertexEnumeration<S> enumerate_vertices(const Polyhedron<S>& poly, double dedupe_tol = 1e-7) {
    using T = NumericTraits<S>;
    using Bits = boost::dynamic_bitset<>;
    VertexEnumeration<S> out;
    const std::size_t n = poly.dimension;

    auto ech = detail::rref(poly.a_eq, poly.b_eq);
    if (!ech.consistent) return out;
    auto aff = detail::solve_affine(poly.a_eq, poly.b_eq);
    const std::size_t r = aff.basis.size();

    if (r == 0) {
        PolyhedronVertex<S> v{aff.origin, {}};
        for (auto j : poly.nonneg) {
            if (T::is_negative(aff.origin[j])) return out;
            if (T::is_zero(aff.origin[j])) v.active.push_back(j);
        }
        out.vertices.push_back(std::move(v));
        return out;
    }

    // Homogenised constraint rows over (y, t): x_j = origin_j t + basis_j . y >= 0, t >= 0.
    const std::size_t dim = r + 1;
    std::vector<std::vector<S>> rows;
    std::vector<std::size_t> row_coord; // coordinate index, or n for the t >= 0 row
    for (auto j : poly.nonneg) {
        std::vector<S> g(dim);
        for (std::size_t k = 0; k < r; ++k) g[k] = aff.basis[k][j];
        g[r] = aff.origin[j];
        if constexpr (!T::exact) detail::normalise_max(g);
        if (T::is_zero(detail::max_abs(g))) continue; // constraint is vacuous on the affine hull
        rows.push_back(std::move(g));
        row_coord.push_back(j);
    }
    {
        std::vector<S> g(dim, S(0));
        g[r] = S(1);
        rows.push_back(std::move(g));
        row_coord.push_back(n);
    }
    const std::size_t m = rows.size();

    // Greedy choice of an initial basis of `dim` independent rows.
    std::vector<std::size_t> chosen;
    {
        DenseMatrix<S> acc(0, dim);
        std::size_t rk = 0;
        for (std::size_t i = 0; i < m && chosen.size() < dim; ++i) {
            DenseMatrix<S> trial = acc;
            trial.append_row(rows[i]);
            std::size_t nr = detail::rank(trial);
            if (nr > rk) {
                acc = std::move(trial);
                rk = nr;
                chosen.push_back(i);
            }
        }
        if (chosen.size() < dim) throw Error("enumerate_vertices: polyhedron is not pointed");
    }

    std::vector<std::vector<S>> basis_rows;
    for (auto i : chosen) basis_rows.push_back(rows[i]);
    auto inv = detail::invert(basis_rows);

    std::vector<std::vector<S>> rays;
    std::vector<Bits> zeros;
    for (std::size_t i = 0; i < dim; ++i) {
        auto ray = inv[i];
        detail::normalise_max(ray);
        Bits z(m);
        for (std::size_t k = 0; k < dim; ++k)
            if (k != i) z.set(chosen[k]);
        rays.push_back(std::move(ray));
        zeros.push_back(std::move(z));
    }

    std::vector<bool> processed(m, false);
    for (auto i : chosen) processed[i] = true;

    const double zero_tol = 1e-9;
    auto sign_of = [&](const S& v) -> int {
        if constexpr (T::exact) {
            return v > 0 ? 1 : (v < 0 ? -1 : 0);
        } else {
            return v > zero_tol ? 1 : (v < -zero_tol ? -1 : 0);
        }
    };

    for (std::size_t row = 0; row < m; ++row) {
        if (processed[row]) continue;
        std::vector<S> val(rays.size());
        std::vector<std::size_t> pos, neg, zer;
        for (std::size_t k = 0; k < rays.size(); ++k) {
            val[k] = detail::dot(rows[row], rays[k]);
            int s = sign_of(val[k]);
            (s > 0 ? pos : s < 0 ? neg : zer).push_back(k);
        }
        std::vector<std::vector<S>> next_rays;
        std::vector<Bits> next_zeros;
        for (auto k : pos) {
            next_rays.push_back(rays[k]);
            next_zeros.push_back(zeros[k]);
        }
        for (auto k : zer) {
            next_rays.push_back(rays[k]);
            Bits z = zeros[k];
            z.set(row);
            next_zeros.push_back(std::move(z));
        }
        for (auto p : pos) {
            for (auto q : neg) {
                Bits common = zeros[p] & zeros[q];
                if (common.count() + 2 < dim) continue;
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
                    if (k == p || k == q) continue;
                    if (common.is_subset_of(zeros[k])) adjacent = false;
                }
                if (!adjacent) continue;
                std::vector<S> ray(dim);
                for (std::size_t c = 0; c < dim; ++c) ray[c] = val[p] * rays[q][c] - val[q] * rays[p][c];
                detail::normalise_max(ray);
                common.set(row);
                next_rays.push_back(std::move(ray));
                next_zeros.push_back(std::move(common));
            }
        }
        rays = std::move(next_rays);
        zeros = std::move(next_zeros);
        processed[row] = true;
    }

    for (std::size_t k = 0; k < rays.size(); ++k) {
        const auto& ray = rays[k];
        S t = ray[r];
        bool is_vertex = sign_of(t) > 0;
        std::vector<S> x(n, S(0));
        for (std::size_t c = 0; c < n; ++c) {
            S acc = is_vertex ? aff.origin[c] : S(0);
            for (std::size_t b = 0; b < r; ++b)
                acc += aff.basis[b][c] * (is_vertex ? ray[b] / t : ray[b]);
            x[c] = acc;
        }
        if (is_vertex) {
            if constexpr (!T::exact)
                for (auto j : poly.nonneg)
                    if (std::abs(x[j]) < 1e-12) x[j] = 0.0;
            bool dup = false;
            for (const auto& v : out.vertices)
                if (detail::approx_equal(v.point, x, dedupe_tol)) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            PolyhedronVertex<S> v;
            v.point = std::move(x);
            for (std::size_t i = 0; i < m; ++i)
                if (zeros[k].test(i) && row_coord[i] < n) v.active.push_back(row_coord[i]);
            std::sort(v.active.begin(), v.active.end());
            out.vertices.push_back(std::move(v));
        } else {
            detail::normalise_max(x);
            bool dup = false;
            for (const auto& w : out.rays)
                if (detail::approx_equal(w, x, dedupe_tol)) {
                    dup = true;
                    break;
                }
            if (!dup) out.rays.push_back(std::move(x));
        }
    }
    return out;
}

/// Basic-feasible-solution certificate: the equalities plus the active sign
/// constraints determine the point uniquely.
struct BasicSolutionCertificate {
    std::size_t variables = 0;
    std::size_t active = 0;
    std::size_t rank = 0;
    bool basic = false;
};

template <class S>
BasicSolutionCertificate basic_solution_certificate(const Polyhedron<S>& poly,
                                                    const std::vector<std::size_t>& active) {
    DenseMatrix<S> a = poly.a_eq;
    if (a.rows() == 0) a = DenseMatrix<S>(0, poly.dimension);
    for (auto j : active) {
        std::vector<S> row(poly.dimension, S(0));
        row[j] = S(1);
        a.append_row(row);
    }
    BasicSolutionCertificate c;
    c.variables = poly.dimension;
    c.active = active.size();
    c.rank = detail::rank(a);
    c.basic = c.rank == c.variables;
    return c;
}

} // namespace thermolocc
