#pragma once

// Scalar traits and small dense linear algebra shared by the LP solver and the
// vertex enumerator. Everything here is templated over the scalar so the same
// code runs in floating point and in exact rational arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace thermolocc {

using Rational = boost::multiprecision::cpp_rational;

/// Tolerance for probability normalisation and clamping on construction.
inline constexpr double kNormTol = 1e-12;
/// Tolerance for curve dominance comparisons.
inline constexpr double kGeomTol = 1e-9;
/// Default tolerance for fixed-point (Gibbs preservation) checks.
inline constexpr double kFixTol = 1e-9;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

template <class S>
struct NumericTraits;

template <>
struct NumericTraits<double> {
    static constexpr bool exact = false;
    static double eps() { return 1e-11; }
    static bool is_zero(double x) { return std::abs(x) <= eps(); }
    static bool is_positive(double x) { return x > eps(); }
    static bool is_negative(double x) { return x < -eps(); }
    static double abs(double x) { return std::abs(x); }
    static double to_double(double x) { return x; }
    static double from_double(double x) { return x; }
};

template <>
struct NumericTraits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& x) { return x == 0; }
    static bool is_positive(const Rational& x) { return x > 0; }
    static bool is_negative(const Rational& x) { return x < 0; }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    // Doubles are dyadic rationals, so this conversion is exact.
    static Rational from_double(double x) { return Rational(x); }
};

/// Row-major dense matrix over an arbitrary scalar.
template <class S>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, const S& fill = S(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const S& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    void append_row(const std::vector<S>& row) {
        if (rows_ == 0 && cols_ == 0) cols_ = row.size();
        if (row.size() != cols_) throw Error("append_row: width mismatch");
        data_.insert(data_.end(), row.begin(), row.end());
        ++rows_;
    }

    std::vector<S> row(std::size_t r) const {
        return std::vector<S>(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> data_;
};

namespace detail {

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
    S acc(0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

template <class S>
S max_abs(const std::vector<S>& v) {
    S m(0);
    for (const auto& x : v) m = std::max<S>(m, NumericTraits<S>::abs(x));
    return m;
}

/// Result of reducing an augmented system [A | b] to reduced row echelon form.
template <class S>
struct Echelon {
    DenseMatrix<S> reduced;          // rank x (cols + 1), last column is the rhs
    std::vector<std::size_t> pivots; // pivot column for each row of `reduced`
    bool consistent = true;
};

/// Gauss-Jordan elimination with partial pivoting. Zero rows are dropped.
template <class S>
Echelon<S> rref(const DenseMatrix<S>& a, const std::vector<S>& b) {
    using T = NumericTraits<S>;
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<S>> rows(m, std::vector<S>(n + 1));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) rows[r][c] = a(r, c);
        rows[r][n] = b.empty() ? S(0) : b[r];
        if constexpr (!T::exact) {
            // Scale rows so the elimination tolerance is relative.
            S s(0);
            for (std::size_t c = 0; c < n; ++c) s = std::max<S>(s, T::abs(rows[r][c]));
            if (s > S(0))
                for (auto& x : rows[r]) x /= s;
        }
    }
    Echelon<S> out;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < n && lead < m; ++c) {
        std::size_t best = m;
        S best_val(0);
        for (std::size_t r = lead; r < m; ++r) {
            S v = T::abs(rows[r][c]);
            if (!T::is_zero(v) && (best == m || v > best_val)) {
                best = r;
                best_val = v;
                if constexpr (T::exact) break;
            }
        }
        if (best == m) continue;
        std::swap(rows[lead], rows[best]);
        S piv = rows[lead][c];
        for (auto& x : rows[lead]) x /= piv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == lead || T::is_zero(rows[r][c])) continue;
            S f = rows[r][c];
            for (std::size_t k = 0; k <= n; ++k) rows[r][k] -= f * rows[lead][k];
            rows[r][c] = S(0);
        }
        out.pivots.push_back(c);
        ++lead;
    }
    for (std::size_t r = lead; r < m; ++r)
        if (!T::is_zero(rows[r][n])) out.consistent = false;
    out.reduced = DenseMatrix<S>(0, n + 1);
    for (std::size_t r = 0; r < lead; ++r) out.reduced.append_row(rows[r]);
    return out;
}

template <class S>
std::size_t rank(const DenseMatrix<S>& a) {
    return rref(a, {}).pivots.size();
}

/// Affine parametrisation x = origin + basis * y of the solution set of A x = b.
template <class S>
struct AffineSolution {
    std::vector<S> origin;
    std::vector<std::vector<S>> basis; // each entry is a direction of length n
};

template <class S>
AffineSolution<S> solve_affine(const DenseMatrix<S>& a, const std::vector<S>& b) {
    const std::size_t n = a.cols();
    auto e = rref(a, b);
    if (!e.consistent) throw Error("linear system is inconsistent");
    std::vector<bool> is_pivot(n, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    AffineSolution<S> sol;
    sol.origin.assign(n, S(0));
    for (std::size_t r = 0; r < e.pivots.size(); ++r) sol.origin[e.pivots[r]] = e.reduced(r, n);
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<S> dir(n, S(0));
        dir[f] = S(1);
        for (std::size_t r = 0; r < e.pivots.size(); ++r) dir[e.pivots[r]] = -e.reduced(r, f);
        sol.basis.push_back(std::move(dir));
    }
    return sol;
}

} // namespace detail
} // namespace thermolocc
