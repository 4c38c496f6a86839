#include "toric/linalg.hpp"

#include <cstddef>

namespace toric {

Rat det(RatMat m) {
    const std::size_t n = m.size();
    Rat result = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            result = -result;
        }
        result *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            Rat f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return result;
}

int rank(RatMat m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    int r = 0;
    for (std::size_t col = 0; col < cols && static_cast<std::size_t>(r) < rows; ++col) {
        std::size_t pivot = r;
        while (pivot < rows && m[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[pivot], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][col] == 0) continue;
            Rat f = m[i][col] / m[r][col];
            for (std::size_t c = col; c < cols; ++c) m[i][c] -= f * m[r][c];
        }
        ++r;
    }
    return r;
}

std::optional<RatVec> solve(RatMat a, RatVec b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rat f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    RatVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

std::optional<RatVec> nullspace_direction(const RatMat& m, std::size_t n) {
    // Cofactor expansion: component j is (-1)^j det(m with column j removed).
    RatVec dir(n, Rat(0));
    bool nonzero = false;
    for (std::size_t j = 0; j < n; ++j) {
        RatMat minor;
        minor.reserve(m.size());
        for (const auto& row : m) {
            RatVec r;
            r.reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) r.push_back(row[c]);
            minor.push_back(std::move(r));
        }
        Rat d = det(minor);
        if (j % 2 == 1) d = -d;
        dir[j] = d;
        if (d != 0) nonzero = true;
    }
    if (!nonzero) return std::nullopt;
    return dir;
}

RatMat identity_matrix(std::size_t n) {
    RatMat m(n, RatVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

RatVec mat_apply(const RatMat& a, const RatVec& x) {
    RatVec y(a.size(), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

} // namespace toric
