#include "cpsieve/linalg.hpp"

#include <algorithm>

namespace cpsieve::linalg {

using gf::Fq;

Matrix rref(Matrix rows, std::vector<std::uint32_t>* pivots) {
    if (rows.empty()) return rows;
    const std::size_t ncols = rows[0].size();
    std::size_t rr = 0;
    for (std::size_t col = 0; col < ncols && rr < rows.size(); ++col) {
        std::size_t piv = rr;
        while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rr], rows[piv]);
        const Fq inv = rows[rr][col].ctx().inv(rows[rr][col]);
        for (auto& x : rows[rr]) x = x * inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == rr || rows[i][col].is_zero()) continue;
            const Fq f = rows[i][col];
            for (std::size_t c = col; c < ncols; ++c) rows[i][c] = rows[i][c] - f * rows[rr][c];
        }
        if (pivots) pivots->push_back(static_cast<std::uint32_t>(col));
        ++rr;
    }
    return rows;
}

std::uint32_t rank(Matrix rows) {
    std::vector<std::uint32_t> pivots;
    rref(std::move(rows), &pivots);
    return static_cast<std::uint32_t>(pivots.size());
}

Matrix null_space(const Matrix& rows, const gf::FieldCtx& ctx, std::uint32_t ncols) {
    std::vector<std::uint32_t> pivots;
    Matrix r = rref(rows, &pivots);
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : pivots) is_pivot[c] = true;
    Matrix basis;
    for (std::uint32_t fc = 0; fc < ncols; ++fc) {
        if (is_pivot[fc]) continue;
        Row v(ncols, ctx.zero());
        v[fc] = ctx.one();
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            // pivot row i: v[pivots[i]] = -sum over free columns
            v[pivots[i]] = ctx.neg(r[i][fc]);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

Row normalize_first_nonzero(Row v) {
    for (auto& x : v) {
        if (!x.is_zero()) {
            const Fq inv = x.ctx().inv(x);
            for (auto& y : v) y = y * inv;
            return v;
        }
    }
    throw MathError("cannot normalize the zero vector");
}

gf::Fq det3(const Matrix& m) {
    const auto& c = m[0][0].ctx();
    Fq d = c.zero();
    d = d + m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    d = d - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]);
    d = d + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return d;
}

} // namespace cpsieve::linalg
