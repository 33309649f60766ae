#pragma once

// Dense Gaussian elimination over a FieldCtx. Deterministic pivoting:
// first nonzero entry in column order. Matrices are small here (a few
// hundred rows at most); the big enumeration loops in the sieve use their
// own packed representations.

#include <cstdint>
#include <vector>

#include "cpsieve/gf.hpp"

namespace cpsieve::linalg {

using Row = std::vector<gf::Fq>;
using Matrix = std::vector<Row>;

std::uint32_t rank(Matrix rows);

/// Reduced row echelon form; pivot column indices appended to *pivots.
Matrix rref(Matrix rows, std::vector<std::uint32_t>* pivots = nullptr);

/// Basis of {v : A v = 0} in F^ncols; deterministic (free columns ascending).
Matrix null_space(const Matrix& rows, const gf::FieldCtx& ctx, std::uint32_t ncols);

/// Scale so the first nonzero entry equals 1. MathError on the zero vector.
Row normalize_first_nonzero(Row v);

gf::Fq det3(const Matrix& m);

} // namespace cpsieve::linalg
