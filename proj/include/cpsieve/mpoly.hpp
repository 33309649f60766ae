#pragma once

// Multivariate polynomials over a FieldCtx with graded-lex term order
// (x0 > x1 > ..., higher total degree first). Terms are kept in a map with
// dense exponent-vector keys, so iteration order is reproducible.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cpsieve/gf.hpp"

namespace cpsieve::mpoly {

using ExpVec = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const ExpVec& e) {
    std::uint32_t s = 0;
    for (auto x : e) s += x;
    return s;
}

/// "Less" means "comes first": higher total degree first, then lex with the
/// first variable most significant.
struct GrlexFirst {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        const auto da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        return a > b;
    }
};

class MPoly {
public:
    MPoly(const gf::FieldCtx& ctx, std::uint32_t nvars) : ctx_(&ctx), nvars_(nvars) {}

    const gf::FieldCtx& ctx() const { return *ctx_; }
    std::uint32_t nvars() const { return nvars_; }
    const std::map<ExpVec, gf::Fq, GrlexFirst>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    /// Degree of the zero polynomial is 0 by convention here.
    std::uint32_t degree() const;
    bool is_homogeneous(std::uint32_t* deg_out = nullptr) const;

    /// Accumulate c * x^e; zero coefficients are never stored.
    void add_term(ExpVec e, const gf::Fq& c);
    gf::Fq coeff(const ExpVec& e) const; // zero if absent

    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator*(const MPoly& o) const;
    MPoly scaled(const gf::Fq& c) const;
    bool operator==(const MPoly& o) const;

    /// Value at a point over an extension field; emb maps this->ctx() into the
    /// point's field.
    gf::Fq evaluate(std::span<const gf::Fq> point, const gf::Embedding& emb) const;
    gf::Fq evaluate(std::span<const gf::Fq> point) const; // same field

    MPoly partial(std::uint32_t i) const;
    /// Substitute x_j = 1 in a homogeneous polynomial; remaining variables
    /// keep their relative order. MathError if not homogeneous.
    MPoly dehomogenize(std::uint32_t j) const;
    MPoly base_change(const gf::Embedding& emb) const;
    /// Substitute y_i -> y_i + a_i, dropping terms of total degree > max_deg.
    MPoly translated(std::span<const gf::Fq> a, std::uint32_t max_deg) const;

    std::string format() const;

private:
    const gf::FieldCtx* ctx_;
    std::uint32_t nvars_;
    std::map<ExpVec, gf::Fq, GrlexFirst> terms_;
};

/// Grammar: variables x0..x{nvars-1}, integer literals, + - * ^ and
/// parentheses. Throws ConfigError with the offending position.
MPoly parse(const std::string& src, std::uint32_t nvars, const gf::FieldCtx& ctx);

/// Exponent vectors of total degree exactly d, graded-lex descending.
std::vector<ExpVec> monomial_basis(std::uint32_t nvars, std::uint32_t d);
/// Degrees 0..maxdeg ascending, graded-lex descending within each degree.
/// This is the dense jet coefficient layout: [1, y0, .., y_{n-1}, y0^2, ...].
std::vector<ExpVec> monomial_basis_upto(std::uint32_t nvars, std::uint32_t maxdeg);

inline std::uint64_t basis_size(std::uint32_t nvars, std::uint32_t d) {
    // C(d + nvars - 1, nvars - 1)
    std::uint64_t num = 1, den = 1;
    for (std::uint32_t i = 1; i < nvars; ++i) {
        num *= d + i;
        den *= i;
    }
    return num / den;
}

/// Truncated Taylor data of a section at a point: the image in the order-M
/// quotient, in chart coordinates with the point translated to the origin.
struct Jet {
    const gf::FieldCtx* field = nullptr; // kappa(x)
    std::uint32_t order = 0;             // M; stored degrees are < M
    std::uint32_t chart = 0;             // dehomogenized coordinate
    std::uint32_t nvars = 0;             // affine variable count
    std::vector<gf::Fq> coeffs;          // dense, monomial_basis_upto(nvars, M-1) order

    const gf::Fq& value() const { return coeffs[0]; }
    std::vector<gf::Fq> gradient() const;
    bool operator==(const Jet& o) const;
};

/// Jet of x_chart^{-deg f} * f at the given point of P^n: dehomogenize,
/// base-change, translate the point to the origin, truncate below order M.
/// point[chart] must be a unit; coordinates are divided by it first.
Jet jet_at_point(const MPoly& f_homog, std::span<const gf::Fq> point,
                 const gf::Embedding& emb, std::uint32_t M, std::uint32_t chart);

} // namespace cpsieve::mpoly
