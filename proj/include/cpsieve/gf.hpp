#pragma once

// Arithmetic in GF(p^k): contexts with deterministically chosen moduli,
// elements in the power basis, Frobenius, and compatible embeddings
// GF(p^s) -> GF(p^(s*r)). Contexts are interned and immutable, so elements
// only carry a raw pointer to theirs.

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cpsieve/errors.hpp"

namespace cpsieve::gf {

class FieldCtx;
class Fq;

/// Interned field context for GF(p^k). A given (p, k) always yields the same
/// object, with the lexicographically smallest monic irreducible modulus
/// (coefficient vectors compared little-endian, constant term first).
/// For k = 1 the modulus is x.
const FieldCtx& field(std::uint32_t p, std::uint32_t k);

class Fq {
public:
    Fq() = default; // invalid until assigned

    const FieldCtx& ctx() const { return *ctx_; }
    bool valid() const { return ctx_ != nullptr; }
    const std::vector<std::uint32_t>& coeffs() const { return c_; }
    bool is_zero() const;

    bool operator==(const Fq& o) const { return ctx_ == o.ctx_ && c_ == o.c_; }
    bool operator!=(const Fq& o) const { return !(*this == o); }

private:
    friend class FieldCtx;
    Fq(const FieldCtx* ctx, std::vector<std::uint32_t> c) : ctx_(ctx), c_(std::move(c)) {}
    const FieldCtx* ctx_ = nullptr;
    std::vector<std::uint32_t> c_; // size k, little-endian power basis
};

/// Lex order on the little-endian coefficient vector (c0 compared first).
/// This is the tie-break order used everywhere in the project.
bool lex_less(const Fq& a, const Fq& b);

class FieldCtx {
public:
    std::uint32_t p() const { return p_; }
    std::uint32_t k() const { return k_; }
    std::uint64_t q() const { return q_; }
    /// Monic modulus, k+1 little-endian coefficients.
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    Fq zero() const;
    Fq one() const;
    /// The power-basis root t of the modulus (requires k >= 2).
    Fq gen() const;
    /// Prime-subfield element n mod p.
    Fq from_int(std::int64_t n) const;
    Fq from_coeffs(std::vector<std::uint32_t> c) const;

    /// Positional encoding sum c_i p^i. Used for compact storage, not ordering.
    std::uint64_t index_of(const Fq& a) const;
    Fq from_index(std::uint64_t idx) const;
    /// Rank of the element in lex order of coefficient vectors: c0 is the
    /// most significant digit. from_lex_rank enumerates elements in lex order.
    std::uint64_t lex_rank(const Fq& a) const;
    Fq from_lex_rank(std::uint64_t r) const;

    Fq add(const Fq& a, const Fq& b) const;
    Fq sub(const Fq& a, const Fq& b) const;
    Fq neg(const Fq& a) const;
    Fq mul(const Fq& a, const Fq& b) const;
    /// Extended Euclid on representative polynomials; MathError on zero.
    Fq inv(const Fq& a) const;
    Fq div(const Fq& a, const Fq& b) const;
    /// Square-and-multiply; e may be negative for nonzero a.
    Fq pow(const Fq& a, std::int64_t e) const;
    /// a^(p^s); s must divide k.
    Fq frobenius(const Fq& a, std::uint32_t s) const;

    std::string to_string(const Fq& a) const; // "[c0,c1,...]" or bare integer for k=1

private:
    friend const FieldCtx& field(std::uint32_t, std::uint32_t);
    FieldCtx(std::uint32_t p, std::uint32_t k);

    void check(const Fq& a) const;
    std::vector<std::uint32_t> reduce(std::vector<std::uint32_t> poly) const;

    std::uint32_t p_, k_;
    std::uint64_t q_;
    std::vector<std::uint32_t> modulus_;
    // images of the basis monomials x^i under a -> a^p, as coefficient vectors
    std::vector<std::vector<std::uint32_t>> frob_basis_;
    // full permutation table for a -> a^p on positional indexes, small fields only
    mutable std::vector<std::uint32_t> frob_table_;
    mutable std::once_flag frob_table_once_;
};

inline Fq operator+(const Fq& a, const Fq& b) { return a.ctx().add(a, b); }
inline Fq operator-(const Fq& a, const Fq& b) { return a.ctx().sub(a, b); }
inline Fq operator-(const Fq& a) { return a.ctx().neg(a); }
inline Fq operator*(const Fq& a, const Fq& b) { return a.ctx().mul(a, b); }
inline Fq operator/(const Fq& a, const Fq& b) { return a.ctx().div(a, b); }

/// Ring embedding GF(p^s) -> GF(p^(s*r)) determined by sending the source
/// power-basis generator to the lexicographically smallest root of the source
/// modulus in the target. Interned and deterministic across runs.
class Embedding {
public:
    static const Embedding& get(const FieldCtx& src, const FieldCtx& dst);

    const FieldCtx& src() const { return *src_; }
    const FieldCtx& dst() const { return *dst_; }
    /// Image of the source power-basis root; for a prime-field source this is
    /// the root of the modulus x, i.e. zero.
    const Fq& generator_image() const { return root_; }
    bool is_identity() const { return src_ == dst_; }

    Fq apply(const Fq& a) const;

    /// Coordinates of a target element in the basis {phi(b_i) t^j} of
    /// GF(p^(s*r)) over GF(p^s): r source-field digits, little-endian in t.
    std::vector<Fq> restrict_scalars(const Fq& a) const;
    /// Inverse of restrict_scalars.
    Fq lift_scalars(std::span<const Fq> digits) const;

private:
    Embedding(const FieldCtx* src, const FieldCtx* dst);
    void build_restriction() const;

    const FieldCtx* src_;
    const FieldCtx* dst_;
    Fq root_;                          // image of the source generator
    std::vector<Fq> gen_powers_;       // phi(t_src^i), i < s
    std::vector<Fq> tower_basis_;      // phi(b_i) t^j in column order (j, i)
    mutable std::vector<std::vector<std::uint32_t>> restrict_inv_; // mod-p inverse
    mutable std::once_flag restrict_once_;
};

/// Deterministic primality test by trial division (fields here are small).
bool is_prime(std::uint64_t n);

} // namespace cpsieve::gf
