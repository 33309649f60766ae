#pragma once

// Quasiprojective subschemes of P^n over F_q given by vanishing and
// non-vanishing conditions plus excluded closed points; point enumeration,
// Frobenius orbits, Moebius-inverted closed point counts, and truncated
// zeta Euler products with exact rational values.

#include <cstdint>
#include <optional>
#include <vector>

#include "cpsieve/mpoly.hpp"
#include "cpsieve/rational.hpp"

namespace cpsieve::geom {

struct ProjPoint {
    const gf::FieldCtx* field = nullptr;
    std::vector<gf::Fq> coords; // first nonzero coordinate is 1

    /// Scale so the first nonzero coordinate is 1. MathError if all zero.
    static ProjPoint normalized(std::vector<gf::Fq> coords);
    /// Convenience for prime-subfield coordinates given as integers.
    static ProjPoint make(const gf::FieldCtx& F, const std::vector<std::int64_t>& ints);

    std::uint32_t chart() const; // first nonzero coordinate index
    std::vector<std::uint64_t> key() const; // per-coordinate lex ranks
    bool operator==(const ProjPoint& o) const { return field == o.field && coords == o.coords; }
};

bool lex_less(const ProjPoint& a, const ProjPoint& b);

/// A Frobenius orbit of points of P^n(F_{q^r}) of exact degree r over the base.
struct ClosedPoint {
    ProjPoint rep;                 // lex-smallest orbit member
    std::uint32_t degree = 0;      // r
    std::vector<ProjPoint> orbit;  // all r conjugates, rep first
    const gf::FieldCtx* base = nullptr;
    const gf::Embedding* emb = nullptr; // base -> kappa(x)

    const gf::FieldCtx& residue_field() const { return *rep.field; }
    std::uint32_t chart() const { return rep.chart(); }
};

/// Build the closed point containing `pt` (over some extension of base).
ClosedPoint closed_point_of(const gf::FieldCtx& base, const ProjPoint& pt);

struct EnumOptions {
    std::uint64_t candidate_budget = std::uint64_t(1) << 28;
    std::uint32_t threads = 1;
};

struct Subscheme {
    const gf::FieldCtx* base = nullptr;
    std::uint32_t n = 0; // ambient projective dimension
    std::vector<mpoly::MPoly> equations;     // must vanish
    std::vector<mpoly::MPoly> non_equations; // must not vanish
    std::vector<ProjPoint> excluded;         // closed points to remove (any representative)
    std::optional<std::uint32_t> dim;        // user-declared dimension m
    std::string name;                        // for reports

    bool contains(const ProjPoint& p) const;
    bool contains(const ClosedPoint& x) const { return contains(x.rep); }
    std::uint32_t declared_dim() const { return dim.value_or(n); }
};

/// Scheme of P^n itself.
Subscheme projective_space(const gf::FieldCtx& base, std::uint32_t n);

/// All points of X(F_{q^r}) as normalized representatives, in lex order of
/// coordinate encodings. BudgetError when the candidate count exceeds the
/// budget.
std::vector<ProjPoint> enumerate_points(const Subscheme& X, std::uint32_t r,
                                        const EnumOptions& opt = {});

std::uint64_t count_points(const Subscheme& X, std::uint32_t r, const EnumOptions& opt = {});

/// Closed points of X of degree at most E, sorted by (degree, lex rep).
std::vector<ClosedPoint> closed_points(const Subscheme& X, std::uint32_t E,
                                       const EnumOptions& opt = {});

/// c_r = (1/r) sum_{d | r} mu(r/d) N_d for r <= E. Independent of the orbit
/// partition; the two are cross-checked in tests.
std::vector<std::pair<std::uint32_t, std::uint64_t>> closed_point_counts_moebius(
    const Subscheme& X, std::uint32_t E, const EnumOptions& opt = {});

struct ZetaTruncation {
    std::uint32_t s = 0, E = 0;
    Rational value; // prod_{r <= E} (1 - q^{-s r})^{c_r}
    struct Row {
        std::uint32_t r;
        std::uint64_t count;
        Rational factor;  // (1 - q^{-s r})^{c_r}
        Rational partial; // running product
    };
    std::vector<Row> per_degree;
    bool converges = true; // s > declared dim
    std::optional<Rational> tail_bound; // Lang-Weil style, when s > m
};

ZetaTruncation zeta_inverse_truncated(const Subscheme& X, std::uint32_t s, std::uint32_t E,
                                      const EnumOptions& opt = {});

/// Closed form of zeta_X(s)^{-1} for P^n minus a finite set of rational
/// points (covers every built-in special).
std::optional<Rational> closed_form_zeta_inverse(const Subscheme& X, std::uint32_t s);

int moebius_mu(std::uint32_t n);

/// Jet of x_j^{-d} f at the canonical representative, canonical chart.
mpoly::Jet jet_at(const mpoly::MPoly& f, const ClosedPoint& x, std::uint32_t M);
/// Same, explicit chart and optional alternate orbit representative.
mpoly::Jet jet_at_chart(const mpoly::MPoly& f, const ClosedPoint& x, std::uint32_t M,
                        std::uint32_t chart, const ProjPoint* rep = nullptr);

} // namespace cpsieve::geom
