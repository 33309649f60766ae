#include "cpsieve/geom.hpp"

#include <algorithm>
#include <set>
#include <thread>
#include <unordered_set>

#include "cpsieve/errors.hpp"

namespace cpsieve::geom {

using gf::Embedding;
using gf::FieldCtx;
using gf::Fq;
using mpoly::MPoly;

ProjPoint ProjPoint::normalized(std::vector<Fq> coords) {
    if (coords.empty()) throw MathError("empty coordinate vector");
    const FieldCtx& F = coords[0].ctx();
    for (auto& c : coords)
        if (&c.ctx() != &F) throw MathError("mixed coordinate fields");
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!coords[i].is_zero()) {
            if (!(coords[i] == F.one())) {
                const Fq inv = F.inv(coords[i]);
                for (auto& c : coords) c = c * inv;
            }
            ProjPoint p;
            p.field = &F;
            p.coords = std::move(coords);
            return p;
        }
    }
    throw MathError("projective point cannot be all zero");
}

ProjPoint ProjPoint::make(const FieldCtx& F, const std::vector<std::int64_t>& ints) {
    std::vector<Fq> c;
    c.reserve(ints.size());
    for (auto v : ints) c.push_back(F.from_int(v));
    return normalized(std::move(c));
}

std::uint32_t ProjPoint::chart() const {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (!coords[i].is_zero()) return static_cast<std::uint32_t>(i);
    throw MathError("zero point");
}

std::vector<std::uint64_t> ProjPoint::key() const {
    std::vector<std::uint64_t> k;
    k.reserve(coords.size());
    for (const auto& c : coords) k.push_back(field->lex_rank(c));
    return k;
}

bool lex_less(const ProjPoint& a, const ProjPoint& b) {
    return a.key() < b.key();
}

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (auto v : k) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

ProjPoint frobenius_point(const ProjPoint& p, std::uint32_t s) {
    ProjPoint out;
    out.field = p.field;
    out.coords.reserve(p.coords.size());
    for (const auto& c : p.coords) out.coords.push_back(p.field->frobenius(c, s));
    return out; // normalization is preserved: 0 and 1 are fixed
}

} // namespace

ClosedPoint closed_point_of(const FieldCtx& base, const ProjPoint& pt) {
    if (pt.field->p() != base.p() || pt.field->k() % base.k() != 0)
        throw MathError("point field is not an extension of the base");
    const std::uint32_t s = base.k();
    std::vector<ProjPoint> orbit{pt};
    ProjPoint cur = frobenius_point(pt, s);
    while (!(cur == pt)) {
        orbit.push_back(cur);
        cur = frobenius_point(cur, s);
    }
    const std::uint32_t r = static_cast<std::uint32_t>(orbit.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < orbit.size(); ++i)
        if (lex_less(orbit[i], orbit[best])) best = i;
    std::rotate(orbit.begin(), orbit.begin() + static_cast<std::ptrdiff_t>(best), orbit.end());
    ClosedPoint x;
    x.rep = orbit[0];
    x.degree = r;
    x.orbit = std::move(orbit);
    x.base = &base;
    // kappa(x) = GF(p^(k*r)); the rep may live in a bigger field than its true
    // degree requires only if callers constructed it that way; keep the field
    // the rep is defined over.
    x.emb = &Embedding::get(base, *x.rep.field);
    return x;
}

bool Subscheme::contains(const ProjPoint& p) const {
    const Embedding& emb = Embedding::get(*base, *p.field);
    for (const auto& f : equations)
        if (!f.evaluate(p.coords, emb).is_zero()) return false;
    for (const auto& g : non_equations)
        if (g.evaluate(p.coords, emb).is_zero()) return false;
    // p is excluded iff it lies in the orbit of an excluded point
    for (const auto& ex : excluded) {
        if (p.field->k() % ex.field->k() != 0) continue;
        const Embedding& lift = Embedding::get(*ex.field, *p.field);
        ClosedPoint cx = closed_point_of(*base, ex);
        for (const auto& member : cx.orbit) {
            std::vector<Fq> up;
            up.reserve(member.coords.size());
            for (const auto& c : member.coords) up.push_back(lift.apply(c));
            if (ProjPoint::normalized(std::move(up)) == p) return false;
        }
    }
    return true;
}

Subscheme projective_space(const FieldCtx& base, std::uint32_t n) {
    Subscheme X;
    X.base = &base;
    X.n = n;
    X.dim = n;
    X.name = "P^" + std::to_string(n);
    return X;
}

namespace {

// Compiled membership test for one extension field: equations base-changed once.
struct MembershipTest {
    std::vector<MPoly> eqs, neqs;
    std::vector<std::vector<std::uint64_t>> excluded_keys; // normalized keys over ext

    bool operator()(const ProjPoint& p) const {
        for (const auto& f : eqs)
            if (!f.evaluate(p.coords).is_zero()) return false;
        for (const auto& g : neqs)
            if (g.evaluate(p.coords).is_zero()) return false;
        if (!excluded_keys.empty()) {
            const auto k = p.key();
            for (const auto& ek : excluded_keys)
                if (ek == k) return false;
        }
        return true;
    }
};

MembershipTest compile_membership(const Subscheme& X, const FieldCtx& ext) {
    MembershipTest t;
    const Embedding& emb = Embedding::get(*X.base, ext);
    for (const auto& f : X.equations) t.eqs.push_back(f.base_change(emb));
    for (const auto& g : X.non_equations) t.neqs.push_back(g.base_change(emb));
    for (const auto& ex : X.excluded) {
        if (ext.k() % ex.field->k() != 0) continue; // no realization in this field
        const Embedding& lift = Embedding::get(*ex.field, ext);
        ClosedPoint cx = closed_point_of(*X.base, ex);
        for (const auto& member : cx.orbit) {
            std::vector<Fq> up;
            up.reserve(member.coords.size());
            for (const auto& c : member.coords) up.push_back(lift.apply(c));
            t.excluded_keys.push_back(ProjPoint::normalized(std::move(up)).key());
        }
    }
    std::sort(t.excluded_keys.begin(), t.excluded_keys.end());
    return t;
}

std::uint64_t pow_u64_checked(std::uint64_t b, std::uint64_t e, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (r > cap / b) return cap + 1;
        r *= b;
    }
    return r;
}

} // namespace

std::vector<ProjPoint> enumerate_points(const Subscheme& X, std::uint32_t r,
                                        const EnumOptions& opt) {
    if (r < 1) throw MathError("extension degree must be positive");
    const FieldCtx& base = *X.base;
    const FieldCtx& ext = gf::field(base.p(), base.k() * r);
    const std::uint64_t qr = ext.q();
    // total candidates = (q^(r(n+1)) - 1) / (q^r - 1); overestimate with powers
    std::uint64_t candidates = 0;
    for (std::uint32_t j = 0; j <= X.n; ++j) {
        const std::uint64_t c = pow_u64_checked(qr, X.n - j, opt.candidate_budget);
        if (c > opt.candidate_budget || candidates + c > opt.candidate_budget)
            throw BudgetError("enumeration of P^" + std::to_string(X.n) + "(F_" +
                              std::to_string(base.q()) + "^" + std::to_string(r) +
                              ") exceeds the candidate budget (" +
                              std::to_string(opt.candidate_budget) +
                              "); raise --budget or lower the degree cutoff");
        candidates += c;
    }
    const MembershipTest member = compile_membership(X, ext);

    std::vector<ProjPoint> out;
    // charts in output lex order: leading zeros first
    for (std::uint32_t j = X.n + 1; j-- > 0;) {
        const std::uint32_t nfree = X.n - j;
        const std::uint64_t chunk_count = pow_u64_checked(qr, nfree, opt.candidate_budget);
        auto emit_range = [&](std::uint64_t lo, std::uint64_t hi, std::vector<ProjPoint>& sink) {
            // odometer over the free coordinates, lex order, c_{j+1} most significant
            std::vector<std::uint64_t> digits(nfree, 0);
            std::uint64_t idx = lo;
            {
                std::uint64_t v = lo;
                for (std::uint32_t i = nfree; i-- > 0;) {
                    digits[i] = v % qr;
                    v /= qr;
                }
            }
            std::vector<Fq> coords(X.n + 1, ext.zero());
            coords[j] = ext.one();
            for (; idx < hi; ++idx) {
                for (std::uint32_t i = 0; i < nfree; ++i)
                    coords[j + 1 + i] = ext.from_lex_rank(digits[i]);
                ProjPoint p;
                p.field = &ext;
                p.coords = coords;
                if (member(p)) sink.push_back(std::move(p));
                for (std::uint32_t i = nfree; i-- > 0;) {
                    if (++digits[i] < qr) break;
                    digits[i] = 0;
                }
            }
        };
        const std::uint32_t nthreads =
            std::max<std::uint32_t>(1, std::min<std::uint64_t>(opt.threads, chunk_count));
        if (nthreads <= 1 || chunk_count < 4096) {
            emit_range(0, chunk_count, out);
        } else {
            std::vector<std::vector<ProjPoint>> parts(nthreads);
            std::vector<std::thread> workers;
            for (std::uint32_t t = 0; t < nthreads; ++t) {
                const std::uint64_t lo = chunk_count * t / nthreads;
                const std::uint64_t hi = chunk_count * (t + 1) / nthreads;
                workers.emplace_back([&, t, lo, hi] { emit_range(lo, hi, parts[t]); });
            }
            for (auto& w : workers) w.join();
            for (auto& part : parts)
                for (auto& p : part) out.push_back(std::move(p));
        }
    }
    return out;
}

std::uint64_t count_points(const Subscheme& X, std::uint32_t r, const EnumOptions& opt) {
    return enumerate_points(X, r, opt).size();
}

std::vector<ClosedPoint> closed_points(const Subscheme& X, std::uint32_t E,
                                       const EnumOptions& opt) {
    if (E < 1) throw MathError("degree cutoff must be positive");
    const FieldCtx& base = *X.base;
    std::vector<ClosedPoint> out;
    for (std::uint32_t r = 1; r <= E; ++r) {
        const auto pts = enumerate_points(X, r, opt);
        std::unordered_set<std::vector<std::uint64_t>, KeyHash> seen;
        for (const auto& p : pts) {
            if (seen.count(p.key())) continue;
            ClosedPoint x = closed_point_of(base, p);
            for (const auto& member : x.orbit) {
                seen.insert(member.key());
                // membership must be Frobenius stable since X is defined over F_q
                if (!(member == p) && !X.contains(member))
                    throw MathError("Frobenius conjugate escaped the scheme (internal error)");
            }
            if (x.degree == r) out.push_back(std::move(x));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const ClosedPoint& a, const ClosedPoint& b) {
        if (a.degree != b.degree) return a.degree < b.degree;
        return a.rep.key() < b.rep.key();
    });
    return out;
}

int moebius_mu(std::uint32_t n) {
    int mu = 1;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            n /= d;
            if (n % d == 0) return 0;
            mu = -mu;
        }
    }
    if (n > 1) mu = -mu;
    return mu;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> closed_point_counts_moebius(
    const Subscheme& X, std::uint32_t E, const EnumOptions& opt) {
    std::vector<std::uint64_t> N(E + 1, 0);
    for (std::uint32_t d = 1; d <= E; ++d) N[d] = count_points(X, d, opt);
    std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
    for (std::uint32_t r = 1; r <= E; ++r) {
        std::int64_t sum = 0;
        for (std::uint32_t d = 1; d <= r; ++d) {
            if (r % d) continue;
            sum += static_cast<std::int64_t>(moebius_mu(r / d)) * static_cast<std::int64_t>(N[d]);
        }
        if (sum < 0 || sum % r != 0)
            throw MathError("Moebius inversion produced a non-integral count (internal error)");
        out.emplace_back(r, static_cast<std::uint64_t>(sum / r));
    }
    return out;
}

ZetaTruncation zeta_inverse_truncated(const Subscheme& X, std::uint32_t s, std::uint32_t E,
                                      const EnumOptions& opt) {
    if (s < 1) throw MathError("zeta argument must be positive");
    const auto counts = closed_point_counts_moebius(X, E, opt);
    const BigInt q = X.base->q();
    ZetaTruncation z;
    z.s = s;
    z.E = E;
    z.value = 1;
    const std::uint32_t m = X.declared_dim();
    z.converges = s > m;
    Rational max_ratio = 0; // measured Lang-Weil constant C = max c_r * r / q^(r m)
    for (const auto& [r, c] : counts) {
        const Rational factor_base = Rational(big_pow(q, std::uint64_t(s) * r) - 1,
                                              big_pow(q, std::uint64_t(s) * r));
        const Rational factor = rational_pow(factor_base, static_cast<std::int64_t>(c));
        z.value *= factor;
        z.per_degree.push_back({r, c, factor, z.value});
        const Rational ratio =
            Rational(BigInt(c) * r, big_pow(q, std::uint64_t(m) * r));
        if (ratio > max_ratio) max_ratio = ratio;
    }
    if (z.converges && E >= 1) {
        // sum_{r > E} C q^{rm} / r * q^{-sr} <= C q^{(m-s)(E+1)} / (1 - q^{m-s})
        const Rational x = rational_pow(Rational(1, q), static_cast<std::int64_t>(s - m));
        z.tail_bound = max_ratio * rational_pow(x, static_cast<std::int64_t>(E + 1)) / (1 - x);
    }
    return z;
}

std::optional<Rational> closed_form_zeta_inverse(const Subscheme& X, std::uint32_t s) {
    if (!X.equations.empty() || !X.non_equations.empty()) return std::nullopt;
    for (const auto& ex : X.excluded)
        if (closed_point_of(*X.base, ex).degree != 1) return std::nullopt;
    // zeta_{P^n}(s)^{-1} = prod_{i=0..n} (1 - q^{i-s}); each removed rational
    // point divides zeta by (1 - q^{-s})^{-1}.
    const BigInt q = X.base->q();
    Rational v = 1;
    for (std::uint32_t i = 0; i <= X.n; ++i) {
        if (i >= s) return std::nullopt; // divergent closed form
        v *= 1 - Rational(big_pow(q, i), big_pow(q, s));
    }
    const Rational point_factor = 1 - Rational(1, big_pow(q, s));
    for (std::size_t i = 0; i < X.excluded.size(); ++i) v /= point_factor;
    return v;
}

mpoly::Jet jet_at(const MPoly& f, const ClosedPoint& x, std::uint32_t M) {
    return jet_at_chart(f, x, M, x.chart(), nullptr);
}

mpoly::Jet jet_at_chart(const MPoly& f, const ClosedPoint& x, std::uint32_t M, std::uint32_t chart,
                        const ProjPoint* rep) {
    const ProjPoint& p = rep ? *rep : x.rep;
    return mpoly::jet_at_point(f, p.coords, *x.emb, M, chart);
}

} // namespace cpsieve::geom
