#include "cpsieve/mpoly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

#include "cpsieve/errors.hpp"

namespace cpsieve::mpoly {

using gf::Embedding;
using gf::FieldCtx;
using gf::Fq;

std::uint32_t MPoly::degree() const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
}

bool MPoly::is_homogeneous(std::uint32_t* deg_out) const {
    if (terms_.empty()) {
        if (deg_out) *deg_out = 0;
        return true;
    }
    const std::uint32_t d = total_degree(terms_.begin()->first);
    for (const auto& [e, c] : terms_)
        if (total_degree(e) != d) return false;
    if (deg_out) *deg_out = d;
    return true;
}

void MPoly::add_term(ExpVec e, const Fq& c) {
    if (e.size() != nvars_) throw MathError("exponent vector has wrong arity");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(std::move(e), c);
        return;
    }
    Fq s = it->second + c;
    if (s.is_zero())
        terms_.erase(it);
    else
        it->second = s;
}

Fq MPoly::coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? ctx_->zero() : it->second;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const {
    MPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, ctx_->neg(c));
    return r;
}

MPoly MPoly::operator*(const MPoly& o) const {
    MPoly r(*ctx_, nvars_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            ExpVec e(nvars_);
            for (std::uint32_t i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
            r.add_term(std::move(e), c1 * c2);
        }
    }
    return r;
}

MPoly MPoly::scaled(const Fq& c) const {
    MPoly r(*ctx_, nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, co] : terms_) r.add_term(e, co * c);
    return r;
}

bool MPoly::operator==(const MPoly& o) const {
    return ctx_ == o.ctx_ && nvars_ == o.nvars_ && terms_ == o.terms_;
}

gf::Fq MPoly::evaluate(std::span<const Fq> point, const Embedding& emb) const {
    if (point.size() != nvars_) throw MathError("point arity mismatch");
    if (&emb.src() != ctx_) throw MathError("embedding source does not match coefficients");
    const FieldCtx& F = emb.dst();
    for (const auto& pt : point)
        if (&pt.ctx() != &F) throw MathError("point coordinates in wrong field");
    // memoized powers per variable
    std::vector<std::vector<Fq>> pows(nvars_);
    for (std::uint32_t i = 0; i < nvars_; ++i) pows[i].push_back(F.one());
    auto power = [&](std::uint32_t i, std::uint32_t e) {
        auto& tbl = pows[i];
        while (tbl.size() <= e) tbl.push_back(tbl.back() * point[i]);
        return tbl[e];
    };
    Fq acc = F.zero();
    for (const auto& [e, c] : terms_) {
        Fq t = emb.is_identity() ? c : emb.apply(c);
        for (std::uint32_t i = 0; i < nvars_; ++i)
            if (e[i]) t = t * power(i, e[i]);
        acc = acc + t;
    }
    return acc;
}

gf::Fq MPoly::evaluate(std::span<const Fq> point) const {
    return evaluate(point, Embedding::get(*ctx_, *ctx_));
}

MPoly MPoly::partial(std::uint32_t i) const {
    if (i >= nvars_) throw MathError("variable index out of range");
    MPoly r(*ctx_, nvars_);
    for (const auto& [e, c] : terms_) {
        if (!e[i]) continue;
        ExpVec ne = e;
        ne[i] -= 1;
        r.add_term(std::move(ne), c * ctx_->from_int(e[i]));
    }
    return r;
}

MPoly MPoly::dehomogenize(std::uint32_t j) const {
    if (j >= nvars_) throw MathError("chart index out of range");
    if (!is_homogeneous()) throw MathError("dehomogenize requires a homogeneous polynomial");
    MPoly r(*ctx_, nvars_ - 1);
    for (const auto& [e, c] : terms_) {
        ExpVec ne;
        ne.reserve(nvars_ - 1);
        for (std::uint32_t i = 0; i < nvars_; ++i)
            if (i != j) ne.push_back(e[i]);
        r.add_term(std::move(ne), c);
    }
    return r;
}

MPoly MPoly::base_change(const Embedding& emb) const {
    if (&emb.src() != ctx_) throw MathError("embedding source mismatch");
    MPoly r(emb.dst(), nvars_);
    for (const auto& [e, c] : terms_) r.add_term(e, emb.apply(c));
    return r;
}

namespace {

// binomial coefficients mod p via Pascal's triangle, cached per p
std::uint32_t binom_mod(std::uint32_t n, std::uint32_t r, std::uint32_t p) {
    static std::mutex mtx;
    static std::map<std::uint32_t, std::vector<std::vector<std::uint32_t>>> cache;
    std::lock_guard lock(mtx);
    auto& tri = cache[p];
    while (tri.size() <= n) {
        const std::size_t m = tri.size();
        std::vector<std::uint32_t> row(m + 1, 1);
        for (std::size_t i = 1; i < m; ++i) row[i] = (tri[m - 1][i - 1] + tri[m - 1][i]) % p;
        tri.push_back(std::move(row));
    }
    return tri[n][r];
}

} // namespace

MPoly MPoly::translated(std::span<const Fq> a, std::uint32_t max_deg) const {
    if (a.size() != nvars_) throw MathError("translation vector arity mismatch");
    const std::uint32_t p = ctx_->p();
    MPoly result(*ctx_, nvars_);
    for (const auto& [e, c] : terms_) {
        // expand prod_i (y_i + a_i)^{e_i}, truncated
        std::map<ExpVec, Fq, GrlexFirst> acc;
        acc.emplace(ExpVec(nvars_, 0), c);
        for (std::uint32_t i = 0; i < nvars_; ++i) {
            if (!e[i]) continue;
            std::map<ExpVec, Fq, GrlexFirst> next;
            const std::uint32_t ei = e[i];
            for (std::uint32_t j = 0; j <= std::min(ei, max_deg); ++j) {
                const std::uint32_t bc = binom_mod(ei, j, p);
                if (!bc) continue;
                Fq factor = ctx_->from_int(bc);
                if (ei - j > 0) {
                    if (a[i].is_zero()) continue;
                    factor = factor * ctx_->pow(a[i], ei - j);
                }
                for (const auto& [be, bc2] : acc) {
                    if (total_degree(be) + j > max_deg) continue;
                    ExpVec ne = be;
                    ne[i] += j;
                    Fq v = bc2 * factor;
                    auto it = next.find(ne);
                    if (it == next.end())
                        next.emplace(std::move(ne), v);
                    else {
                        it->second = it->second + v;
                        if (it->second.is_zero()) next.erase(it);
                    }
                }
            }
            acc = std::move(next);
        }
        for (const auto& [ne, nc] : acc) result.add_term(ne, nc);
    }
    return result;
}

std::string MPoly::format() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Fq coeff = c;
        if (!first) {
            // print "- term" when the coefficient is a prime-field negative
            bool neg = false;
            if (ctx_->k() == 1) {
                const std::uint32_t v = c.coeffs()[0];
                if (v > ctx_->p() / 2) {
                    neg = true;
                    coeff = ctx_->neg(c);
                }
            }
            os << (neg ? " - " : " + ");
        }
        first = false;
        const bool constant = total_degree(e) == 0;
        const bool unit = coeff == ctx_->one();
        if (!unit || constant) os << ctx_->to_string(coeff);
        bool started = !unit || constant;
        for (std::uint32_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (started) os << "*";
            started = true;
            os << "x" << i;
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Parser {
    const std::string& src;
    std::size_t pos = 0;
    std::uint32_t nvars;
    const FieldCtx& ctx;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("polynomial syntax error at position " + std::to_string(pos) + ": " +
                          what);
    }
    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    std::uint64_t integer() {
        skip_ws();
        if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
            fail("expected integer");
        std::uint64_t v = 0;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            v = v * 10 + static_cast<std::uint64_t>(src[pos] - '0');
            if (v > (std::uint64_t(1) << 60)) fail("integer literal too large");
            ++pos;
        }
        return v;
    }

    MPoly atom() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        const char c = src[pos];
        if (c == '(') {
            ++pos;
            MPoly e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (c == 'x') {
            ++pos;
            const std::uint64_t idx = integer();
            if (idx >= nvars)
                fail("variable index " + std::to_string(idx) + " out of range (nvars=" +
                     std::to_string(nvars) + ")");
            MPoly m(ctx, nvars);
            ExpVec e(nvars, 0);
            e[static_cast<std::size_t>(idx)] = 1;
            m.add_term(std::move(e), ctx.one());
            return m;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::uint64_t v = integer();
            MPoly m(ctx, nvars);
            m.add_term(ExpVec(nvars, 0), ctx.from_int(static_cast<std::int64_t>(v % ctx.p())));
            return m;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    MPoly power() {
        bool neg = false;
        while (true) {
            if (eat('-'))
                neg = !neg;
            else if (eat('+'))
                ;
            else
                break;
        }
        MPoly b = atom();
        if (eat('^')) {
            const std::uint64_t e = integer();
            if (e > 4096) fail("exponent too large");
            MPoly r(ctx, nvars);
            r.add_term(ExpVec(nvars, 0), ctx.one());
            for (std::uint64_t i = 0; i < e; ++i) r = r * b;
            b = r;
        }
        return neg ? b.scaled(ctx.neg(ctx.one())) : b;
    }

    MPoly term() {
        MPoly r = power();
        while (eat('*')) r = r * power();
        return r;
    }

    MPoly expr() {
        MPoly r = term();
        for (;;) {
            skip_ws();
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                break;
        }
        return r;
    }
};

} // namespace

MPoly parse(const std::string& src, std::uint32_t nvars, const FieldCtx& ctx) {
    Parser p{src, 0, nvars, ctx};
    MPoly r = p.expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("trailing input");
    return r;
}

// ---------------------------------------------------------------------------
// monomial bases and jets

std::vector<ExpVec> monomial_basis(std::uint32_t nvars, std::uint32_t d) {
    std::vector<ExpVec> out;
    ExpVec cur(nvars, 0);
    // lex-descending enumeration of compositions of d
    auto rec = [&](auto&& self, std::uint32_t pos, std::uint32_t rem) -> void {
        if (pos + 1 == nvars) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (std::uint32_t e = rem + 1; e-- > 0;) {
            cur[pos] = e;
            self(self, pos + 1, rem - e);
        }
    };
    if (nvars == 0) return out;
    rec(rec, 0, d);
    return out;
}

std::vector<ExpVec> monomial_basis_upto(std::uint32_t nvars, std::uint32_t maxdeg) {
    std::vector<ExpVec> out;
    for (std::uint32_t d = 0; d <= maxdeg; ++d) {
        auto b = monomial_basis(nvars, d);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

std::vector<gf::Fq> Jet::gradient() const {
    std::vector<Fq> g;
    if (order < 2) return g;
    g.assign(coeffs.begin() + 1, coeffs.begin() + 1 + nvars);
    return g;
}

bool Jet::operator==(const Jet& o) const {
    return field == o.field && order == o.order && chart == o.chart && nvars == o.nvars &&
           coeffs == o.coeffs;
}

Jet jet_at_point(const MPoly& f, std::span<const Fq> point, const Embedding& emb, std::uint32_t M,
                 std::uint32_t chart) {
    if (M < 1) throw MathError("jet order must be at least 1");
    std::uint32_t d = 0;
    if (!f.is_homogeneous(&d)) throw MathError("jet_at requires a homogeneous polynomial");
    const FieldCtx& K = emb.dst();
    if (point.size() != f.nvars()) throw MathError("point arity mismatch");
    if (chart >= f.nvars()) throw MathError("chart index out of range");
    const Fq& u = point[chart];
    if (u.is_zero()) throw MathError("chart coordinate vanishes at the point");
    // In the chart {x_j != 0} with y_i = x_i/x_j, the function x_j^{-d} f is the
    // dehomogenization g evaluated near the affine coordinates of the point.
    const Fq uinv = K.inv(u);
    std::vector<Fq> aff;
    aff.reserve(f.nvars() - 1);
    for (std::uint32_t i = 0; i < f.nvars(); ++i)
        if (i != chart) aff.push_back(point[i] * uinv);
    MPoly g = f.dehomogenize(chart).base_change(emb);
    MPoly t = g.translated(aff, M - 1);
    Jet jet;
    jet.field = &K;
    jet.order = M;
    jet.chart = chart;
    jet.nvars = f.nvars() - 1;
    const auto basis = monomial_basis_upto(jet.nvars, M - 1);
    jet.coeffs.reserve(basis.size());
    for (const auto& e : basis) jet.coeffs.push_back(t.coeff(e));
    return jet;
}

} // namespace cpsieve::mpoly
