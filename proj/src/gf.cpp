#include "cpsieve/gf.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

namespace cpsieve::gf {

namespace {

using Poly = std::vector<std::uint32_t>; // little-endian, over Z_p

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] = static_cast<std::uint32_t>(
                (out[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
        }
    }
    trim(out);
    return out;
}

// a mod m, m monic
Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    while (a.size() > dm) {
        const std::uint32_t c = a.back();
        const std::size_t shift = a.size() - 1 - dm;
        if (c) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                std::uint64_t v = a[shift + i] + static_cast<std::uint64_t>(p) * p
                                  - static_cast<std::uint64_t>(c) * m[i] % p;
                a[shift + i] = static_cast<std::uint32_t>(v % p);
            }
        }
        a.pop_back();
        trim(a);
        if (a.size() <= dm) break;
    }
    return a;
}

std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
    // Fermat; p prime
    std::uint64_t r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

Poly poly_gcd(Poly a, Poly b, std::uint32_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        const std::uint32_t lc = inv_mod_p(b.back(), p);
        Poly bm(b.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            bm[i] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(b[i]) * lc % p);
        Poly r = poly_mod(a, bm, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p) {
    Poly result{1};
    base = poly_mod(std::move(base), m, p);
    while (e) {
        if (e & 1) result = poly_mod(poly_mul(result, base, p), m, p);
        base = poly_mod(poly_mul(base, base, p), m, p);
        e >>= 1;
    }
    return result;
}

// f monic of degree k. Irreducible iff gcd(f, x^(p^i) - x) = 1 for i <= k/2.
bool is_irreducible(const Poly& f, std::uint32_t p) {
    const std::size_t k = f.size() - 1;
    if (k == 1) return true;
    Poly xp{0, 1};
    for (std::size_t i = 1; i <= k / 2; ++i) {
        xp = poly_powmod(std::move(xp), p, f, p); // x^(p^i) mod f
        Poly diff = xp;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = (diff[1] + p - 1) % p;
        Poly g = poly_gcd(f, diff, p);
        if (g.size() >= 2) return false;
    }
    return true;
}

Poly lex_min_irreducible(std::uint32_t p, std::uint32_t k) {
    if (k == 1) return {0, 1};
    // odometer over (c0,...,c_{k-1}) with c0 the most significant wheel
    std::vector<std::uint32_t> tail(k, 0);
    for (;;) {
        Poly f(tail);
        f.push_back(1);
        if (is_irreducible(f, p)) return f;
        int pos = static_cast<int>(k) - 1;
        while (pos >= 0 && ++tail[pos] == p) tail[pos--] = 0;
        if (pos < 0) throw MathError("no irreducible polynomial found (impossible)");
    }
}

} // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

FieldCtx::FieldCtx(std::uint32_t p, std::uint32_t k) : p_(p), k_(k) {
    if (!is_prime(p)) throw MathError("field characteristic " + std::to_string(p) + " is not prime");
    if (k == 0) throw MathError("extension degree must be positive");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        if (q > (std::uint64_t(1) << 62) / p) throw MathError("field too large");
        q *= p;
    }
    q_ = q;
    modulus_ = lex_min_irreducible(p, k);
    // Frobenius a -> a^p as a linear map: images of x^i mod modulus
    frob_basis_.resize(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        Poly xi(i + 1, 0);
        xi[i] = 1;
        Poly im = poly_powmod(xi, p_, modulus_, p_);
        im.resize(k_, 0);
        frob_basis_[i] = std::move(im);
    }
}

const FieldCtx& field(std::uint32_t p, std::uint32_t k) {
    static std::mutex mtx;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<FieldCtx>> registry;
    std::lock_guard lock(mtx);
    auto& slot = registry[{p, k}];
    if (!slot) slot.reset(new FieldCtx(p, k));
    return *slot;
}

bool Fq::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](std::uint32_t x) { return x == 0; });
}

bool lex_less(const Fq& a, const Fq& b) {
    return std::lexicographical_compare(a.coeffs().begin(), a.coeffs().end(),
                                        b.coeffs().begin(), b.coeffs().end());
}

void FieldCtx::check(const Fq& a) const {
    if (&a.ctx() != this) throw MathError("field context mismatch");
}

Fq FieldCtx::zero() const { return Fq(this, std::vector<std::uint32_t>(k_, 0)); }

Fq FieldCtx::one() const {
    std::vector<std::uint32_t> c(k_, 0);
    c[0] = 1;
    return Fq(this, std::move(c));
}

Fq FieldCtx::gen() const {
    if (k_ < 2) throw MathError("prime field has no power-basis generator");
    std::vector<std::uint32_t> c(k_, 0);
    c[1] = 1;
    return Fq(this, std::move(c));
}

Fq FieldCtx::from_int(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    std::vector<std::uint32_t> c(k_, 0);
    c[0] = static_cast<std::uint32_t>(r);
    return Fq(this, std::move(c));
}

Fq FieldCtx::from_coeffs(std::vector<std::uint32_t> c) const {
    if (c.size() != k_) throw MathError("coefficient vector has wrong length");
    for (auto& x : c) x %= p_;
    return Fq(this, std::move(c));
}

std::uint64_t FieldCtx::index_of(const Fq& a) const {
    check(a);
    std::uint64_t idx = 0;
    for (std::uint32_t i = k_; i-- > 0;) idx = idx * p_ + a.coeffs()[i];
    return idx;
}

Fq FieldCtx::from_index(std::uint64_t idx) const {
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        c[i] = static_cast<std::uint32_t>(idx % p_);
        idx /= p_;
    }
    return Fq(this, std::move(c));
}

std::uint64_t FieldCtx::lex_rank(const Fq& a) const {
    check(a);
    std::uint64_t r = 0;
    for (std::uint32_t i = 0; i < k_; ++i) r = r * p_ + a.coeffs()[i];
    return r;
}

Fq FieldCtx::from_lex_rank(std::uint64_t r) const {
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = k_; i-- > 0;) {
        c[i] = static_cast<std::uint32_t>(r % p_);
        r /= p_;
    }
    return Fq(this, std::move(c));
}

Fq FieldCtx::add(const Fq& a, const Fq& b) const {
    check(a);
    check(b);
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        std::uint32_t s = a.coeffs()[i] + b.coeffs()[i];
        c[i] = s >= p_ ? s - p_ : s;
    }
    return Fq(this, std::move(c));
}

Fq FieldCtx::sub(const Fq& a, const Fq& b) const {
    check(a);
    check(b);
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        std::uint32_t s = a.coeffs()[i] + p_ - b.coeffs()[i];
        c[i] = s >= p_ ? s - p_ : s;
    }
    return Fq(this, std::move(c));
}

Fq FieldCtx::neg(const Fq& a) const {
    check(a);
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) c[i] = a.coeffs()[i] ? p_ - a.coeffs()[i] : 0;
    return Fq(this, std::move(c));
}

std::vector<std::uint32_t> FieldCtx::reduce(Poly poly) const {
    poly = poly_mod(std::move(poly), modulus_, p_);
    poly.resize(k_, 0);
    return poly;
}

Fq FieldCtx::mul(const Fq& a, const Fq& b) const {
    check(a);
    check(b);
    return Fq(this, reduce(poly_mul(a.coeffs(), b.coeffs(), p_)));
}

Fq FieldCtx::inv(const Fq& a) const {
    check(a);
    if (a.is_zero()) throw MathError("inversion of zero");
    // extended Euclid: s*a + t*mod = gcd
    Poly r0 = modulus_, r1 = a.coeffs();
    trim(r1);
    Poly s0{}, s1{1};
    while (!r1.empty()) {
        // divide r0 by r1: quotient q
        const std::uint32_t lcinv = inv_mod_p(r1.back(), p_);
        Poly q;
        Poly rem = r0;
        trim(rem);
        if (rem.size() >= r1.size()) q.assign(rem.size() - r1.size() + 1, 0);
        while (rem.size() >= r1.size() && !rem.empty()) {
            const std::uint32_t c = static_cast<std::uint32_t>(
                static_cast<std::uint64_t>(rem.back()) * lcinv % p_);
            const std::size_t shift = rem.size() - r1.size();
            q[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i) {
                std::uint64_t v = rem[shift + i] + static_cast<std::uint64_t>(p_) * p_
                                  - static_cast<std::uint64_t>(c) * r1[i] % p_;
                rem[shift + i] = static_cast<std::uint32_t>(v % p_);
            }
            trim(rem);
        }
        Poly qs1 = poly_mul(q, s1, p_);
        Poly ns(std::max(s0.size(), qs1.size()), 0);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            std::uint64_t v = (i < s0.size() ? s0[i] : 0) + static_cast<std::uint64_t>(p_)
                              - (i < qs1.size() ? qs1[i] : 0);
            ns[i] = static_cast<std::uint32_t>(v % p_);
        }
        trim(ns);
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(ns);
    }
    // r0 is a nonzero constant gcd
    const std::uint32_t c = inv_mod_p(r0[0], p_);
    Poly res(s0);
    for (auto& x : res) x = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) * c % p_);
    return Fq(this, reduce(std::move(res)));
}

Fq FieldCtx::div(const Fq& a, const Fq& b) const { return mul(a, inv(b)); }

Fq FieldCtx::pow(const Fq& a, std::int64_t e) const {
    check(a);
    Fq base = a;
    if (e < 0) {
        base = inv(a);
        e = -e;
    }
    Fq r = one();
    std::uint64_t ue = static_cast<std::uint64_t>(e);
    while (ue) {
        if (ue & 1) r = mul(r, base);
        base = mul(base, base);
        ue >>= 1;
    }
    return r;
}

Fq FieldCtx::frobenius(const Fq& a, std::uint32_t s) const {
    check(a);
    if (s == 0 || k_ % s != 0) throw MathError("frobenius power must divide extension degree");
    // a -> a^p is F_p-linear; apply it s times via the basis images
    auto apply_once_coeffs = [&](const std::vector<std::uint32_t>& in) {
        std::vector<std::uint64_t> acc(k_, 0);
        for (std::uint32_t i = 0; i < k_; ++i) {
            if (!in[i]) continue;
            const auto& img = frob_basis_[i];
            for (std::uint32_t j = 0; j < k_; ++j)
                acc[j] += static_cast<std::uint64_t>(in[i]) * img[j];
        }
        std::vector<std::uint32_t> out(k_);
        for (std::uint32_t j = 0; j < k_; ++j) out[j] = static_cast<std::uint32_t>(acc[j] % p_);
        return out;
    };
    static constexpr std::uint64_t kTableLimit = std::uint64_t(1) << 22;
    if (q_ <= kTableLimit) {
        std::call_once(frob_table_once_, [&] {
            std::vector<std::uint32_t> table(q_);
            for (std::uint64_t idx = 0; idx < q_; ++idx) {
                Fq e = from_index(idx);
                table[idx] =
                    static_cast<std::uint32_t>(index_of(Fq(this, apply_once_coeffs(e.coeffs()))));
            }
            frob_table_ = std::move(table);
        });
        std::uint64_t idx = index_of(a);
        for (std::uint32_t i = 0; i < s; ++i) idx = frob_table_[idx];
        return from_index(idx);
    }
    std::vector<std::uint32_t> cur = a.coeffs();
    for (std::uint32_t i = 0; i < s; ++i) cur = apply_once_coeffs(cur);
    return Fq(this, std::move(cur));
}

std::string FieldCtx::to_string(const Fq& a) const {
    check(a);
    if (k_ == 1) return std::to_string(a.coeffs()[0]);
    std::ostringstream os;
    os << "[";
    for (std::uint32_t i = 0; i < k_; ++i) {
        if (i) os << ",";
        os << a.coeffs()[i];
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Embedding

Embedding::Embedding(const FieldCtx* src, const FieldCtx* dst) : src_(src), dst_(dst) {
    if (src->p() != dst->p())
        throw MathError("embedding requires equal characteristic");
    if (dst->k() % src->k() != 0)
        throw MathError("target degree must be a multiple of source degree");
    const std::uint32_t s = src->k();
    Fq root = dst->zero(); // root of x for the prime field
    if (s >= 2) {
        // lex-smallest root of the source modulus in dst
        bool found = false;
        const auto& m = src->modulus();
        for (std::uint64_t r = 0; r < dst->q(); ++r) {
            Fq cand = dst->from_lex_rank(r);
            Fq acc = dst->zero();
            Fq cp = dst->one();
            for (std::uint32_t i = 0; i < m.size(); ++i) {
                if (m[i]) acc = dst->add(acc, dst->mul(dst->from_int(m[i]), cp));
                cp = dst->mul(cp, cand);
            }
            if (acc.is_zero()) {
                root = cand;
                found = true;
                break;
            }
        }
        if (!found) throw MathError("no root of source modulus in target (internal error)");
    }
    root_ = root;
    gen_powers_.reserve(s);
    gen_powers_.push_back(dst->one());
    for (std::uint32_t i = 1; i < s; ++i) gen_powers_.push_back(dst->mul(gen_powers_.back(), root));
    // tower basis phi(b_i) t^j, column order (j, i)
    const std::uint32_t r = dst->k() / s;
    Fq t = dst->k() >= 2 ? dst->gen() : dst->one();
    Fq tp = dst->one();
    for (std::uint32_t j = 0; j < r; ++j) {
        for (std::uint32_t i = 0; i < s; ++i) tower_basis_.push_back(dst->mul(gen_powers_[i], tp));
        tp = dst->mul(tp, t);
    }
}

const Embedding& Embedding::get(const FieldCtx& src, const FieldCtx& dst) {
    static std::mutex mtx;
    static std::map<std::pair<const FieldCtx*, const FieldCtx*>, std::unique_ptr<Embedding>>
        registry;
    std::lock_guard lock(mtx);
    auto& slot = registry[{&src, &dst}];
    if (!slot) slot.reset(new Embedding(&src, &dst));
    return *slot;
}

Fq Embedding::apply(const Fq& a) const {
    if (&a.ctx() != src_) throw MathError("embedding applied to element of wrong field");
    if (src_ == dst_) return a;
    Fq acc = dst_->zero();
    for (std::uint32_t i = 0; i < src_->k(); ++i) {
        const std::uint32_t c = a.coeffs()[i];
        if (c) acc = dst_->add(acc, dst_->mul(dst_->from_int(c), gen_powers_[i]));
    }
    return acc;
}

void Embedding::build_restriction() const {
    const std::uint32_t p = dst_->p();
    const std::uint32_t K = dst_->k();
    // columns of the change-of-basis matrix are the tower basis elements
    std::vector<std::vector<std::uint32_t>> aug(K, std::vector<std::uint32_t>(2 * K, 0));
    for (std::uint32_t col = 0; col < K; ++col)
        for (std::uint32_t row = 0; row < K; ++row)
            aug[row][col] = tower_basis_[col].coeffs()[row];
    for (std::uint32_t i = 0; i < K; ++i) aug[i][K + i] = 1;
    for (std::uint32_t col = 0; col < K; ++col) {
        std::uint32_t piv = col;
        while (piv < K && aug[piv][col] == 0) ++piv;
        if (piv == K) throw MathError("tower basis is singular (internal error)");
        std::swap(aug[col], aug[piv]);
        const std::uint32_t inv = inv_mod_p(aug[col][col], p);
        for (auto& x : aug[col]) x = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) * inv % p);
        for (std::uint32_t rr = 0; rr < K; ++rr) {
            if (rr == col || !aug[rr][col]) continue;
            const std::uint32_t f = aug[rr][col];
            for (std::uint32_t cc = 0; cc < 2 * K; ++cc) {
                std::uint64_t v = aug[rr][cc] + static_cast<std::uint64_t>(p) * p
                                  - static_cast<std::uint64_t>(f) * aug[col][cc] % p;
                aug[rr][cc] = static_cast<std::uint32_t>(v % p);
            }
        }
    }
    std::vector<std::vector<std::uint32_t>> inv(K, std::vector<std::uint32_t>(K));
    for (std::uint32_t i = 0; i < K; ++i)
        for (std::uint32_t j = 0; j < K; ++j) inv[i][j] = aug[i][K + j];
    restrict_inv_ = std::move(inv);
}

std::vector<Fq> Embedding::restrict_scalars(const Fq& a) const {
    if (&a.ctx() != dst_) throw MathError("restrict_scalars: element of wrong field");
    std::call_once(restrict_once_, [this] { build_restriction(); });
    const std::uint32_t p = dst_->p();
    const std::uint32_t K = dst_->k();
    const std::uint32_t s = src_->k();
    const std::uint32_t r = K / s;
    std::vector<std::uint32_t> coords(K, 0);
    for (std::uint32_t i = 0; i < K; ++i) {
        std::uint64_t acc = 0;
        for (std::uint32_t j = 0; j < K; ++j)
            acc += static_cast<std::uint64_t>(restrict_inv_[i][j]) * a.coeffs()[j];
        coords[i] = static_cast<std::uint32_t>(acc % p);
    }
    std::vector<Fq> out;
    out.reserve(r);
    for (std::uint32_t j = 0; j < r; ++j) {
        std::vector<std::uint32_t> digit(coords.begin() + j * s, coords.begin() + (j + 1) * s);
        out.push_back(src_->from_coeffs(std::move(digit)));
    }
    return out;
}

Fq Embedding::lift_scalars(std::span<const Fq> digits) const {
    const std::uint32_t s = src_->k();
    const std::uint32_t r = dst_->k() / s;
    if (digits.size() != r) throw MathError("lift_scalars: wrong digit count");
    Fq acc = dst_->zero();
    for (std::uint32_t j = 0; j < r; ++j) {
        for (std::uint32_t i = 0; i < s; ++i) {
            const std::uint32_t c = digits[j].coeffs()[i];
            if (c) acc = dst_->add(acc, dst_->mul(dst_->from_int(c), tower_basis_[j * s + i]));
        }
    }
    return acc;
}

} // namespace cpsieve::gf
