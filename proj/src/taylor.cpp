#include "cpsieve/taylor.hpp"

#include <algorithm>
#include <sstream>

#include "cpsieve/errors.hpp"

namespace cpsieve::taylor {

using geom::ClosedPoint;
using geom::ProjPoint;
using geom::Subscheme;
using gf::Embedding;
using gf::FieldCtx;
using gf::Fq;
using mpoly::ExpVec;
using mpoly::MPoly;

namespace {

std::string point_string(const ClosedPoint& x) {
    std::ostringstream os;
    os << "(";
    const FieldCtx& K = x.residue_field();
    for (std::size_t i = 0; i < x.rep.coords.size(); ++i) {
        if (i) os << ":";
        os << K.to_string(x.rep.coords[i]);
    }
    os << ")";
    return os.str();
}

} // namespace

QuotientAtPoint::QuotientAtPoint(std::uint32_t l, linalg::Matrix m) : ell(l), matrix(std::move(m)) {
    if (matrix.size() != ell) throw MathError("quotient matrix must have ell rows");
    if (ell == 0) throw MathError("quotient rank must be positive");
    if (linalg::rank(matrix) != ell)
        throw MathError("quotient matrix is rank-deficient (surjectivity fails)");
}

Taylor1Fiber taylor1_fiber_chart(const MPoly& f, const ClosedPoint& x, std::uint32_t chart,
                                 const ProjPoint* rep) {
    const ProjPoint& p = rep ? *rep : x.rep;
    std::uint32_t d = 0;
    if (!f.is_homogeneous(&d)) throw MathError("taylor1_fiber requires a homogeneous polynomial");
    const FieldCtx& K = x.residue_field();
    const Fq& u = p.coords[chart];
    if (u.is_zero()) throw MathError("chart coordinate vanishes at " + point_string(x));
    const Fq uinv = K.inv(u);
    std::vector<Fq> aff;
    for (std::uint32_t i = 0; i < f.nvars(); ++i)
        if (i != chart) aff.push_back(p.coords[i] * uinv);
    MPoly g = f.dehomogenize(chart).base_change(*x.emb);
    Taylor1Fiber out;
    out.value = g.evaluate(aff);
    out.gradient.reserve(aff.size());
    for (std::uint32_t i = 0; i < g.nvars(); ++i) out.gradient.push_back(g.partial(i).evaluate(aff));
    return out;
}

Taylor1Fiber taylor1_fiber(const MPoly& f, const ClosedPoint& x) {
    return taylor1_fiber_chart(f, x, x.chart(), nullptr);
}

bool eval_quotient_condition_chart(const QuotientAtPoint& Q, const MPoly& f, const ClosedPoint& x,
                                   std::uint32_t chart, const ProjPoint* rep) {
    const Taylor1Fiber fib = taylor1_fiber_chart(f, x, chart, rep);
    if (!fib.value.is_zero()) return true;
    const FieldCtx& K = x.residue_field();
    for (const auto& row : Q.matrix) {
        Fq acc = K.zero();
        for (std::size_t i = 0; i < row.size(); ++i) acc = acc + row[i] * fib.gradient[i];
        if (!acc.is_zero()) return true;
    }
    return false;
}

bool eval_quotient_condition(const QuotientAtPoint& Q, const MPoly& f, const ClosedPoint& x) {
    return eval_quotient_condition_chart(Q, f, x, x.chart(), nullptr);
}

QuotientAtPoint smoothness_quotient_chart(const Subscheme& X, const ClosedPoint& x,
                                          std::uint32_t chart) {
    const FieldCtx& K = x.residue_field();
    const std::uint32_t n = X.n;
    const std::uint32_t m = X.declared_dim();
    // Jacobian of the dehomogenized equations at the representative
    const Fq& u = x.rep.coords[chart];
    if (u.is_zero()) throw MathError("chart coordinate vanishes at " + point_string(x));
    const Fq uinv = K.inv(u);
    std::vector<Fq> aff;
    for (std::uint32_t i = 0; i <= n; ++i)
        if (i != chart) aff.push_back(x.rep.coords[i] * uinv);
    linalg::Matrix jac;
    for (const auto& eq : X.equations) {
        MPoly g = eq.dehomogenize(chart).base_change(*x.emb);
        linalg::Row row;
        for (std::uint32_t i = 0; i < n; ++i) row.push_back(g.partial(i).evaluate(aff));
        jac.push_back(std::move(row));
    }
    const std::uint32_t jrank = jac.empty() ? 0 : linalg::rank(jac);
    if (jrank != n - m)
        throw MathError("scheme is singular at " + point_string(x) + ": Jacobian rank " +
                        std::to_string(jrank) + ", expected " + std::to_string(n - m));
    linalg::Matrix quotient;
    if (jac.empty()) {
        for (std::uint32_t i = 0; i < n; ++i) {
            linalg::Row row(n, K.zero());
            row[i] = K.one();
            quotient.push_back(std::move(row));
        }
    } else {
        quotient = linalg::null_space(jac, K, n);
    }
    const std::uint32_t ell = static_cast<std::uint32_t>(quotient.size());
    return QuotientAtPoint(ell, std::move(quotient));
}

QuotientAtPoint smoothness_quotient(const Subscheme& X, const ClosedPoint& x) {
    return smoothness_quotient_chart(X, x, x.chart());
}

QuotientProvider smoothness_provider(Subscheme X) {
    return [X = std::move(X)](const ClosedPoint& x) { return smoothness_quotient(X, x); };
}

ConicData conic_through(const std::vector<ProjPoint>& Y, const ClosedPoint& x) {
    if (Y.size() != 4) throw MathError("conic_through requires exactly four base points");
    const FieldCtx& K = x.residue_field();
    if (K.p() == 2) throw MathError("conic construction requires characteristic != 2");
    if (x.rep.coords.size() != 3) throw MathError("conic_through lives in P^2");
    // rows: one incidence condition per point, columns (a,b,c,d,e,f)
    linalg::Matrix rows;
    auto add_row = [&](const std::vector<Fq>& pt) {
        const Fq &a = pt[0], &b = pt[1], &c = pt[2];
        rows.push_back({a * a, a * b, a * c, b * b, b * c, c * c});
    };
    for (const auto& y : Y) {
        const Embedding& lift = Embedding::get(*y.field, K);
        std::vector<Fq> up;
        for (const auto& co : y.coords) up.push_back(lift.apply(co));
        add_row(up);
    }
    add_row(x.rep.coords);
    const auto basis = linalg::null_space(rows, K, 6);
    if (basis.size() != 1)
        throw MathError("five points do not impose independent conditions (solution space " +
                        std::to_string(basis.size()) + "-dimensional) at " + point_string(x));
    ConicData C(K);
    C.coeffs = linalg::normalize_first_nonzero(basis[0]);
    const Fq half = K.inv(K.from_int(2));
    const Fq &a = C.coeffs[0], &b = C.coeffs[1], &c = C.coeffs[2], &d = C.coeffs[3],
             &e = C.coeffs[4], &f = C.coeffs[5];
    C.gram = {{a, b * half, c * half}, {b * half, d, e * half}, {c * half, e * half, f}};
    C.smooth = !linalg::det3(C.gram).is_zero();
    static const ExpVec mono[6] = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
    for (int i = 0; i < 6; ++i) C.poly.add_term(mono[i], C.coeffs[i]);
    // all five incidences must hold exactly
    const Embedding& id = Embedding::get(K, K);
    for (const auto& row : rows) {
        Fq acc = K.zero();
        for (int i = 0; i < 6; ++i) acc = acc + row[i] * C.coeffs[i];
        if (!acc.is_zero()) throw MathError("conic misses a defining point (internal error)");
    }
    (void)id;
    if (!C.smooth)
        throw MathError("conic through the five points is singular at " + point_string(x));
    return C;
}

QuotientAtPoint conic_tangent_quotient_chart(const ConicData& C, const ClosedPoint& x,
                                             std::uint32_t chart) {
    const FieldCtx& K = x.residue_field();
    const Fq& u = x.rep.coords[chart];
    if (u.is_zero()) throw MathError("chart coordinate vanishes at " + point_string(x));
    const Fq uinv = K.inv(u);
    std::vector<Fq> aff;
    for (std::uint32_t i = 0; i < 3; ++i)
        if (i != chart) aff.push_back(x.rep.coords[i] * uinv);
    const MPoly g = C.poly.dehomogenize(chart);
    if (!g.evaluate(aff).is_zero())
        throw MathError("conic does not pass through " + point_string(x));
    linalg::Row grad;
    for (std::uint32_t i = 0; i < 2; ++i) grad.push_back(g.partial(i).evaluate(aff));
    if (grad[0].is_zero() && grad[1].is_zero())
        throw MathError("conic gradient vanishes at " + point_string(x));
    // tangent direction: kernel of the gradient row, first nonzero entry 1
    auto tangent = linalg::normalize_first_nonzero(
        linalg::null_space({grad}, K, 2).at(0));
    return QuotientAtPoint(1, {std::move(tangent)});
}

QuotientAtPoint conic_tangent_quotient(const ConicData& C, const ClosedPoint& x) {
    return conic_tangent_quotient_chart(C, x, x.chart());
}

QuotientProvider conic_provider(std::vector<ProjPoint> Y) {
    return [Y = std::move(Y)](const ClosedPoint& x) {
        const ConicData C = conic_through(Y, x);
        return conic_tangent_quotient(C, x);
    };
}

std::vector<gf::Fq> restrict_to_Z(const MPoly& f, const std::vector<ZComponent>& Z) {
    std::vector<Fq> out;
    out.reserve(Z.size());
    for (const auto& comp : Z) {
        if (comp.z.rep.coords[comp.chart].is_zero())
            throw MathError("chosen coordinate vanishes on a component of Z at " +
                            point_string(comp.z));
        const Taylor1Fiber fib = taylor1_fiber_chart(f, comp.z, comp.chart, nullptr);
        out.push_back(fib.value);
    }
    return out;
}

BigInt ZData::h0_size() const {
    BigInt s = 1;
    for (const auto& comp : components) s *= big_pow(comp.z.base->q(), comp.z.degree);
    return s;
}

bool ZData::admits(const std::vector<Fq>& values) const {
    for (const auto& tuple : allowed)
        if (tuple == values) return true;
    return false;
}

bool eval_jet_condition(const JetCondition& cond, const MPoly& f) {
    if (cond.mode == JetSetMode::All) return true;
    const mpoly::Jet j = geom::jet_at(f, cond.x, cond.order);
    for (const auto& a : cond.jets) {
        if (a.order != cond.order || a.field != j.field)
            throw MathError("allowed jet set order/field mismatch");
        if (a == j) return cond.mode == JetSetMode::Explicit;
    }
    return cond.mode == JetSetMode::Complement;
}

bool satisfies_at(const TaylorConditionSpec& spec, const MPoly& f, const ClosedPoint& x) {
    switch (spec.kind) {
        case TaylorConditionSpec::Kind::QuotientNonvanishing: {
            if (!spec.carrier.contains(x)) return true;
            return eval_quotient_condition(spec.provider(x), f, x);
        }
        case TaylorConditionSpec::Kind::JetAllowedSet: {
            for (const auto& jc : spec.jets) {
                if (jc.x.rep == x.rep) return eval_jet_condition(jc, f);
            }
            return true; // vacuous at unlisted points
        }
        case TaylorConditionSpec::Kind::RestrictionToZ: {
            return spec.z.admits(restrict_to_Z(f, spec.z.components));
        }
    }
    return true;
}

} // namespace cpsieve::taylor
