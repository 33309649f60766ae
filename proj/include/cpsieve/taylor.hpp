#pragma once

// First-order conditions at closed points: nonvanishing of (value, Q*gradient)
// for a rank-l quotient of the restricted cotangent space, prescribed
// restrictions to a finite subscheme Z, and explicit allowed jet sets.
// Quotients are supplied fiberwise by providers; built-ins cover the
// smoothness condition and transversality to the conic through four points.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cpsieve/geom.hpp"
#include "cpsieve/linalg.hpp"

namespace cpsieve::taylor {

/// Fiberwise surjection kappa(x)^n ->> kappa(x)^ell on gradient space, in the
/// canonical chart of x. Rank must be exactly ell.
struct QuotientAtPoint {
    std::uint32_t ell = 0;
    linalg::Matrix matrix; // ell rows, n columns over kappa(x)

    QuotientAtPoint() = default;
    QuotientAtPoint(std::uint32_t ell, linalg::Matrix m);
};

using QuotientProvider = std::function<QuotientAtPoint(const geom::ClosedPoint&)>;

struct Taylor1Fiber {
    gf::Fq value;
    std::vector<gf::Fq> gradient; // n chart coordinates over kappa(x)
};

/// (value, gradient) of x_j^{-d} f at x in the canonical chart; the order-2
/// jet split into its graded pieces.
Taylor1Fiber taylor1_fiber(const mpoly::MPoly& f, const geom::ClosedPoint& x);
Taylor1Fiber taylor1_fiber_chart(const mpoly::MPoly& f, const geom::ClosedPoint& x,
                                 std::uint32_t chart, const geom::ProjPoint* rep = nullptr);

/// True iff f does not vanish in the fiber: value != 0 or Q*gradient != 0.
bool eval_quotient_condition(const QuotientAtPoint& Q, const mpoly::MPoly& f,
                             const geom::ClosedPoint& x);
bool eval_quotient_condition_chart(const QuotientAtPoint& Q, const mpoly::MPoly& f,
                                   const geom::ClosedPoint& x, std::uint32_t chart,
                                   const geom::ProjPoint* rep = nullptr);

/// Quotient onto the cotangent space of X at a smooth point x: kernel equals
/// the row space of the Jacobian of X's dehomogenized equations at x.
/// MathError naming the point when the Jacobian rank is not n - dim(X).
QuotientAtPoint smoothness_quotient(const geom::Subscheme& X, const geom::ClosedPoint& x);
QuotientAtPoint smoothness_quotient_chart(const geom::Subscheme& X, const geom::ClosedPoint& x,
                                          std::uint32_t chart);
QuotientProvider smoothness_provider(geom::Subscheme X);

/// The conic a x0^2 + b x0x1 + c x0x2 + d x1^2 + e x1x2 + f x2^2 over kappa(x).
struct ConicData {
    std::vector<gf::Fq> coeffs; // (a,b,c,d,e,f), lex-first nonzero normalized to 1
    linalg::Matrix gram;        // 3x3 symmetric, halved off-diagonal entries
    bool smooth = false;
    mpoly::MPoly poly;          // the conic as a polynomial over kappa(x)

    ConicData(const gf::FieldCtx& K) : poly(K, 3) {}
};

/// The unique conic through four base-field points and x. MathError when
/// char = 2, when the five points do not impose independent conditions, or
/// when the resulting conic is singular.
ConicData conic_through(const std::vector<geom::ProjPoint>& Y, const geom::ClosedPoint& x);

/// Rank-1 quotient pairing a gradient with the tangent direction of C at x.
QuotientAtPoint conic_tangent_quotient(const ConicData& C, const geom::ClosedPoint& x);
QuotientAtPoint conic_tangent_quotient_chart(const ConicData& C, const geom::ClosedPoint& x,
                                             std::uint32_t chart);
QuotientProvider conic_provider(std::vector<geom::ProjPoint> Y);

/// One connected component of a finite reduced Z, with its chart choice.
struct ZComponent {
    geom::ClosedPoint z;
    std::uint32_t chart; // x_chart must not vanish on z
};

/// Values of x_{j_i}^{-d} f at the canonical representative of each component.
std::vector<gf::Fq> restrict_to_Z(const mpoly::MPoly& f, const std::vector<ZComponent>& Z);

/// Allowed set T as explicit tuples, one kappa(z_i)-value per component.
struct ZData {
    std::vector<ZComponent> components;
    std::vector<std::vector<gf::Fq>> allowed;

    BigInt h0_size() const; // # H^0(Z, O_Z) = q^(sum deg z_i)
    bool admits(const std::vector<gf::Fq>& values) const;
};

enum class JetSetMode { Explicit, Complement, All };

/// Allowed jet set A_x at one point, order M.
struct JetCondition {
    geom::ClosedPoint x;
    std::uint32_t order = 2;
    JetSetMode mode = JetSetMode::Explicit;
    std::vector<mpoly::Jet> jets; // allowed (Explicit) or excluded (Complement)
};

/// jet_at(f, x, M) in A, compared coefficientwise in the canonical chart.
bool eval_jet_condition(const JetCondition& cond, const mpoly::MPoly& f);

struct TaylorConditionSpec {
    enum class Kind { QuotientNonvanishing, JetAllowedSet, RestrictionToZ };
    Kind kind = Kind::QuotientNonvanishing;
    geom::Subscheme carrier;
    std::string name;

    // QuotientNonvanishing
    QuotientProvider provider;
    std::uint32_t ell = 0;

    // JetAllowedSet: finitely many explicit points; vacuous elsewhere
    std::vector<JetCondition> jets;

    // RestrictionToZ
    ZData z;
};

/// Condition at one closed point; vacuously true when x is not in the carrier.
bool satisfies_at(const TaylorConditionSpec& spec, const mpoly::MPoly& f,
                  const geom::ClosedPoint& x);

} // namespace cpsieve::taylor
