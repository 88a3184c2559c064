#pragma once

// Noncommutative KP hierarchy from the Lax formalism: B_m = (L^m)_{≥0},
// ∂_m L = [B_m, L], its l-reductions, and the structure of the conserved
// densities.

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "freealg.hpp"
#include "psido.hpp"

namespace ncint {

using SymbolicOp = PsDO<NCPoly>;

struct insufficient_depth : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// L = ∂ + u_2 ∂^{-1} + ... + u_depth ∂^{1-depth}, tracked down to 1-depth.
struct LaxKP {
    SymbolicOp op;
    int depth;

    explicit LaxKP(int depth_) : depth(depth_) {
        if (depth < 2) throw std::invalid_argument("LaxKP: depth must be ≥ 2");
        std::vector<std::pair<int, NCPoly>> terms{{1, NCPoly(1)}};
        for (int k = 2; k <= depth; ++k) terms.emplace_back(1 - k, NCPoly::uk(k));
        op = SymbolicOp::from_terms({}, 1, terms, 1 - depth);
    }
};

/// ∂_m u_k = rhs (k = DiffGen::kU for the reduced KdV field u).
struct FlowEquation {
    int m = 1;
    int k = 2;
    NCPoly rhs;

    std::string lhs_text() const {
        std::string f = k == DiffGen::kU ? "u" : "u" + std::to_string(k);
        return "d" + std::to_string(m) + " " + f;
    }
    std::string str() const { return lhs_text() + " = " + rhs.str(); }
    std::string latex() const {
        std::string f = k == DiffGen::kU ? "u" : "u_{" + std::to_string(k) + "}";
        return "\\partial_{" + std::to_string(m) + "} " + f + " = " + rhs.latex();
    }
    nlohmann::json to_json() const {
        return {{"m", m}, {"field", k == DiffGen::kU ? nlohmann::json("u") : nlohmann::json(k)},
                {"rhs", rhs.to_json()}, {"text", rhs.str()}};
    }
};

/// B_m = (L^m)_{≥0}.
inline SymbolicOp b_m(const LaxKP& lax, int m) {
    if (m < 1) throw std::invalid_argument("b_m: m must be ≥ 1");
    SymbolicOp lm = power(lax.op, m, 0);
    if (lm.cutoff() > 0)
        throw insufficient_depth("b_m: Lax depth " + std::to_string(lax.depth) + " too small for m=" +
                                 std::to_string(m));
    return lm.project_geq(0);
}

/// Equations ∂_m u_k = res_{1-k}[B_m, L] for k = 2..k_max. The Lax depth is
/// sized to k_max + m so that every printed coefficient is exact.
inline std::vector<FlowEquation> kp_flow(int m, int k_max) {
    if (m < 1 || k_max < 2) throw std::invalid_argument("kp_flow: need m ≥ 1 and k_max ≥ 2");
    LaxKP lax(k_max + m);
    SymbolicOp b = b_m(lax, m);
    SymbolicOp c = commutator(b, lax.op, 1 - k_max);
    std::vector<FlowEquation> out;
    for (int k = 2; k <= k_max; ++k) {
        if (1 - k < c.cutoff()) throw insufficient_depth("kp_flow: coefficient below tracked range");
        out.push_back({m, k, c.coeff(1 - k)});
    }
    return out;
}

/// u_k expressed through the fields surviving the constraint (L^l)_{≤-1} = 0.
/// For l = 2 the single survivor is u = 2 u_2.
struct ReductionTable {
    int l = 2;
    int depth = 2;
    std::map<int, NCPoly> table;

    NCPoly apply(const NCPoly& p) const { return substitute_fields(p, table); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["l"] = l;
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [k, p] : table) t["u" + std::to_string(k)] = p.str();
        j["table"] = t;
        return j;
    }
};

inline ReductionTable l_reduce(int l, int depth) {
    if (l < 2) throw std::invalid_argument("l_reduce: l must be ≥ 2");
    if (depth <= l) depth = l + 1;
    ReductionTable red;
    red.l = l;
    red.depth = depth;
    if (l == 2) {
        red.table[2] = NCPoly::u() * Scalar(Rational(1, 2));
    } else {
        for (int k = 2; k <= l; ++k) red.table[k] = NCPoly::uk(k);
    }
    LaxKP lax(depth);
    SymbolicOp ll = power(lax.op, l);
    const Scalar inv_l(Rational(1, l));
    for (int j = 1; j + l <= depth; ++j) {
        const int k = j + l;
        NCPoly coef = ll.coeff(-j);
        NCPoly linear = NCPoly::uk(k) * Scalar(l);
        NCPoly rest = coef - linear;
        if (rest.max_order(k))
            throw std::logic_error("l_reduce: reduction system is not triangular at u" + std::to_string(k));
        red.table[k] = red.apply(rest) * (-inv_l);
    }
    return red;
}

namespace detail {
inline SymbolicOp kdv_square() {
    return SymbolicOp::from_terms({}, 2, {{2, NCPoly(1)}, {0, NCPoly::u()}});
}
}  // namespace detail

/// L with L^2 = ∂^2 + u, tracked down to `cutoff`.
inline SymbolicOp kdv_lax(int cutoff) { return sqrt_monic(detail::kdv_square(), cutoff); }

/// ∂u/∂x^m = [B_m, L^2] with L^2 = ∂^2 + u. The commutator is checked to be
/// a pure multiplication operator; even m gives 0.
inline FlowEquation kdv_flow(int m) {
    if (m < 1) throw std::invalid_argument("kdv_flow: m must be ≥ 1");
    SymbolicOp l = kdv_lax(1 - m);
    SymbolicOp b = power(l, m, 0).project_geq(0);
    SymbolicOp c = commutator(b, detail::kdv_square());
    for (const auto& [deg, coef] : c.coeffs())
        if (deg != 0)
            throw std::logic_error("kdv_flow: [B_m, L^2] has a nonzero coefficient at degree " +
                                   std::to_string(deg));
    return {m, DiffGen::kU, c.coeff(0)};
}

/// Which coordinate pair carries θ.
enum class ThetaKind { space_space, space_time };

/// One Strachan-product term  binom(k,l) · ∂_x^{k-l} res_{-(l+1)} L^n ⋄ ∂_i res_k L^m.
struct DensityTerm {
    int k = 0;
    int l = 0;
    Rational binomial;
    NCPoly left;   ///< ∂_x^{k-l} res_{-(l+1)} L^n
    NCPoly right;  ///< res_k L^m (∂_i still to be applied)
};

/// σ_n = res_{-1} L^n + prefactor·θ · Σ terms (⋄ products evaluated later on
/// explicit functions). For space-space θ the sum is absent.
struct DensityRecipe {
    int n = 1;
    int m = 3;
    ThetaKind kind = ThetaKind::space_time;
    Scalar prefactor;  ///< c of density_prefactor(), 0 for space-space θ
    NCPoly leading;
    std::vector<DensityTerm> terms;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n"] = n;
        j["m"] = m;
        j["theta"] = kind == ThetaKind::space_time ? "space-time" : "space-space";
        j["prefactor"] = ncint::to_json(prefactor);
        j["leading"] = leading.str();
        nlohmann::json ts = nlohmann::json::array();
        for (const auto& t : terms)
            ts.push_back({{"k", t.k}, {"l", t.l}, {"binom", t.binomial.str()}, {"left", t.left.str()},
                          {"right", t.right.str()}, {"derivative", "x"}});
        j["terms"] = ts;
        return j;
    }
};

/// Coefficient c in σ_n = res_{-1} L^n + c θ Σ (...) for [t,x] = iθ. It
/// equals -i θ^{xt}/θ: the ⋄ sum enters through [f,g]_★ = iθ^{μν} ∂_μ(f ⋄ ∂_ν g).
inline Scalar density_prefactor() { return Scalar(Rational(0), Rational(1)); }

/// Residues of L^n and L^m for the KP Lax operator in u_k, or in u when a
/// reduction table is passed.
inline DensityRecipe conserved_density_recipe(int n, int m, ThetaKind kind,
                                              const ReductionTable* reduction = nullptr) {
    if (n < 1 || m < 1) throw std::invalid_argument("conserved_density_recipe: n, m must be ≥ 1");
    DensityRecipe r;
    r.n = n;
    r.m = m;
    r.kind = kind;
    r.prefactor = kind == ThetaKind::space_time ? density_prefactor() : Scalar(0);
    // res_{-(l+1)} L^n for l ≤ m-1 needs L^n down to -m.
    const int depth = std::max(n, m) + m + 2;
    SymbolicOp l;
    if (reduction && reduction->l == 2) {
        l = kdv_lax(-depth);
    } else {
        l = LaxKP(depth).op;
    }
    auto reduce = [&](const NCPoly& p) {
        return reduction && reduction->l != 2 ? reduction->apply(p) : p;
    };
    SymbolicOp ln = power(l, n, -m);
    r.leading = reduce(ln.res(-1));
    if (kind == ThetaKind::space_space) return r;
    SymbolicOp lm = power(l, m, 0);
    for (int k = 0; k <= m - 1; ++k) {
        NCPoly right = reduce(lm.coeff(k));
        for (int j = 0; j <= k; ++j) {
            NCPoly left = reduce(d_x(ln.coeff(-(j + 1)), k - j));
            if (left.is_zero() || right.is_zero()) continue;
            r.terms.push_back({k, j, binom(k, j), left, right});
        }
    }
    return r;
}

}  // namespace ncint
