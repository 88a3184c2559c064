#pragma once

// Reduction of the anti-self-dual Yang-Mills equations (G = GL(2), complex
// coordinates z, w, z̃, w̃) to the KdV equation in the free differential
// algebra: t ≡ z, x = w + w̃, fields annihilated by ∂_w - ∂_w̃ and ∂_z̃.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "freealg.hpp"
#include "quasidet.hpp"
#include "scalar.hpp"

namespace ncint {

using GaugeMatrix = NCMatrix<NCPoly>;

struct GaugeFields {
    GaugeMatrix A_z, A_w, A_zt, A_wt;  ///< A_z, A_w, A_z̃, A_w̃

    GaugeFields() : A_z(2, {}), A_w(2, {}), A_zt(2, {}), A_wt(2, {}) {}

    /// The KdV ansatz. `uu_coeff` is the coefficient of u u in the (2,1)
    /// entry of A_z (1/2 in the ansatz); other values give a perturbed model.
    static GaugeFields kdv_ansatz(const Scalar& uu_coeff = Scalar(Rational(1, 2))) {
        GaugeFields g;
        const NCPoly u = NCPoly::u();
        const Scalar q(Rational(1, 4));
        g.A_wt(1, 0) = u * Scalar(Rational(1, 2));
        g.A_zt(1, 0) = NCPoly(1);
        g.A_w(0, 1) = NCPoly(-1);
        g.A_w(1, 0) = u;
        g.A_z(0, 0) = d_x(u) * q;
        g.A_z(0, 1) = u * Scalar(Rational(-1, 2));
        g.A_z(1, 0) = d_x(u, 2) * q + u * u * uu_coeff;
        g.A_z(1, 1) = d_x(u) * (-q);
        return g;
    }
};

/// ∂_w, ∂_w̃ ↦ ∂_x;  ∂_z ↦ ∂_t (u ↦ u̇);  ∂_z̃ ↦ 0.
struct ReductionRules {
    static NCPoly d_w(const NCPoly& p) { return d_x(p); }
    static NCPoly d_wt(const NCPoly& p) { return d_x(p); }
    static NCPoly d_zt(const NCPoly&) { return NCPoly(); }
    static NCPoly d_z(const NCPoly& p) {
        return apply_derivation(p, [](int field) -> std::optional<NCPoly> {
            if (field == DiffGen::kU) return NCPoly::udot();
            return std::nullopt;
        });
    }
    static GaugeMatrix apply(NCPoly (*d)(const NCPoly&), const GaugeMatrix& m) {
        return m.map([d](const NCPoly& e) { return d(e); });
    }
};

struct AsdymResiduals {
    GaugeMatrix F_wz, F_wtzt, F_mix;  ///< F_wz, F_w̃z̃, F_zz̃ - F_ww̃

    AsdymResiduals() : F_wz(2, {}), F_wtzt(2, {}), F_mix(2, {}) {}

    std::vector<std::pair<std::string, const GaugeMatrix*>> named() const {
        return {{"F_wz", &F_wz}, {"F_w~z~", &F_wtzt}, {"F_zz~ - F_ww~", &F_mix}};
    }
};

inline GaugeMatrix matrix_commutator(const GaugeMatrix& a, const GaugeMatrix& b) { return a * b - b * a; }

inline AsdymResiduals asdym_residuals(const GaugeFields& g) {
    using R = ReductionRules;
    AsdymResiduals r;
    r.F_wz = R::apply(R::d_w, g.A_z) - R::apply(R::d_z, g.A_w) + matrix_commutator(g.A_w, g.A_z);
    r.F_wtzt = R::apply(R::d_wt, g.A_zt) - R::apply(R::d_zt, g.A_wt) + matrix_commutator(g.A_wt, g.A_zt);
    r.F_mix = R::apply(R::d_z, g.A_zt) - R::apply(R::d_zt, g.A_z) + R::apply(R::d_wt, g.A_w) -
              R::apply(R::d_w, g.A_wt) + matrix_commutator(g.A_z, g.A_zt) - matrix_commutator(g.A_w, g.A_wt);
    return r;
}

/// Replace u̇ (and its x-derivatives) by `rhs` in every entry.
inline GaugeMatrix substitute_udot(const GaugeMatrix& m, const NCPoly& rhs) {
    return m.map([&](const NCPoly& e) { return substitute_fields(e, {{DiffGen::kUDot, rhs}}); });
}

struct ReductionReport {
    AsdymResiduals residuals;
    std::vector<std::string> zero_residuals;  ///< names of identically vanishing residuals
    std::string carrier;                      ///< residual holding the evolution equation
    std::size_t row = 0, col = 0;             ///< 0-based position of its single nonzero entry
    Scalar udot_coeff;                        ///< c in c u̇ + ...
    NCPoly evolution;                         ///< solved u̇ = evolution
    bool single_unit = false;                 ///< the carrier has exactly one nonzero entry, linear in u̇
    bool closes = false;                      ///< all residuals vanish after u̇ ↦ evolution

    bool reduced() const { return single_unit && closes; }

    std::string text() const {
        std::string s;
        for (const auto& [name, m] : residuals.named()) {
            s += name + " =\n";
            s += m->str_boxed([](const NCPoly& p) { return p.str(); });
        }
        if (single_unit) {
            s += "carrier: " + carrier + ", entry (" + std::to_string(row + 1) + "," + std::to_string(col + 1) +
                 "), factor " + udot_coeff.str() + "\n";
            s += "udot = " + evolution.str() + "\n";
        } else {
            s += "no single-entry evolution equation found\n";
        }
        return s;
    }
    std::string latex() const {
        std::string s;
        for (const auto& [name, m] : residuals.named()) {
            s += name + " = \\begin{pmatrix}";
            for (std::size_t i = 0; i < 2; ++i) {
                if (i) s += " \\\\ ";
                s += (*m)(i, 0).latex() + " & " + (*m)(i, 1).latex();
            }
            s += "\\end{pmatrix}\n";
        }
        if (single_unit) s += "\\dot{u} = " + evolution.latex() + "\n";
        return s;
    }
    nlohmann::json to_json() const {
        nlohmann::json res = nlohmann::json::object();
        for (const auto& [name, m] : residuals.named()) {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < 2; ++i) rows.push_back({(*m)(i, 0).str(), (*m)(i, 1).str()});
            res[name] = rows;
        }
        return {{"residuals", res},
                {"zero_residuals", zero_residuals},
                {"carrier", carrier},
                {"entry", {row + 1, col + 1}},
                {"udot_coeff", udot_coeff.str()},
                {"evolution", evolution.str()},
                {"single_unit", single_unit},
                {"closes", closes}};
    }
};

/// Expand the residuals with u̇ opaque, find the entry that is linear in u̇
/// with constant coefficient, solve for u̇ and substitute back.
inline ReductionReport check_kdv_reduction(const GaugeFields& g = GaugeFields::kdv_ansatz()) {
    ReductionReport rep;
    rep.residuals = asdym_residuals(g);
    const NCWord udot_word{DiffGen::udot()};
    int nonzero_entries = 0;
    const NCPoly* entry = nullptr;
    for (const auto& [name, m] : rep.residuals.named()) {
        if (m->is_zero()) {
            rep.zero_residuals.push_back(name);
            continue;
        }
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                const NCPoly& e = (*m)(i, j);
                if (e.is_zero()) continue;
                ++nonzero_entries;
                entry = &e;
                rep.carrier = name;
                rep.row = i;
                rep.col = j;
            }
    }
    if (nonzero_entries == 1) {
        const NCPoly& e = *entry;
        Scalar c;
        bool other_udot = false;
        NCPoly rest;
        for (const auto& [w, coef] : e.terms()) {
            if (w == udot_word) {
                c = coef;
                continue;
            }
            for (const auto& gen : w)
                if (gen.field == DiffGen::kUDot) other_udot = true;
            rest.add_term(w, coef);
        }
        if (!c.is_zero() && !other_udot) {
            rep.single_unit = true;
            rep.udot_coeff = c;
            rep.evolution = rest * (-c.inv());
        }
    }
    if (rep.single_unit) {
        rep.closes = true;
        for (const auto& [name, m] : rep.residuals.named())
            if (!substitute_udot(*m, rep.evolution).is_zero()) rep.closes = false;
    }
    return rep;
}

}  // namespace ncint
