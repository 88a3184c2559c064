#pragma once

// Free associative differential algebra over Q(i) on the generators
// u_k^{(j)} (field k, j-th x-derivative). Words are never reordered, so the
// product models the star product abstractly.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ring.hpp"
#include "scalar.hpp"

namespace ncint {

/// Generator u_k^{(j)}. Non-negative `field` is the KP field index k;
/// the negative values name the reduced KdV field and its time derivative.
struct DiffGen {
    static constexpr int kU = -1;     ///< u with 2 u_2 = u
    static constexpr int kUDot = -2;  ///< opaque time derivative of u

    int field = kU;
    int order = 0;

    static DiffGen u(int order = 0) { return {kU, order}; }
    static DiffGen udot(int order = 0) { return {kUDot, order}; }
    static DiffGen uk(int k, int order = 0) { return {k, order}; }

    DiffGen derived(int n = 1) const { return {field, order + n}; }
    DiffGen base() const { return {field, 0}; }

    friend auto operator<=>(const DiffGen&, const DiffGen&) = default;
};

using NCWord = std::vector<DiffGen>;

/// Degree first, then lexicographic: linear terms print before products.
struct WordOrder {
    bool operator()(const NCWord& a, const NCWord& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

namespace detail {

inline std::string primes_text(int order) {
    if (order <= 3) return std::string(static_cast<std::size_t>(order), '\'');
    return "^(" + std::to_string(order) + ")";
}

inline std::string gen_text(const DiffGen& g) {
    std::string base;
    if (g.field == DiffGen::kU)
        base = "u";
    else if (g.field == DiffGen::kUDot)
        base = "udot";
    else
        base = "u" + std::to_string(g.field);
    return base + primes_text(g.order);
}

inline std::string gen_latex(const DiffGen& g) {
    std::string base;
    if (g.field == DiffGen::kU)
        base = "u";
    else if (g.field == DiffGen::kUDot)
        base = "\\dot{u}";
    else
        base = "u_{" + std::to_string(g.field) + "}";
    if (g.order == 0) return base;
    if (g.order <= 3) {
        std::string p;
        for (int i = 0; i < g.order; ++i) p += "\\prime";
        return base + "^{" + p + "}";
    }
    return base + "^{(" + std::to_string(g.order) + ")}";
}

/// Coefficient prefix for a non-unit word: "", "-", "3*", "1/4*", "(1+2 i)*".
inline std::string coeff_prefix(const Scalar& c, bool unit_word, const char* sep) {
    if (!c.is_real()) {
        return "(" + c.str() + ")" + (unit_word ? "" : sep);
    }
    if (unit_word) return c.re().str();
    if (c.re().is_one()) return "";
    if ((-c.re()).is_one()) return "-";
    return c.re().str() + sep;
}

}  // namespace detail

/// Element of the free algebra: finite map word -> coefficient, no zeros.
class NCPoly {
public:
    using TermMap = std::map<NCWord, Scalar, WordOrder>;

    NCPoly() = default;
    NCPoly(const Scalar& c) {  // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) terms_.emplace(NCWord{}, c);
    }
    NCPoly(long c) : NCPoly(Scalar(c)) {}  // NOLINT
    NCPoly(int c) : NCPoly(Scalar(c)) {}   // NOLINT
    static NCPoly gen(const DiffGen& g, const Scalar& c = Scalar(1)) {
        NCPoly p;
        if (!c.is_zero()) p.terms_.emplace(NCWord{g}, c);
        return p;
    }
    static NCPoly word(NCWord w, const Scalar& c = Scalar(1)) {
        NCPoly p;
        if (!c.is_zero()) p.terms_.emplace(std::move(w), c);
        return p;
    }
    static NCPoly u(int order = 0) { return gen(DiffGen::u(order)); }
    static NCPoly udot(int order = 0) { return gen(DiffGen::udot(order)); }
    static NCPoly uk(int k, int order = 0) { return gen(DiffGen::uk(k, order)); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_one() const {
        return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second.is_one();
    }
    std::size_t size() const { return terms_.size(); }

    Scalar coeff(const NCWord& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Scalar(0) : it->second;
    }

    /// Scalar part (coefficient of the empty word).
    Scalar constant_term() const { return coeff(NCWord{}); }

    void add_term(const NCWord& w, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(w, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    NCPoly& operator+=(const NCPoly& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, c);
        return *this;
    }
    NCPoly& operator-=(const NCPoly& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, -c);
        return *this;
    }
    NCPoly& operator*=(const Scalar& c) {
        if (c.is_zero()) {
            terms_.clear();
        } else {
            for (auto& [w, v] : terms_) v *= c;
        }
        return *this;
    }
    friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
    friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
    friend NCPoly operator*(NCPoly a, const Scalar& c) { return a *= c; }
    friend NCPoly operator*(const Scalar& c, NCPoly a) { return a *= c; }
    NCPoly operator-() const { return *this * Scalar(-1); }

    friend NCPoly operator*(const NCPoly& a, const NCPoly& b) {
        NCPoly r;
        NCWord w;
        for (const auto& [wa, ca] : a.terms_)
            for (const auto& [wb, cb] : b.terms_) {
                w.assign(wa.begin(), wa.end());
                w.insert(w.end(), wb.begin(), wb.end());
                r.add_term(w, ca * cb);
            }
        return r;
    }

    friend bool operator==(const NCPoly& a, const NCPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const NCPoly& a, const NCPoly& b) { return !(a == b); }

    /// Generators occurring anywhere in the polynomial.
    std::vector<DiffGen> generators() const {
        std::vector<DiffGen> out;
        for (const auto& [w, c] : terms_) out.insert(out.end(), w.begin(), w.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Highest derivative order of `field` present, or nullopt.
    std::optional<int> max_order(int field) const {
        std::optional<int> best;
        for (const auto& [w, c] : terms_)
            for (const auto& g : w)
                if (g.field == field && (!best || g.order > *best)) best = g.order;
        return best;
    }

    /// Canonical text, e.g. "u2'' + 2*u3'". With `group_commutators`, pairs
    /// c*ab - c*ba of length-two words print as c*[a,b].
    std::string str(bool group_commutators = true) const { return render(group_commutators, false); }
    std::string latex(bool group_commutators = true) const { return render(group_commutators, true); }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [w, c] : terms_) {
            nlohmann::json word = nlohmann::json::array();
            for (const auto& g : w) word.push_back({g.field, g.order});
            arr.push_back({{"coeff", ncint::to_json(c)}, {"word", word}});
        }
        return arr;
    }
    static NCPoly from_json(const nlohmann::json& j) {
        NCPoly p;
        for (const auto& t : j) {
            NCWord w;
            for (const auto& g : t.at("word")) w.push_back({g.at(0).get<int>(), g.at(1).get<int>()});
            p.add_term(w, scalar_from_json(t.at("coeff")));
        }
        return p;
    }

    friend std::ostream& operator<<(std::ostream& os, const NCPoly& p) { return os << p.str(); }

private:
    std::string render(bool group, bool latex) const {
        if (terms_.empty()) return "0";
        const char* mul = latex ? " \\star " : "*";
        const char* csep = latex ? "\\," : "*";
        auto word_text = [&](const NCWord& w) {
            std::string s;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (i) s += mul;
                s += latex ? detail::gen_latex(w[i]) : detail::gen_text(w[i]);
            }
            return s;
        };
        std::vector<std::pair<Scalar, std::string>> pieces;
        std::map<NCWord, bool, WordOrder> consumed;
        for (const auto& [w, c] : terms_) {
            if (consumed.count(w)) continue;
            if (group && w.size() == 2 && w[0] != w[1]) {
                NCWord rev{w[1], w[0]};
                auto it = terms_.find(rev);
                if (it != terms_.end() && it->second == -c) {
                    consumed[rev] = true;
                    std::string a = latex ? detail::gen_latex(w[0]) : detail::gen_text(w[0]);
                    std::string b = latex ? detail::gen_latex(w[1]) : detail::gen_text(w[1]);
                    pieces.emplace_back(c, latex ? "[" + a + "," + b + "]_\\star" : "[" + a + "," + b + "]");
                    continue;
                }
            }
            pieces.emplace_back(c, w.empty() ? std::string() : word_text(w));
        }
        std::string out;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const auto& [c, body] = pieces[i];
            bool unit = body.empty();
            Scalar shown = c;
            if (i > 0) {
                if (c.is_real() && c.re().sign() < 0) {
                    out += " - ";
                    shown = -c;
                } else {
                    out += " + ";
                }
            }
            std::string pre = detail::coeff_prefix(shown, unit, csep);
            if (latex && c.is_real() && !shown.re().is_integer() && !unit) {
                const auto& r = shown.re();
                std::string sgn = r.sign() < 0 ? "-" : "";
                Rational a = r.sign() < 0 ? -r : r;
                pre = sgn + "\\frac{" + a.num().get_str() + "}{" + a.den().get_str() + "}";
            }
            out += pre + body;
        }
        return out;
    }

    TermMap terms_;
};

/// Leibniz derivation raising the derivative order of each factor in turn.
inline NCPoly d_x(const NCPoly& p) {
    NCPoly r;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            NCWord v = w;
            v[i] = v[i].derived();
            r.add_term(v, c);
        }
    }
    return r;
}

inline NCPoly d_x(const NCPoly& p, int n) {
    NCPoly r = p;
    for (int i = 0; i < n; ++i) r = d_x(r);
    return r;
}

inline NCPoly commutator(const NCPoly& a, const NCPoly& b) { return a * b - b * a; }

/// Derivation determined by its values on the order-zero generators: each
/// u_k^{(j)} is sent to d_x^j(image(u_k)) and the Leibniz rule is applied
/// across every word. Generators without an image are annihilated. Used to
/// apply a flow ∂_m to a polynomial in the fields.
inline NCPoly apply_derivation(const NCPoly& p, const std::function<std::optional<NCPoly>(int field)>& image) {
    std::map<DiffGen, NCPoly> cache;
    auto value = [&](const DiffGen& g) -> const NCPoly* {
        auto it = cache.find(g);
        if (it != cache.end()) return &it->second;
        auto base = image(g.field);
        NCPoly v = base ? d_x(*base, g.order) : NCPoly();
        return &cache.emplace(g, std::move(v)).first->second;
    };
    NCPoly r;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            const NCPoly* dv = value(w[i]);
            if (dv->is_zero()) continue;
            NCPoly left = NCPoly::word(NCWord(w.begin(), w.begin() + static_cast<long>(i)), c);
            NCPoly right = NCPoly::word(NCWord(w.begin() + static_cast<long>(i) + 1, w.end()));
            r += left * *dv * right;
        }
    }
    return r;
}

template <>
struct RingOps<NCPoly> {
    struct context_type {};
    static context_type context_of(const NCPoly&) { return {}; }
    static NCPoly zero(const context_type&) { return NCPoly(); }
    static NCPoly one(const context_type&) { return NCPoly(1); }
    static bool is_zero(const NCPoly& p) { return p.is_zero(); }
    static bool is_one(const NCPoly& p) { return p.is_one(); }
    static NCPoly d_x(const NCPoly& p) { return ncint::d_x(p); }
    static NCPoly scale(const NCPoly& p, const Scalar& c) { return p * c; }
    static NCPoly inverse(const NCPoly& p) {
        if (p.size() == 1 && p.terms().begin()->first.empty()) return NCPoly(p.constant_term().inv());
        throw not_invertible("NCPoly: only nonzero constants are invertible, got " + p.str());
    }
};

struct missing_generator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct derivation_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Ring homomorphism NCPoly -> R fixed by images of the order-zero
/// generators; u^{(j)} maps to d_x^j of the image of u. An explicit image
/// for a higher-order generator must agree with that derivative.
template <CoefficientRing R>
class Substitution {
public:
    explicit Substitution(typename RingOps<R>::context_type ctx) : ctx_(std::move(ctx)) {}

    Substitution& set(const DiffGen& g, R value) {
        explicit_.insert_or_assign(g, std::move(value));
        return *this;
    }

    R image(const DiffGen& g) const {
        auto it = cache_.find(g);
        if (it != cache_.end()) return it->second;
        R v = compute(g);
        cache_.emplace(g, v);
        return v;
    }

    R operator()(const NCPoly& p) const {
        using Ops = RingOps<R>;
        R acc = Ops::zero(ctx_);
        for (const auto& [w, c] : p.terms()) {
            R term = Ops::one(ctx_);
            for (const auto& g : w) term = term * image(g);
            acc = acc + Ops::scale(term, c);
        }
        return acc;
    }

private:
    R compute(const DiffGen& g) const {
        using Ops = RingOps<R>;
        auto base = explicit_.find(g.base());
        if (base == explicit_.end()) {
            if (g.order > 0) {
                auto ex = explicit_.find(g);
                if (ex != explicit_.end()) return ex->second;
            }
            throw missing_generator("substitute: no image for " + detail::gen_text(g.base()));
        }
        if (g.order == 0) return base->second;
        R v = image(DiffGen{g.field, g.order - 1});
        v = Ops::d_x(v);
        auto ex = explicit_.find(g);
        if (ex != explicit_.end() && !(ex->second == v))
            throw derivation_mismatch("substitute: image of " + detail::gen_text(g) +
                                      " is not the x-derivative of the image of " +
                                      detail::gen_text(g.base()));
        return v;
    }

    typename RingOps<R>::context_type ctx_;
    std::map<DiffGen, R> explicit_;
    mutable std::map<DiffGen, R> cache_;
};

template <CoefficientRing R>
R substitute(const NCPoly& p, const Substitution<R>& sigma) {
    return sigma(p);
}

/// Substitution into NCPoly itself (used by the reduction tables).
inline NCPoly substitute_fields(const NCPoly& p, const std::map<int, NCPoly>& images) {
    std::map<DiffGen, NCPoly> cache;
    auto value = [&](const DiffGen& g) -> const NCPoly& {
        auto it = cache.find(g);
        if (it != cache.end()) return it->second;
        auto img = images.find(g.field);
        NCPoly v = img == images.end() ? NCPoly::gen(g) : d_x(img->second, g.order);
        return cache.emplace(g, std::move(v)).first->second;
    };
    NCPoly r;
    for (const auto& [w, c] : p.terms()) {
        NCPoly term(c);
        for (const auto& g : w) term = term * value(g);
        r += term;
    }
    return r;
}

}  // namespace ncint
