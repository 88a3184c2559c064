#pragma once

// Exponential polynomials  Σ c · x^mono · e^{phase(x)}  in the coordinates
// x^0..x^{M-1} (coordinate 0 is x), and quotients of them.
//
// Terms are kept sorted by (phase, mono) in a total order compatible with
// multiplication, so the normal form is unique and the last term is the
// leading one. Distinct phases are linearly independent over polynomials,
// which makes "every coefficient is zero" a complete zero test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ring.hpp"
#include "scalar.hpp"

namespace ncint {

struct pole_at_point : std::domain_error {
    using std::domain_error::domain_error;
};

/// Linear form Σ lin[i] x^i + constant with Gaussian-rational coefficients.
/// Trailing zero entries of `lin` are trimmed so the form is canonical.
class Phase {
public:
    Phase() = default;
    explicit Phase(std::vector<Scalar> lin, Scalar constant = Scalar(0))
        : lin_(std::move(lin)), c_(std::move(constant)) {
        trim();
    }
    static Phase coordinate(std::size_t i, const Scalar& coeff) {
        std::vector<Scalar> lin(i + 1);
        lin[i] = coeff;
        return Phase(std::move(lin));
    }

    const std::vector<Scalar>& linear() const { return lin_; }
    const Scalar& constant() const { return c_; }
    Scalar coeff(std::size_t i) const { return i < lin_.size() ? lin_[i] : Scalar(0); }
    bool is_zero() const { return lin_.empty() && c_.is_zero(); }

    Phase& operator+=(const Phase& o) {
        if (o.lin_.size() > lin_.size()) lin_.resize(o.lin_.size());
        for (std::size_t i = 0; i < o.lin_.size(); ++i) lin_[i] += o.lin_[i];
        c_ += o.c_;
        trim();
        return *this;
    }
    Phase operator-() const {
        Phase p;
        p.lin_.reserve(lin_.size());
        for (const auto& s : lin_) p.lin_.push_back(-s);
        p.c_ = -c_;
        return p;
    }
    friend Phase operator+(Phase a, const Phase& b) { return a += b; }
    friend Phase operator-(const Phase& a, const Phase& b) { return a + (-b); }
    Phase scaled(const Scalar& s) const {
        Phase p;
        for (const auto& v : lin_) p.lin_.push_back(v * s);
        p.c_ = c_ * s;
        p.trim();
        return p;
    }

    static int compare(const Phase& a, const Phase& b) {
        const std::size_t n = std::max(a.lin_.size(), b.lin_.size());
        static const Scalar zero;
        for (std::size_t i = 0; i < n; ++i) {
            const Scalar& x = i < a.lin_.size() ? a.lin_[i] : zero;
            const Scalar& y = i < b.lin_.size() ? b.lin_[i] : zero;
            int c = Scalar::compare(x, y);
            if (c != 0) return c;
        }
        return Scalar::compare(a.c_, b.c_);
    }
    friend bool operator==(const Phase& a, const Phase& b) { return a.lin_ == b.lin_ && a.c_ == b.c_; }

    std::complex<double> eval(std::span<const double> point) const {
        std::complex<double> acc = c_.to_complex();
        for (std::size_t i = 0; i < lin_.size(); ++i) {
            if (lin_[i].is_zero()) continue;
            double xi = i < point.size() ? point[i] : 0.0;
            acc += lin_[i].to_complex() * xi;
        }
        return acc;
    }

private:
    void trim() {
        while (!lin_.empty() && lin_.back().is_zero()) lin_.pop_back();
    }
    std::vector<Scalar> lin_;
    Scalar c_;
};

/// Exponents of the polynomial prefactor, trailing zeros trimmed.
using Mono = std::vector<int>;

namespace detail {
inline void trim_mono(Mono& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}
inline int compare_mono(const Mono& a, const Mono& b) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int x = i < a.size() ? a[i] : 0;
        int y = i < b.size() ? b[i] : 0;
        if (x != y) return x < y ? -1 : 1;
    }
    return 0;
}
inline Mono add_mono(const Mono& a, const Mono& b) {
    Mono r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}
}  // namespace detail

struct ExpTerm {
    Scalar coeff;
    Mono mono;
    Phase phase;

    static int compare_key(const ExpTerm& a, const ExpTerm& b) {
        int c = Phase::compare(a.phase, b.phase);
        return c != 0 ? c : detail::compare_mono(a.mono, b.mono);
    }
};

class ExpPoly {
public:
    ExpPoly() = default;
    ExpPoly(const Scalar& c) {  // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) terms_.push_back({c, {}, {}});
    }
    ExpPoly(long c) : ExpPoly(Scalar(c)) {}  // NOLINT
    ExpPoly(int c) : ExpPoly(Scalar(c)) {}   // NOLINT

    static ExpPoly term(const Scalar& c, Mono mono, Phase phase) {
        ExpPoly p;
        detail::trim_mono(mono);
        if (!c.is_zero()) p.terms_.push_back({c, std::move(mono), std::move(phase)});
        return p;
    }
    /// e^{phase}
    static ExpPoly exp(Phase phase, const Scalar& c = Scalar(1)) { return term(c, {}, std::move(phase)); }
    /// The coordinate function x^i.
    static ExpPoly coordinate(std::size_t i) {
        Mono m(i + 1, 0);
        m[i] = 1;
        return term(Scalar(1), std::move(m), Phase());
    }

    const std::vector<ExpTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty() && terms_[0].phase.is_zero());
    }
    bool is_one() const { return is_constant() && !terms_.empty() && terms_[0].coeff.is_one(); }
    /// Single term with no polynomial part: an invertible element.
    bool is_unit() const { return terms_.size() == 1 && terms_[0].mono.empty(); }
    const ExpTerm& leading() const { return terms_.back(); }
    const ExpTerm& trailing() const { return terms_.front(); }

    ExpPoly& operator+=(const ExpPoly& o) { *this = merge(*this, o, Scalar(1)); return *this; }
    ExpPoly& operator-=(const ExpPoly& o) { *this = merge(*this, o, Scalar(-1)); return *this; }
    friend ExpPoly operator+(const ExpPoly& a, const ExpPoly& b) { return merge(a, b, Scalar(1)); }
    friend ExpPoly operator-(const ExpPoly& a, const ExpPoly& b) { return merge(a, b, Scalar(-1)); }
    ExpPoly operator-() const { return scaled(Scalar(-1)); }

    ExpPoly scaled(const Scalar& c) const {
        ExpPoly r;
        if (c.is_zero()) return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }

    /// Multiply by c · e^{phase}.
    ExpPoly times_unit(const Scalar& c, const Phase& phase) const {
        ExpPoly r;
        if (c.is_zero()) return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_) {
            t.coeff *= c;
            t.phase += phase;
        }
        return r;
    }

    friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.is_constant()) return b.scaled(a.terms_[0].coeff);
        if (b.is_constant()) return a.scaled(b.terms_[0].coeff);
        std::vector<ExpTerm> prod;
        prod.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                ExpTerm t{ta.coeff * tb.coeff, ta.mono.empty() && tb.mono.empty() ? Mono{} : detail::add_mono(ta.mono, tb.mono),
                          ta.phase + tb.phase};
                prod.push_back(std::move(t));
            }
        return from_unsorted(std::move(prod));
    }

    ExpPoly pow(int e) const {
        if (e < 0) throw std::invalid_argument("ExpPoly::pow: negative exponent");
        ExpPoly acc(1);
        ExpPoly base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return acc;
    }

    /// ∂/∂x^i.
    ExpPoly diff(std::size_t i) const {
        std::vector<ExpTerm> out;
        out.reserve(terms_.size() * 2);
        for (const auto& t : terms_) {
            Scalar a = t.phase.coeff(i);
            if (!a.is_zero()) out.push_back({t.coeff * a, t.mono, t.phase});
            if (i < t.mono.size() && t.mono[i] > 0) {
                Mono m = t.mono;
                Scalar c = t.coeff * Scalar(m[i]);
                m[i] -= 1;
                detail::trim_mono(m);
                out.push_back({c, std::move(m), t.phase});
            }
        }
        return from_unsorted(std::move(out));
    }

    bool depends_on(std::size_t i) const {
        for (const auto& t : terms_)
            if (!t.phase.coeff(i).is_zero() || (i < t.mono.size() && t.mono[i] > 0)) return true;
        return false;
    }

    friend bool operator==(const ExpPoly& a, const ExpPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t k = 0; k < a.terms_.size(); ++k) {
            const auto& x = a.terms_[k];
            const auto& y = b.terms_[k];
            if (ExpTerm::compare_key(x, y) != 0 || x.coeff != y.coeff) return false;
        }
        return true;
    }
    friend bool operator!=(const ExpPoly& a, const ExpPoly& b) { return !(a == b); }

    /// Total structural order, used to sort denominator factors.
    static int compare(const ExpPoly& a, const ExpPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
        for (std::size_t k = 0; k < a.terms_.size(); ++k) {
            int c = ExpTerm::compare_key(a.terms_[k], b.terms_[k]);
            if (c != 0) return c;
            c = Scalar::compare(a.terms_[k].coeff, b.terms_[k].coeff);
            if (c != 0) return c;
        }
        return 0;
    }

    /// Evaluated as mantissa · e^{log_scale} so that large phases do not
    /// overflow; returns {mantissa, log_scale}.
    std::pair<std::complex<double>, double> eval_scaled(std::span<const double> point) const {
        if (terms_.empty()) return {0.0, 0.0};
        std::vector<std::complex<double>> ph;
        ph.reserve(terms_.size());
        double mx = -HUGE_VAL;
        for (const auto& t : terms_) {
            ph.push_back(t.phase.eval(point));
            mx = std::max(mx, ph.back().real());
        }
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const auto& t = terms_[k];
            std::complex<double> v = t.coeff.to_complex() * std::exp(ph[k] - mx);
            for (std::size_t i = 0; i < t.mono.size(); ++i) {
                double xi = i < point.size() ? point[i] : 0.0;
                for (int e = 0; e < t.mono[i]; ++e) v *= xi;
            }
            acc += v;
        }
        return {acc, mx};
    }

    std::complex<double> eval(std::span<const double> point) const {
        auto [m, s] = eval_scaled(point);
        return m * std::exp(s);
    }

    /// Exact division when `d` divides this polynomial; nullopt otherwise.
    std::optional<ExpPoly> divide_exact(const ExpPoly& d) const;

    std::string str(const std::vector<std::string>& names = {}) const;

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : terms_) {
            nlohmann::json lin = nlohmann::json::array();
            for (const auto& s : t.phase.linear()) lin.push_back(ncint::to_json(s));
            arr.push_back({{"coeff", ncint::to_json(t.coeff)},
                           {"mono", t.mono},
                           {"phase", lin},
                           {"phase_const", ncint::to_json(t.phase.constant())}});
        }
        return arr;
    }
    static ExpPoly from_json(const nlohmann::json& j) {
        std::vector<ExpTerm> ts;
        for (const auto& t : j) {
            std::vector<Scalar> lin;
            for (const auto& s : t.at("phase")) lin.push_back(scalar_from_json(s));
            Scalar c = t.contains("phase_const") ? scalar_from_json(t.at("phase_const")) : Scalar(0);
            Mono m = t.at("mono").get<Mono>();
            detail::trim_mono(m);
            ts.push_back({scalar_from_json(t.at("coeff")), std::move(m), Phase(std::move(lin), c)});
        }
        return from_unsorted(std::move(ts));
    }

    static ExpPoly from_unsorted(std::vector<ExpTerm> ts) {
        std::sort(ts.begin(), ts.end(),
                  [](const ExpTerm& a, const ExpTerm& b) { return ExpTerm::compare_key(a, b) < 0; });
        ExpPoly r;
        r.terms_.reserve(ts.size());
        for (auto& t : ts) {
            if (!r.terms_.empty() && ExpTerm::compare_key(r.terms_.back(), t) == 0) {
                r.terms_.back().coeff += t.coeff;
            } else {
                if (!r.terms_.empty() && r.terms_.back().coeff.is_zero()) r.terms_.pop_back();
                r.terms_.push_back(std::move(t));
            }
        }
        if (!r.terms_.empty() && r.terms_.back().coeff.is_zero()) r.terms_.pop_back();
        return r;
    }

private:
    static ExpPoly merge(const ExpPoly& a, const ExpPoly& b, const Scalar& sb) {
        ExpPoly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            int c;
            if (i == a.terms_.size())
                c = 1;
            else if (j == b.terms_.size())
                c = -1;
            else
                c = ExpTerm::compare_key(a.terms_[i], b.terms_[j]);
            if (c < 0) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (c > 0) {
                ExpTerm t = b.terms_[j++];
                t.coeff *= sb;
                r.terms_.push_back(std::move(t));
            } else {
                Scalar s = a.terms_[i].coeff + b.terms_[j].coeff * sb;
                if (!s.is_zero()) r.terms_.push_back({std::move(s), a.terms_[i].mono, a.terms_[i].phase});
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::vector<ExpTerm> terms_;
};

inline std::optional<ExpPoly> ExpPoly::divide_exact(const ExpPoly& d) const {
    if (d.is_zero()) throw division_by_zero("ExpPoly: division by zero");
    if (is_zero()) return ExpPoly();
    const ExpTerm& dl = d.leading();
    const Scalar dl_inv = dl.coeff.inv();
    const Phase lo_phase = trailing().phase - d.trailing().phase;
    ExpPoly rem = *this;
    std::vector<ExpTerm> quot;
    const std::size_t cap = 4 * terms_.size() * d.terms_.size() + 64;
    while (!rem.is_zero()) {
        if (quot.size() > cap) return std::nullopt;
        const ExpTerm& rl = rem.leading();
        Mono qm(std::max(rl.mono.size(), dl.mono.size()), 0);
        for (std::size_t i = 0; i < qm.size(); ++i) {
            int a = i < rl.mono.size() ? rl.mono[i] : 0;
            int b = i < dl.mono.size() ? dl.mono[i] : 0;
            if (a < b) return std::nullopt;
            qm[i] = a - b;
        }
        detail::trim_mono(qm);
        Phase qp = rl.phase - dl.phase;
        if (Phase::compare(qp, lo_phase) < 0) return std::nullopt;
        ExpTerm qt{rl.coeff * dl_inv, std::move(qm), std::move(qp)};
        ExpPoly step = ExpPoly::term(qt.coeff, qt.mono, qt.phase) * d;
        rem -= step;
        quot.push_back(std::move(qt));
    }
    return from_unsorted(std::move(quot));
}

inline std::string ExpPoly::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    auto name = [&](std::size_t i) { return i < names.size() ? names[i] : "x" + std::to_string(i); };
    std::ostringstream os;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        if (k) os << " + ";
        os << "(" << t.coeff.str() << ")";
        for (std::size_t i = 0; i < t.mono.size(); ++i)
            if (t.mono[i]) os << "*" << name(i) << (t.mono[i] > 1 ? "^" + std::to_string(t.mono[i]) : "");
        if (!t.phase.is_zero()) {
            os << "*e^(";
            bool first = true;
            for (std::size_t i = 0; i < t.phase.linear().size(); ++i) {
                if (t.phase.linear()[i].is_zero()) continue;
                if (!first) os << " + ";
                first = false;
                os << "(" << t.phase.linear()[i].str() << ")" << name(i);
            }
            if (!t.phase.constant().is_zero()) os << (first ? "" : " + ") << "(" << t.phase.constant().str() << ")";
            os << ")";
        }
    }
    return os.str();
}

/// num / Π factor_i^{e_i}. Denominator factors are normalized (leading
/// coefficient 1, leading phase 0) and sorted, so equal factors coincide
/// structurally; the zero test is the zero test of `num`.
class ExpRational {
public:
    struct Factor {
        ExpPoly base;
        int exp;
    };

    ExpRational() = default;
    ExpRational(ExpPoly num) : num_(std::move(num)) {}  // NOLINT(google-explicit-constructor)
    ExpRational(const Scalar& c) : num_(c) {}           // NOLINT
    ExpRational(long c) : num_(Scalar(c)) {}            // NOLINT
    ExpRational(int c) : num_(Scalar(c)) {}             // NOLINT
    ExpRational(ExpPoly num, const ExpPoly& den) : num_(std::move(num)) {
        if (den.is_zero()) throw division_by_zero("ExpRational: zero denominator");
        divide_by(den, 1);
        canonical();
    }

    const ExpPoly& num() const { return num_; }
    const std::vector<Factor>& factors() const { return den_; }
    /// Expanded denominator.
    ExpPoly den() const {
        ExpPoly d(1);
        for (const auto& f : den_) d = d * f.base.pow(f.exp);
        return d;
    }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.empty() && num_.is_one(); }
    bool is_constant() const { return den_.empty() && num_.is_constant(); }

    ExpRational operator-() const {
        ExpRational r = *this;
        r.num_ = -r.num_;
        return r;
    }
    ExpRational scaled(const Scalar& c) const {
        ExpRational r = *this;
        r.num_ = r.num_.scaled(c);
        if (r.num_.is_zero()) r.den_.clear();
        return r;
    }

    friend ExpRational operator+(const ExpRational& a, const ExpRational& b) { return combine(a, b, Scalar(1)); }
    friend ExpRational operator-(const ExpRational& a, const ExpRational& b) { return combine(a, b, Scalar(-1)); }
    ExpRational& operator+=(const ExpRational& o) { return *this = *this + o; }
    ExpRational& operator-=(const ExpRational& o) { return *this = *this - o; }

    friend ExpRational operator*(const ExpRational& a, const ExpRational& b) {
        if (a.is_zero() || b.is_zero()) return {};
        ExpRational r;
        r.num_ = a.num_ * b.num_;
        r.den_ = merge_factors(a.den_, b.den_, [](int x, int y) { return x + y; });
        r.cancel_common();
        r.canonical();
        return r;
    }

    ExpRational inv() const {
        if (is_zero()) throw division_by_zero("ExpRational: inverse of zero");
        ExpRational r;
        r.num_ = ExpPoly(1);
        for (const auto& f : den_) r.num_ = r.num_ * f.base.pow(f.exp);
        r.divide_by(num_, 1);
        r.canonical();
        return r;
    }
    friend ExpRational operator/(const ExpRational& a, const ExpRational& b) { return a * b.inv(); }

    /// ∂/∂x^i by the quotient rule; only factors depending on x^i gain a power.
    ExpRational diff(std::size_t i) const {
        if (is_zero()) return {};
        std::vector<std::size_t> dep;
        std::vector<ExpPoly> dfs;
        for (std::size_t k = 0; k < den_.size(); ++k) {
            if (den_[k].base.depends_on(i)) {
                dep.push_back(k);
                dfs.push_back(den_[k].base.diff(i));
            }
        }
        ExpRational r;
        if (dep.empty()) {
            r.num_ = num_.diff(i);
            r.den_ = den_;
            r.canonical();
            return r;
        }
        ExpPoly prod_all(1);
        for (std::size_t k : dep) prod_all = prod_all * den_[k].base;
        ExpPoly n = num_.diff(i) * prod_all;
        for (std::size_t a = 0; a < dep.size(); ++a) {
            ExpPoly others(1);
            for (std::size_t b = 0; b < dep.size(); ++b)
                if (b != a) others = others * den_[dep[b]].base;
            n -= (num_ * dfs[a] * others).scaled(Scalar(den_[dep[a]].exp));
        }
        r.num_ = std::move(n);
        r.den_ = den_;
        for (std::size_t k : dep) r.den_[k].exp += 1;
        r.cancel_common();
        r.canonical();
        return r;
    }

    friend bool operator==(const ExpRational& a, const ExpRational& b) { return (a - b).is_zero(); }
    friend bool operator!=(const ExpRational& a, const ExpRational& b) { return !(a == b); }

    /// Remove denominator factors that divide the numerator exactly.
    ExpRational reduced() const {
        ExpRational r = *this;
        r.cancel_common();
        return r;
    }

    std::complex<double> eval(std::span<const double> point) const {
        auto [nm, ns] = num_.eval_scaled(point);
        if (num_.is_zero()) return 0.0;
        std::complex<double> mant = nm;
        double scale = ns;
        for (const auto& f : den_) {
            auto [dm, ds] = f.base.eval_scaled(point);
            if (std::abs(dm) == 0.0) throw pole_at_point("ExpRational: denominator vanishes at point");
            mant /= std::pow(dm, f.exp);
            scale -= ds * f.exp;
        }
        return mant * std::exp(scale);
    }

    /// Total number of stored terms (numerator plus factor bases).
    std::size_t complexity() const {
        std::size_t n = num_.size();
        for (const auto& f : den_) n += f.base.size();
        return n;
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        if (den_.empty()) return num_.str(names);
        std::string s = "[" + num_.str(names) + "] / ";
        for (std::size_t k = 0; k < den_.size(); ++k) {
            if (k) s += " ";
            s += "[" + den_[k].base.str(names) + "]";
            if (den_[k].exp != 1) s += "^" + std::to_string(den_[k].exp);
        }
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json fs = nlohmann::json::array();
        for (const auto& f : den_) fs.push_back({{"base", f.base.to_json()}, {"exp", f.exp}});
        return {{"num", num_.to_json()}, {"den", fs}};
    }
    static ExpRational from_json(const nlohmann::json& j) {
        ExpRational r(ExpPoly::from_json(j.at("num")));
        for (const auto& f : j.at("den")) r.divide_by(ExpPoly::from_json(f.at("base")), f.at("exp").get<int>());
        r.canonical();
        return r;
    }

private:
    template <class Op>
    static std::vector<Factor> merge_factors(const std::vector<Factor>& a, const std::vector<Factor>& b, Op op) {
        std::vector<Factor> out;
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            int c;
            if (i == a.size())
                c = 1;
            else if (j == b.size())
                c = -1;
            else
                c = ExpPoly::compare(a[i].base, b[j].base);
            if (c < 0) {
                out.push_back({a[i].base, op(a[i].exp, 0)});
                ++i;
            } else if (c > 0) {
                out.push_back({b[j].base, op(0, b[j].exp)});
                ++j;
            } else {
                out.push_back({a[i].base, op(a[i].exp, b[j].exp)});
                ++i;
                ++j;
            }
        }
        std::erase_if(out, [](const Factor& f) { return f.exp == 0; });
        return out;
    }

    static ExpRational combine(const ExpRational& a, const ExpRational& b, const Scalar& sb) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return b.scaled(sb);
        ExpRational r;
        r.den_ = merge_factors(a.den_, b.den_, [](int x, int y) { return std::max(x, y); });
        auto lift = [&](const ExpRational& v) {
            ExpPoly n = v.num_;
            for (const auto& f : r.den_) {
                int have = 0;
                for (const auto& g : v.den_)
                    if (ExpPoly::compare(g.base, f.base) == 0) have = g.exp;
                if (f.exp > have) n = n * f.base.pow(f.exp - have);
            }
            return n;
        };
        r.num_ = lift(a) + lift(b).scaled(sb);
        if (r.num_.is_zero()) {
            r.den_.clear();
            return r;
        }
        r.cancel_common();
        r.canonical();
        return r;
    }

    /// Divide by d^e: units move into the numerator, the rest becomes a
    /// normalized factor.
    void divide_by(const ExpPoly& d, int e) {
        if (d.is_zero()) throw division_by_zero("ExpRational: zero factor");
        const ExpTerm& lead = d.leading();
        const Scalar cinv = lead.coeff.inv();
        const Phase neg = -lead.phase;
        if (d.is_unit()) {
            for (int k = 0; k < e; ++k) num_ = num_.times_unit(cinv, neg);
            return;
        }
        ExpPoly base = d.times_unit(cinv, neg);
        for (int k = 0; k < e; ++k) num_ = num_.times_unit(cinv, neg);
        for (auto& f : den_)
            if (ExpPoly::compare(f.base, base) == 0) {
                f.exp += e;
                return;
            }
        den_.push_back({std::move(base), e});
    }

    void canonical() {
        if (num_.is_zero()) {
            den_.clear();
            return;
        }
        std::sort(den_.begin(), den_.end(),
                  [](const Factor& a, const Factor& b) { return ExpPoly::compare(a.base, b.base) < 0; });
    }

    void cancel_common() {
        for (auto& f : den_) {
            while (f.exp > 0 && num_.size() >= f.base.size()) {
                auto q = num_.divide_exact(f.base);
                if (!q) break;
                num_ = std::move(*q);
                --f.exp;
            }
        }
        std::erase_if(den_, [](const Factor& f) { return f.exp == 0; });
    }

    ExpPoly num_;
    std::vector<Factor> den_;
};

/// Floating-point image of an ExpPoly for repeated evaluation.
class CompiledExpPoly {
public:
    CompiledExpPoly() = default;
    explicit CompiledExpPoly(const ExpPoly& p) {
        for (const auto& t : p.terms()) {
            Term c;
            c.coeff = t.coeff.to_complex();
            c.mono = t.mono;
            for (const auto& s : t.phase.linear()) c.lin.push_back(s.to_complex());
            c.constant = t.phase.constant().to_complex();
            terms_.push_back(std::move(c));
        }
    }
    bool empty() const { return terms_.empty(); }

    /// {mantissa, log scale} as in ExpPoly::eval_scaled.
    std::pair<std::complex<double>, double> eval_scaled(std::span<const double> point) const {
        if (terms_.empty()) return {0.0, 0.0};
        thread_local std::vector<std::complex<double>> ph;
        ph.resize(terms_.size());
        double mx = -HUGE_VAL;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const Term& t = terms_[k];
            std::complex<double> v = t.constant;
            for (std::size_t i = 0; i < t.lin.size(); ++i) v += t.lin[i] * (i < point.size() ? point[i] : 0.0);
            ph[k] = v;
            mx = std::max(mx, v.real());
        }
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const Term& t = terms_[k];
            std::complex<double> v = t.coeff * std::exp(ph[k] - mx);
            for (std::size_t i = 0; i < t.mono.size(); ++i)
                for (int e = 0; e < t.mono[i]; ++e) v *= i < point.size() ? point[i] : 0.0;
            acc += v;
        }
        return {acc, mx};
    }

private:
    struct Term {
        std::complex<double> coeff;
        Mono mono;
        std::vector<std::complex<double>> lin;
        std::complex<double> constant;
    };
    std::vector<Term> terms_;
};

class CompiledExpRational {
public:
    CompiledExpRational() = default;
    explicit CompiledExpRational(const ExpRational& r) : num_(r.num()) {
        for (const auto& f : r.factors()) den_.emplace_back(CompiledExpPoly(f.base), f.exp);
    }
    std::complex<double> eval(std::span<const double> point) const {
        if (num_.empty()) return 0.0;
        auto [mant, scale] = num_.eval_scaled(point);
        for (const auto& [base, e] : den_) {
            auto [dm, ds] = base.eval_scaled(point);
            if (std::abs(dm) == 0.0) throw pole_at_point("ExpRational: denominator vanishes at point");
            mant /= std::pow(dm, e);
            scale -= ds * e;
        }
        return mant * std::exp(scale);
    }

private:
    CompiledExpPoly num_;
    std::vector<std::pair<CompiledExpPoly, int>> den_;
};

/// Commutative field of exponential-polynomial quotients; d_x = ∂/∂x^0.
template <>
struct RingOps<ExpRational> {
    struct context_type {};
    static context_type context_of(const ExpRational&) { return {}; }
    static ExpRational zero(const context_type&) { return ExpRational(); }
    static ExpRational one(const context_type&) { return ExpRational(1); }
    static bool is_zero(const ExpRational& a) { return a.is_zero(); }
    static bool is_one(const ExpRational& a) { return a.is_one() || (a - ExpRational(1)).is_zero(); }
    static ExpRational d_x(const ExpRational& a) { return a.diff(0); }
    static ExpRational scale(const ExpRational& a, const Scalar& c) { return a.scaled(c); }
    static ExpRational inverse(const ExpRational& a) {
        if (a.is_zero()) throw not_invertible("ExpRational: zero has no inverse");
        return a.inv();
    }
};

}  // namespace ncint
