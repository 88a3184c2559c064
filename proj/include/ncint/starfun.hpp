#pragma once

// θ-truncated Moyal algebra over exponential-polynomial rationals.
//
// A StarSeries is c_0 + c_1 θ + ... + c_K θ^K. The single noncommutative
// pair is (μ, ν) with [x^μ, x^ν]_★ = iθ, i.e. θ^{μν} = θ = -θ^{νμ}.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exppoly.hpp"
#include "ring.hpp"
#include "scalar.hpp"

namespace ncint {

struct theta_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct zero_leading_coefficient : std::domain_error {
    using std::domain_error::domain_error;
};
struct nonlinear_phase : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ThetaConfig {
    std::size_t mu = 0;
    std::size_t nu = 1;
    int K = 2;

    ThetaConfig() = default;
    ThetaConfig(std::size_t mu_, std::size_t nu_, int K_) : mu(mu_), nu(nu_), K(K_) {
        if (mu == nu) throw std::invalid_argument("ThetaConfig: μ and ν must differ");
        if (K < 0) throw std::invalid_argument("ThetaConfig: K must be ≥ 0");
    }
    friend bool operator==(const ThetaConfig&, const ThetaConfig&) = default;

    nlohmann::json to_json() const { return {{"mu", mu}, {"nu", nu}, {"K", K}}; }
};

class StarSeries {
public:
    StarSeries() : c_(1) {}
    explicit StarSeries(const ThetaConfig& cfg) : cfg_(cfg), c_(cfg.K + 1) {}
    StarSeries(const ThetaConfig& cfg, ExpRational c0) : cfg_(cfg), c_(cfg.K + 1) { c_[0] = std::move(c0); }
    StarSeries(const ThetaConfig& cfg, std::vector<ExpRational> orders) : cfg_(cfg), c_(std::move(orders)) {
        c_.resize(cfg.K + 1);
    }

    const ThetaConfig& config() const { return cfg_; }
    int K() const { return cfg_.K; }
    const ExpRational& operator[](int n) const { return c_.at(n); }
    ExpRational& operator[](int n) { return c_.at(n); }
    const std::vector<ExpRational>& orders() const { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_one() const {
        if (!c_[0].is_one()) return false;
        for (std::size_t n = 1; n < c_.size(); ++n)
            if (!c_[n].is_zero()) return false;
        return true;
    }

    StarSeries operator-() const {
        StarSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend StarSeries operator+(const StarSeries& a, const StarSeries& b) {
        check(a, b);
        StarSeries r = a;
        for (std::size_t n = 0; n < r.c_.size(); ++n) r.c_[n] += b.c_[n];
        return r;
    }
    friend StarSeries operator-(const StarSeries& a, const StarSeries& b) {
        check(a, b);
        StarSeries r = a;
        for (std::size_t n = 0; n < r.c_.size(); ++n) r.c_[n] -= b.c_[n];
        return r;
    }
    StarSeries& operator+=(const StarSeries& o) { return *this = *this + o; }
    StarSeries& operator-=(const StarSeries& o) { return *this = *this - o; }
    StarSeries scaled(const Scalar& s) const {
        StarSeries r = *this;
        for (auto& x : r.c_) x = x.scaled(s);
        return r;
    }
    /// Multiply by θ^k (shifting orders, dropping what falls past K).
    StarSeries times_theta(int k) const {
        StarSeries r(cfg_);
        for (int n = 0; n + k <= cfg_.K; ++n) r.c_[n + k] = c_[n];
        return r;
    }

    friend StarSeries operator*(const StarSeries& a, const StarSeries& b);  // the Moyal product
    friend bool operator==(const StarSeries& a, const StarSeries& b) { return (a - b).is_zero(); }
    friend bool operator!=(const StarSeries& a, const StarSeries& b) { return !(a == b); }

    StarSeries diff(std::size_t coord) const {
        StarSeries r(cfg_);
        for (std::size_t n = 0; n < c_.size(); ++n) r.c_[n] = c_[n].diff(coord);
        return r;
    }
    StarSeries reduced() const {
        StarSeries r = *this;
        for (auto& x : r.c_) x = x.reduced();
        return r;
    }

    /// Σ_j c_j(point) θ_num^j.
    std::complex<double> eval(std::span<const double> point, double theta_num) const {
        std::complex<double> acc = 0.0;
        double tp = 1.0;
        for (std::size_t n = 0; n < c_.size(); ++n) {
            if (!c_[n].is_zero()) acc += c_[n].eval(point) * tp;
            tp *= theta_num;
        }
        return acc;
    }
    /// Per-order values c_j(point).
    std::vector<std::complex<double>> eval_orders(std::span<const double> point) const {
        std::vector<std::complex<double>> v;
        for (const auto& x : c_) v.push_back(x.is_zero() ? std::complex<double>(0.0) : x.eval(point));
        return v;
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        std::string s;
        for (std::size_t n = 0; n < c_.size(); ++n) {
            if (c_[n].is_zero()) continue;
            if (!s.empty()) s += "\n + ";
            s += "theta^" + std::to_string(n) + " * {" + c_[n].str(names) + "}";
        }
        return s.empty() ? "0" : s;
    }

    nlohmann::json to_json() const {
        nlohmann::json ord = nlohmann::json::array();
        for (const auto& x : c_) ord.push_back(x.to_json());
        return {{"theta", cfg_.to_json()}, {"orders", ord}};
    }
    static StarSeries from_json(const nlohmann::json& j) {
        const auto& t = j.at("theta");
        ThetaConfig cfg(t.at("mu").get<std::size_t>(), t.at("nu").get<std::size_t>(), t.at("K").get<int>());
        std::vector<ExpRational> ord;
        for (const auto& o : j.at("orders")) ord.push_back(ExpRational::from_json(o));
        return StarSeries(cfg, std::move(ord));
    }

    static void check(const StarSeries& a, const StarSeries& b) {
        if (!(a.cfg_ == b.cfg_)) throw theta_mismatch("StarSeries: operands use different θ configurations");
    }

private:
    ThetaConfig cfg_;
    std::vector<ExpRational> c_;
};

namespace detail {

/// Memoized mixed derivatives ∂_μ^i ∂_ν^j of each θ-order of a series.
class DerivTable {
public:
    explicit DerivTable(const StarSeries& f) : f_(f), memo_(f.orders().size()) {}

    const ExpRational& get(int order, int i, int j) {
        auto& m = memo_[order];
        auto key = std::make_pair(i, j);
        if (auto it = m.find(key); it != m.end()) return it->second;
        ExpRational v;
        if (i == 0 && j == 0)
            v = f_[order];
        else if (i > 0)
            v = get(order, i - 1, j).diff(f_.config().mu);
        else
            v = get(order, i, j - 1).diff(f_.config().nu);
        return m.emplace(key, std::move(v)).first->second;
    }

private:
    const StarSeries& f_;
    std::vector<std::map<std::pair<int, int>, ExpRational>> memo_;
};

/// Σ_{a+b+p=n} w(p) P^p(f_a, g_b) where
/// P^p(F,G) = Σ_q C(p,q) (-1)^q (∂_μ^{p-q} ∂_ν^q F)(∂_ν^{p-q} ∂_μ^q G).
template <class Weight>
StarSeries bidiff_series(DerivTable& df, DerivTable& dg, const StarSeries& f, const StarSeries& g, Weight weight) {
    StarSeries::check(f, g);
    const int K = f.K();
    StarSeries out(f.config());
    for (int n = 0; n <= K; ++n) {
        ExpRational acc;
        for (int p = 0; p <= n; ++p) {
            const Scalar w = weight(p);
            if (w.is_zero()) continue;
            for (int a = 0; a + p <= n; ++a) {
                const int b = n - p - a;
                if (f[a].is_zero() || g[b].is_zero()) continue;
                ExpRational term;
                for (int q = 0; q <= p; ++q) {
                    const ExpRational& F = df.get(a, p - q, q);
                    if (F.is_zero()) continue;
                    const ExpRational& G = dg.get(b, q, p - q);
                    if (G.is_zero()) continue;
                    Scalar c(binom(p, q) * Rational(q % 2 ? -1 : 1));
                    term += (F * G).scaled(c);
                }
                acc += term.scaled(w);
            }
        }
        out[n] = std::move(acc);
    }
    return out;
}

inline Scalar moyal_weight(int p) {
    // (i/2)^p / p!
    Scalar w(1);
    const Scalar half_i(Rational(0), Rational(1, 2));
    for (int k = 0; k < p; ++k) w = w * half_i;
    return w * Scalar(factorial(p).inv());
}

inline Scalar strachan_weight(int p) {
    // p = 2s: (-1)^s / (2s+1)! · (1/2)^{2s}
    if (p % 2) return Scalar(0);
    const int s = p / 2;
    Rational w = factorial(p + 1).inv();
    for (int k = 0; k < p; ++k) w = w * Rational(1, 2);
    if (s % 2) w = -w;
    return Scalar(w);
}

}  // namespace detail

inline StarSeries moyal(const StarSeries& f, const StarSeries& g) {
    detail::DerivTable df(f), dg(g);
    return detail::bidiff_series(df, dg, f, g, detail::moyal_weight);
}

inline StarSeries operator*(const StarSeries& a, const StarSeries& b) { return moyal(a, b); }

/// f ⋄ g: commutative, non-associative.
inline StarSeries strachan(const StarSeries& f, const StarSeries& g) {
    detail::DerivTable df(f), dg(g);
    return detail::bidiff_series(df, dg, f, g, detail::strachan_weight);
}

inline StarSeries star_commutator(const StarSeries& f, const StarSeries& g) { return moyal(f, g) - moyal(g, f); }

/// g with f ★ g = 1 through θ^K: g_0 = 1/f_0 and g_n = -g_0 · [order n of f ★ (g_0 + … + g_{n-1} θ^{n-1})].
inline StarSeries star_inv(const StarSeries& f) {
    if (f[0].is_zero()) throw zero_leading_coefficient("star_inv: θ⁰ coefficient is zero");
    const ThetaConfig& cfg = f.config();
    StarSeries g(cfg);
    g[0] = f[0].inv();
    if (cfg.K == 0) return g;
    detail::DerivTable df(f);
    for (int n = 1; n <= cfg.K; ++n) {
        detail::DerivTable dg(g);
        StarSeries partial = detail::bidiff_series(df, dg, f, g, detail::moyal_weight);
        g[n] = -(g[0] * partial[n]);
    }
    return g;
}

/// Convenience for a θ-independent element.
inline StarSeries star_const(const ThetaConfig& cfg, ExpRational c0) { return StarSeries(cfg, std::move(c0)); }

/// e_★^{ξ} for a phase linear in the coordinates. All star powers of a fixed
/// linear phase are ordinary powers, so this is the ordinary exponential.
inline ExpPoly moyal_exp_linear(const Phase& xi) {
    if (!xi.constant().is_zero())
        throw nonlinear_phase("moyal_exp_linear: phase must be a linear form without constant");
    return ExpPoly::exp(xi);
}

/// Floating-point evaluator for a fixed series.
class CompiledStarSeries {
public:
    explicit CompiledStarSeries(const StarSeries& f) {
        for (const auto& c : f.orders()) orders_.emplace_back(c);
    }
    std::complex<double> eval(std::span<const double> point, double theta_num) const {
        std::complex<double> acc = 0.0;
        double tp = 1.0;
        for (const auto& c : orders_) {
            if (tp != 0.0) acc += c.eval(point) * tp;
            tp *= theta_num;
        }
        return acc;
    }
    std::complex<double> eval_order(std::span<const double> point, int n) const { return orders_.at(n).eval(point); }
    int K() const { return static_cast<int>(orders_.size()) - 1; }

private:
    std::vector<CompiledExpRational> orders_;
};

inline std::complex<double> eval_numeric(const StarSeries& f, std::span<const double> point, double theta_num) {
    return f.eval(point, theta_num);
}

template <>
struct RingOps<StarSeries> {
    using context_type = ThetaConfig;
    static context_type context_of(const StarSeries& s) { return s.config(); }
    static StarSeries zero(const context_type& c) { return StarSeries(c); }
    static StarSeries one(const context_type& c) { return StarSeries(c, ExpRational(1)); }
    static bool is_zero(const StarSeries& s) { return s.is_zero(); }
    static bool is_one(const StarSeries& s) { return s.is_one(); }
    static StarSeries d_x(const StarSeries& s) { return s.diff(0); }
    static StarSeries scale(const StarSeries& s, const Scalar& c) { return s.scaled(c); }
    static StarSeries inverse(const StarSeries& s) {
        try {
            return star_inv(s);
        } catch (const zero_leading_coefficient& e) {
            throw not_invertible(e.what());
        } catch (const division_by_zero& e) {
            throw not_invertible(e.what());
        }
    }
};

}  // namespace ncint
