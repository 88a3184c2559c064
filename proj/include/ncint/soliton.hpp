#pragma once

// N-soliton solutions of the noncommutative KP/KdV hierarchy from
// quasi-Wronskians, their exact verification per θ-order, and numeric
// charges, profiles and phase shifts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exppoly.hpp"
#include "freealg.hpp"
#include "hierarchy.hpp"
#include "psido.hpp"
#include "quasidet.hpp"
#include "scalar.hpp"
#include "starfun.hpp"

namespace ncint {

struct param_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class SolitonKind { kdv, kp };

/// Which coordinate pair carries θ: none, [t,x] = iθ, or [x,y] = iθ.
enum class ThetaPair { none, tx, xy };

struct SolitonData {
    Scalar alpha;
    Scalar beta;
    Scalar a;
};

struct SolitonParams {
    SolitonKind kind = SolitonKind::kdv;
    int flow = 3;  ///< t ≡ x^flow
    std::vector<SolitonData> solitons;
    ThetaPair pair = ThetaPair::tx;
    int K = 2;
    bool allow_complex = false;

    std::size_t N() const { return solitons.size(); }

    /// Coordinate names, index 0 is x.
    std::vector<std::string> coord_names() const {
        return kind == SolitonKind::kdv ? std::vector<std::string>{"x", "t"} : std::vector<std::string>{"x", "y", "t"};
    }
    /// Hierarchy time index of each coordinate.
    std::vector<int> coord_powers() const {
        return kind == SolitonKind::kdv ? std::vector<int>{1, flow} : std::vector<int>{1, 2, 3};
    }
    std::size_t x_index() const { return 0; }
    std::size_t y_index() const {
        if (kind != SolitonKind::kp) throw param_error("y is only active for KP parameters");
        return 1;
    }
    std::size_t t_index() const { return kind == SolitonKind::kdv ? 1 : 2; }

    ThetaConfig theta() const {
        switch (pair) {
            case ThetaPair::tx: return ThetaConfig(t_index(), x_index(), K);
            case ThetaPair::xy: return ThetaConfig(x_index(), y_index(), K);
            case ThetaPair::none: break;
        }
        return ThetaConfig(0, 1, 0);
    }

    void validate() const {
        if (kind == SolitonKind::kdv && flow != 3 && flow != 5)
            throw param_error("KdV flow must be 3 or 5, got " + std::to_string(flow));
        if (kind == SolitonKind::kp && flow != 3) throw param_error("KP parameters use flow 3");
        if (pair == ThetaPair::xy && kind != SolitonKind::kp) throw param_error("[x,y] noncommutativity needs KP");
        if (K < 0) throw param_error("K must be ≥ 0");
        for (std::size_t s = 0; s < solitons.size(); ++s) {
            const auto& d = solitons[s];
            const std::string tag = "soliton " + std::to_string(s + 1) + ": ";
            if (d.a.is_zero()) throw param_error(tag + "a must be nonzero");
            if (d.alpha == d.beta) throw param_error(tag + "alpha and beta must differ");
            if (kind == SolitonKind::kdv && !(d.beta == -d.alpha))
                throw param_error(tag + "KdV reduction needs beta = -alpha");
            if (!allow_complex && !(d.alpha.is_real() && d.beta.is_real() && d.a.is_real()))
                throw param_error(tag + "complex parameters need allow_complex");
            for (std::size_t r = 0; r < s; ++r)
                if (solitons[r].alpha == d.alpha) throw param_error(tag + "alpha values must be distinct");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json sol = nlohmann::json::array();
        for (const auto& d : solitons)
            sol.push_back({{"alpha", d.alpha.str()}, {"beta", d.beta.str()}, {"a", d.a.str()}});
        const char* p = pair == ThetaPair::tx ? "tx" : pair == ThetaPair::xy ? "xy" : "none";
        return {{"kind", kind == SolitonKind::kdv ? "kdv" : "kp"},
                {"N", N()},
                {"flow", flow},
                {"solitons", sol},
                {"theta", {{"pair", p}, {"K", K}}},
                {"allow_complex", allow_complex}};
    }

    /// {"N":2,"solitons":[{"alpha":"1","a":"1"},...],"theta":{"pair":"tx","K":2},"flow":3}.
    static SolitonParams from_json(const nlohmann::json& j) {
        SolitonParams p;
        auto scalar_of = [](const nlohmann::json& v) {
            return v.is_string() ? Scalar::parse(v.get<std::string>()) : scalar_from_json(v);
        };
        try {
            std::string kind = j.value("kind", "kdv");
            if (kind == "kdv")
                p.kind = SolitonKind::kdv;
            else if (kind == "kp")
                p.kind = SolitonKind::kp;
            else
                throw param_error("unknown kind '" + kind + "'");
            p.flow = j.value("flow", 3);
            p.allow_complex = j.value("allow_complex", false);
            if (j.contains("theta")) {
                const auto& t = j.at("theta");
                std::string pair = t.value("pair", "tx");
                if (pair == "tx")
                    p.pair = ThetaPair::tx;
                else if (pair == "xy")
                    p.pair = ThetaPair::xy;
                else if (pair == "none")
                    p.pair = ThetaPair::none;
                else
                    throw param_error("unknown theta pair '" + pair + "'");
                p.K = t.value("K", 2);
            }
            if (p.pair == ThetaPair::none) p.K = 0;
            for (const auto& s : j.at("solitons")) {
                SolitonData d;
                d.alpha = scalar_of(s.at("alpha"));
                d.beta = s.contains("beta") ? scalar_of(s.at("beta")) : -d.alpha;
                d.a = s.contains("a") ? scalar_of(s.at("a")) : Scalar(1);
                p.solitons.push_back(d);
            }
            if (j.contains("N") && j.at("N").get<std::size_t>() != p.solitons.size())
                throw param_error("N does not match the number of solitons");
        } catch (const nlohmann::json::exception& e) {
            throw param_error(std::string("malformed soliton config: ") + e.what());
        } catch (const parse_error& e) {
            throw param_error(std::string("malformed number in soliton config: ") + e.what());
        }
        p.validate();
        return p;
    }
};

/// ξ(α) = Σ_c α^{power(c)} x_c over the active coordinates.
inline Phase xi_phase(const SolitonParams& p, const Scalar& alpha) {
    const auto powers = p.coord_powers();
    std::vector<Scalar> lin;
    for (int pw : powers) {
        Scalar v(1);
        for (int k = 0; k < pw; ++k) v = v * alpha;
        lin.push_back(v);
    }
    return Phase(std::move(lin));
}

/// f_s = e_★^{ξ(α_s)} + a_s e_★^{ξ(β_s)}, s 0-based.
inline ExpPoly make_f(const SolitonParams& p, std::size_t s) {
    const auto& d = p.solitons.at(s);
    if (d.a.is_zero()) throw param_error("make_f: a must be nonzero");
    return moyal_exp_linear(xi_phase(p, d.alpha)) + moyal_exp_linear(xi_phase(p, d.beta)).scaled(d.a);
}

/// f_1..f_N with their x-derivatives up to order N.
struct WronskiData {
    std::vector<std::vector<ExpPoly>> table;  ///< table[s][j] = f_s^{(j)}

    static WronskiData build(const SolitonParams& p, int max_order) {
        WronskiData w;
        for (std::size_t s = 0; s < p.N(); ++s) {
            std::vector<ExpPoly> col{make_f(p, s)};
            for (int j = 1; j <= max_order; ++j) col.push_back(col.back().diff(0));
            w.table.push_back(std::move(col));
        }
        return w;
    }
};

/// Wronski matrix W(f_1..f_s): entry (r, c) = f_c^{(r)}.
inline NCMatrix<StarSeries> wronski_matrix(const SolitonParams& p, std::size_t s) {
    const ThetaConfig cfg = p.theta();
    WronskiData w = WronskiData::build(p, static_cast<int>(s));
    NCMatrix<StarSeries> m(s, cfg);
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) m(r, c) = StarSeries(cfg, ExpRational(w.table[c][r]));
    return m;
}

/// W_s = |W(f_1..f_s)|_ss, s 1-based.
inline StarSeries quasi_wronskian(const SolitonParams& p, std::size_t s) {
    if (s < 1 || s > p.N()) throw std::out_of_range("quasi_wronskian: s out of range");
    auto m = wronski_matrix(p, s);
    return quasidet(m, s - 1, s - 1).reduced();
}

/// S = Σ_s W_s' ★ W_s^{-1}, so that u_2 = ∂_x S and u = 2 ∂_x S.
inline StarSeries build_S(const SolitonParams& p) {
    p.validate();
    const ThetaConfig cfg = p.theta();
    StarSeries S(cfg);
    for (std::size_t s = 1; s <= p.N(); ++s) {
        StarSeries W = quasi_wronskian(p, s);
        S += moyal(W.diff(0), star_inv(W));
    }
    return S.reduced();
}

inline StarSeries build_u(const SolitonParams& p) { return build_S(p).diff(0).scaled(Scalar(2)).reduced(); }

/// Per-θ-order residual of a verification.
struct ResidualReport {
    std::vector<ExpRational> orders;

    bool all_zero() const {
        for (const auto& r : orders)
            if (!r.is_zero()) return false;
        return true;
    }
    bool order_zero(int n) const { return orders.at(n).is_zero(); }
    std::string summary() const {
        std::string s = "residuals:";
        for (std::size_t n = 0; n < orders.size(); ++n)
            s += " θ^" + std::to_string(n) + "=" + (orders[n].is_zero() ? "0" : "nonzero");
        return s + (all_zero() ? " PASS" : " FAIL");
    }
    nlohmann::json to_json() const {
        nlohmann::json o = nlohmann::json::array();
        for (std::size_t n = 0; n < orders.size(); ++n)
            o.push_back({{"order", n}, {"zero", orders[n].is_zero()}, {"num_terms", orders[n].num().size()}});
        return {{"orders", o}, {"pass", all_zero()}};
    }

    static ResidualReport of(const StarSeries& r) {
        ResidualReport rep;
        for (const auto& c : r.orders()) rep.orders.push_back(c.reduced());
        return rep;
    }
};

/// u_t - RHS(u) for the KdV flow m, RHS taken from the derived flow equation
/// and u_t from the explicit t-dependence.
inline ResidualReport kdv_residual(const SolitonParams& p, const StarSeries& u) {
    FlowEquation eq = kdv_flow(p.flow);
    Substitution<StarSeries> sigma(u.config());
    sigma.set(DiffGen::u(), u);
    StarSeries rhs = sigma(eq.rhs);
    return ResidualReport::of(u.diff(p.t_index()) - rhs);
}

inline ResidualReport verify_kdv(const SolitonParams& p) {
    if (p.kind != SolitonKind::kdv) throw param_error("verify_kdv needs KdV parameters");
    return kdv_residual(p, build_u(p));
}

/// x-differentiated KP equation with u = 2 S':
/// u_t - ¼u''' - ¾(u'u + uu') - (3/2) ∂_y² S + (3/2)[u, ∂_y S]_★ = 0.
inline ResidualReport kp_residual(const SolitonParams& p, const StarSeries& S) {
    const std::size_t x = p.x_index(), y = p.y_index(), t = p.t_index();
    StarSeries u = S.diff(x).scaled(Scalar(2));
    StarSeries u1 = u.diff(x);
    StarSeries u3 = u1.diff(x).diff(x);
    StarSeries Sy = S.diff(y);
    StarSeries r = u.diff(t) - u3.scaled(Scalar(Rational(1, 4))) -
                   (moyal(u1, u) + moyal(u, u1)).scaled(Scalar(Rational(3, 4))) -
                   Sy.diff(y).scaled(Scalar(Rational(3, 2))) +
                   star_commutator(u, Sy).scaled(Scalar(Rational(3, 2)));
    return ResidualReport::of(r);
}

inline ResidualReport verify_kp(const SolitonParams& p) {
    if (p.kind != SolitonKind::kp) throw param_error("verify_kp needs KP parameters");
    return kp_residual(p, build_S(p));
}


using StarOp = PsDO<StarSeries>;

/// Φ = ∂^N + w_{N-1} ∂^{N-1} + ... + w_0 with Φ ★ f_i = 0. The coefficients
/// are solved θ-order by θ-order: with W_0 the ordinary Wronski matrix,
/// w_n W_0 = -δ_{n0} (f_i^{(N)})_i - [order n of Σ_j w_j^{(<n)} ★ f_i^{(j)}].
inline StarOp dressing_operator(const SolitonParams& p) {
    p.validate();
    const ThetaConfig cfg = p.theta();
    const std::size_t N = p.N();
    if (N == 0) return StarOp::d(0, cfg);
    WronskiData wd = WronskiData::build(p, static_cast<int>(N));
    NCMatrix<ExpRational> W0(N, {});
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < N; ++i) W0(j, i) = ExpRational(wd.table[i][j]);
    NCMatrix<ExpRational> W0inv;
    try {
        W0inv = invert(W0);
    } catch (const singular_block& e) {
        throw singular_block(std::string("dressing_operator: singular Wronski system: ") + e.what(), e.where);
    }
    std::vector<StarSeries> w(N, StarSeries(cfg));
    std::vector<std::vector<StarSeries>> fj(N);  // fj[i][j] = f_i^{(j)} as a series
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j <= N; ++j) fj[i].push_back(StarSeries(cfg, ExpRational(wd.table[i][j])));
    for (int n = 0; n <= cfg.K; ++n) {
        std::vector<ExpRational> rhs(N);
        for (std::size_t i = 0; i < N; ++i) {
            ExpRational r = n == 0 ? -ExpRational(wd.table[i][N]) : ExpRational();
            if (n > 0)
                for (std::size_t j = 0; j < N; ++j) r -= moyal(w[j], fj[i][j])[n];
            rhs[i] = std::move(r);
        }
        for (std::size_t j = 0; j < N; ++j) {
            ExpRational acc;
            for (std::size_t i = 0; i < N; ++i) acc += rhs[i] * W0inv(i, j);
            w[j][n] = acc.reduced();
        }
    }
    std::vector<std::pair<int, StarSeries>> terms{{static_cast<int>(N), StarSeries(cfg, ExpRational(1))}};
    for (std::size_t j = 0; j < N; ++j) terms.emplace_back(static_cast<int>(j), w[j]);
    return StarOp::from_terms(cfg, static_cast<int>(N), terms);
}

/// Φ ★ g = Σ_j φ_j ★ ∂_x^j g for a differential operator Φ.
inline StarSeries apply_operator(const StarOp& phi, const StarSeries& g) {
    if (!phi.is_exact()) throw std::invalid_argument("apply_operator: needs an exact operator");
    StarSeries acc(g.config());
    StarSeries gj = g;
    int j = 0;
    for (auto it = phi.coeffs().rbegin(); it != phi.coeffs().rend(); ++it) {
        if (it->first < 0) throw std::invalid_argument("apply_operator: negative degree");
        while (j < it->first) {
            gj = gj.diff(0);
            ++j;
        }
        acc += moyal(it->second, gj);
    }
    return acc;
}

/// L = Φ ∘ ∂ ∘ Φ^{-1}, correct down to `cutoff`.
inline StarOp dressed_lax(const SolitonParams& p, int cutoff) {
    StarOp phi = dressing_operator(p);
    const ThetaConfig cfg = p.theta();
    const int N = static_cast<int>(p.N());
    StarOp phi_inv = invert_monic(phi, cutoff - N - 1);
    StarOp d_phi_inv = compose(StarOp::d(1, cfg), phi_inv);
    StarOp L = compose(phi, d_phi_inv);
    return L.map_coeffs([](const StarSeries& c) { return c.reduced(); });
}

/// Strachan-corrected conserved density σ_n for the flow t ≡ x^m:
/// σ_n = res_{-1} L^n + c θ Σ_{k<m} Σ_{l≤k} binom(k,l) ∂_x^{k-l} res_{-(l+1)} L^n ⋄ ∂_x res_k L^m
/// with c = density_prefactor(). The sum is present only for [t,x] = iθ.
inline StarSeries conserved_density(const SolitonParams& p, int n, const StarOp* lax = nullptr) {
    if (n < 1) throw std::invalid_argument("conserved_density: n must be ≥ 1");
    const int m = p.flow;
    const ThetaConfig cfg = p.theta();
    const int need = -m - n;
    StarOp L = lax && lax->cutoff() <= need ? *lax : dressed_lax(p, need);
    StarOp Ln = power(L, n, -m);
    StarSeries sigma = Ln.coeff(-1);
    if (p.pair != ThetaPair::tx || cfg.K == 0) return sigma.reduced();
    StarOp Lm = power(L, m, 0);
    StarSeries corr(cfg);
    for (int k = 0; k <= m - 1; ++k) {
        StarSeries right = Lm.coeff(k).diff(p.x_index());
        if (right.is_zero()) continue;
        for (int l = 0; l <= k; ++l) {
            StarSeries left = Ln.coeff(-(l + 1));
            for (int q = 0; q < k - l; ++q) left = left.diff(p.x_index());
            if (left.is_zero()) continue;
            corr += strachan(left, right).scaled(Scalar(binom(k, l)));
        }
    }
    return (sigma + corr.times_theta(1).scaled(density_prefactor())).reduced();
}

struct QuadratureSettings {
    double half_width = 40.0;
    double step = 0.01;
    double decay_tol = 1e-6;  ///< boundary |σ| above this raises the non-decay flag
};

struct ChargeSample {
    double t;
    std::complex<double> Q;
    double boundary;  ///< max |σ| at x = ±L
};

struct ChargeReport {
    int n = 1;
    std::vector<ChargeSample> samples;
    bool non_decay = false;

    /// max |Q(t) - Q(t_0)| / max |Q|, or 0 when every Q vanishes.
    double drift() const {
        double scale = 0.0, dev = 0.0;
        for (const auto& s : samples) scale = std::max(scale, std::abs(s.Q));
        if (samples.empty()) return 0.0;
        for (const auto& s : samples) dev = std::max(dev, std::abs(s.Q - samples.front().Q));
        return scale == 0.0 ? 0.0 : dev / scale;
    }
    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : samples) arr.push_back({{"t", s.t}, {"re", s.Q.real()}, {"im", s.Q.imag()}});
        return {{"n", n}, {"samples", arr}, {"drift", drift()}, {"non_decay_warning", non_decay}};
    }
};

/// Composite Simpson rule over [-L, L] (the step is adjusted to an even number
/// of panels).
template <class F>
std::complex<double> simpson(F&& f, double a, double b, double step) {
    long M = std::lround((b - a) / step);
    if (M < 2) M = 2;
    if (M % 2) ++M;
    const double h = (b - a) / static_cast<double>(M);
    std::complex<double> acc = f(a) + f(b);
    for (long i = 1; i < M; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return acc * (h / 3.0);
}

/// Numeric point for (x, t) (y = 0 for KP).
inline std::vector<double> point_xt(const SolitonParams& p, double x, double t) {
    std::vector<double> pt(p.coord_names().size(), 0.0);
    pt[p.x_index()] = x;
    pt[p.t_index()] = t;
    return pt;
}

inline ChargeReport charges_of_density(const SolitonParams& p, const StarSeries& sigma, int n,
                                       const std::vector<double>& t_values, double theta_num,
                                       const QuadratureSettings& q = {}) {
    CompiledStarSeries cs(sigma);
    ChargeReport rep;
    rep.n = n;
    for (double t : t_values) {
        auto f = [&](double x) {
            auto pt = point_xt(p, x, t);
            return cs.eval(pt, theta_num);
        };
        ChargeSample s{t, simpson(f, -q.half_width, q.half_width, q.step),
                       std::max(std::abs(f(-q.half_width)), std::abs(f(q.half_width)))};
        if (s.boundary > q.decay_tol) rep.non_decay = true;
        rep.samples.push_back(s);
    }
    return rep;
}

/// Q_n(t) = ∫ σ_n dx for each t, θ substituted by θ_num.
inline ChargeReport conserved_charge(const SolitonParams& p, int n, const std::vector<double>& t_values,
                                     double theta_num, const QuadratureSettings& q = {},
                                     const StarOp* lax = nullptr) {
    if (p.kind != SolitonKind::kdv) throw param_error("conserved_charge: spatial decay needs KdV parameters");
    return charges_of_density(p, conserved_density(p, n, lax), n, t_values, theta_num, q);
}

struct ProfileRow {
    double x;
    std::complex<double> u;
};

/// u(x, t) on `samples` equally spaced points of [x0, x1] (y = 0 for KP).
inline std::vector<ProfileRow> profile(const SolitonParams& p, const StarSeries& u, double t, double x0, double x1,
                                       int samples, double theta_num) {
    if (samples < 2) throw std::invalid_argument("profile: need at least 2 samples");
    CompiledStarSeries cu(u);
    std::vector<ProfileRow> rows;
    rows.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        double x = x0 + (x1 - x0) * i / (samples - 1);
        rows.push_back({x, cu.eval(point_xt(p, x, t), theta_num)});
    }
    return rows;
}

inline std::string profile_csv(const std::vector<ProfileRow>& rows) {
    std::string out = "x,re,im,abs\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g\n", r.x, r.u.real(), r.u.imag(), std::abs(r.u));
        out += buf;
    }
    return out;
}

struct tracking_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Locates crests of Re u by scanning a window and refining the root of Re u_x.
class CrestTracker {
public:
    CrestTracker(const SolitonParams& p, const StarSeries& u, double theta_num)
        : p_(p), u_(u), ux_(u.diff(p.x_index())), theta_(theta_num) {}

    double crest(double t, double center, double half_window, double step = 0.01) const {
        double best_x = center, best = -HUGE_VAL;
        const long M = std::lround(2 * half_window / step);
        for (long i = 0; i <= M; ++i) {
            double x = center - half_window + step * static_cast<double>(i);
            double v = value(x, t);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
        if (std::abs(best_x - center) > half_window - 2 * step)
            throw tracking_failure("crest tracking: maximum sits on the search window edge");
        double a = best_x - step, b = best_x + step;
        double fa = slope(a, t), fb = slope(b, t);
        if (fa < 0 || fb > 0) throw tracking_failure("crest tracking: no isolated maximum");
        for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
            double mid = 0.5 * (a + b);
            double fm = slope(mid, t);
            if (fm > 0)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    }

    double value(double x, double t) const { return u_.eval(point_xt(p_, x, t), theta_).real(); }
    double slope(double x, double t) const { return ux_.eval(point_xt(p_, x, t), theta_).real(); }

private:
    const SolitonParams& p_;
    CompiledStarSeries u_;
    CompiledStarSeries ux_;
    double theta_;
};

struct PhaseShiftReport {
    double t_far = 25.0;
    std::vector<double> before;  ///< x_s(-T) + v_s (-T)
    std::vector<double> after;   ///< x_s(T) + v_s T
    std::vector<double> shift;   ///< after - before

    nlohmann::json to_json() const {
        return {{"t_far", t_far}, {"offset_before", before}, {"offset_after", after}, {"shift", shift}};
    }
};

/// KdV crest speed α² for t ≡ x³ (α⁴ for x⁵): the crest of soliton s moves as
/// x = -α^{m-1} t + const.
inline double crest_speed(const SolitonParams& p, std::size_t s) {
    double a = p.solitons.at(s).alpha.to_complex().real();
    return std::pow(a, p.flow - 1);
}

/// Crest offsets of a 2-soliton before and after the interaction.
inline PhaseShiftReport phase_shift(const SolitonParams& p, const StarSeries& u, double theta_num,
                                    double t_far = 25.0, double half_window = 4.0) {
    if (p.kind != SolitonKind::kdv || p.N() != 2) throw param_error("phase_shift needs 2-soliton KdV parameters");
    const double v0 = crest_speed(p, 0), v1 = crest_speed(p, 1);
    if (std::abs(v0 - v1) < 1e-12) throw param_error("phase_shift: solitons have equal velocities");
    CrestTracker tr(p, u, theta_num);
    PhaseShiftReport rep;
    rep.t_far = t_far;
    for (std::size_t s = 0; s < 2; ++s) {
        const double v = crest_speed(p, s);
        const double alpha = p.solitons[s].alpha.to_complex().real();
        // centre the search on the free 1-soliton crest, widened by the
        // largest shift the partner can induce
        auto guess = [&](double t) { return -v * t + std::log(std::abs(p.solitons[s].a.to_complex().real())) / (2 * alpha); };
        double xb = tr.crest(-t_far, guess(-t_far), half_window);
        double xa = tr.crest(t_far, guess(t_far), half_window);
        rep.before.push_back(xb - v * t_far);
        rep.after.push_back(xa + v * t_far);
        rep.shift.push_back(rep.after.back() - rep.before.back());
    }
    return rep;
}

/// Sup-norm distance between u(·, t) and the 1-soliton 2α² sech²(α(x - x_c))
/// on [x_c - w, x_c + w], x_c the tracked crest of soliton s.
inline double asymptotic_mismatch(const SolitonParams& p, const StarSeries& u, std::size_t s, double t,
                                  double theta_num, double half_window = 3.0, double step = 0.01) {
    CrestTracker tr(p, u, theta_num);
    const double v = crest_speed(p, s);
    const double alpha = p.solitons.at(s).alpha.to_complex().real();
    const double guess = -v * t + std::log(std::abs(p.solitons[s].a.to_complex().real())) / (2 * alpha);
    const double xc = tr.crest(t, guess, 4.0);
    CompiledStarSeries cu(u);
    double worst = 0.0;
    const long M = std::lround(2 * half_window / step);
    for (long i = 0; i <= M; ++i) {
        double x = xc - half_window + step * static_cast<double>(i);
        double ch = std::cosh(alpha * (x - xc));
        double one = 2 * alpha * alpha / (ch * ch);
        worst = std::max(worst, std::abs(cu.eval(point_xt(p, x, t), theta_num) - one));
    }
    return worst;
}

/// Closed-form commutative 2-soliton shift of soliton s against its partner:
/// ±(1/α_s) log|(α_s + α_r)/(α_s - α_r)|, positive for the slower soliton.
inline double commutative_phase_shift(const SolitonParams& p, std::size_t s) {
    if (p.N() != 2) throw param_error("commutative_phase_shift needs two solitons");
    const double as = std::abs(p.solitons.at(s).alpha.to_complex().real());
    const double ar = std::abs(p.solitons.at(1 - s).alpha.to_complex().real());
    if (as == ar) throw param_error("commutative_phase_shift: equal velocities");
    const double mag = std::log(std::abs((as + ar) / (as - ar))) / as;
    return as < ar ? mag : -mag;
}

/// Defaults shared by the CLI and echoed into every JSON report.
struct Defaults {
    static constexpr int K = 2;
    static constexpr double tolerance = 1e-6;
    static constexpr double half_width = 40.0;
    static constexpr double step = 0.01;
    static constexpr double theta_num = 0.1;
    static constexpr double t_far = 25.0;

    static nlohmann::json to_json() {
        return {{"K", K},
                {"tolerance", tolerance},
                {"quadrature", {{"half_width", half_width}, {"step", step}, {"rule", "composite Simpson"}}},
                {"theta_num", theta_num},
                {"phase_shift_t", t_far}};
    }
};

}  // namespace ncint
