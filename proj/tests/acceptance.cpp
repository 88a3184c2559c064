// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when a criterion outside kWaived fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <ncint/asdym.hpp>
#include <ncint/hierarchy.hpp>
#include <ncint/psido.hpp>
#include <ncint/quasidet.hpp>
#include <ncint/soliton.hpp>
#include <ncint/starfun.hpp>

#include "flow_oracles.hpp"
#include "support.hpp"

using namespace ncint;
using nlohmann::json;
namespace ts = testing_support;

namespace {

constexpr double kDriftTol = 1e-6;
constexpr double kCommutativeChargeTol = 1e-8;
constexpr double kThetaNum = 0.1;
constexpr double kHalfWidth = 40.0;
constexpr double kStep = 0.01;
constexpr double kProfileTol = 1e-3;
constexpr double kShiftTol = 1e-6;
constexpr double kDeformedShiftTol = 1e-3;
constexpr double kFarTime = 25.0;
constexpr double kWindowHalf = 3.0;  // 6-unit window
const std::vector<double> kTimes{-5, -2, 0, 2, 5};

// Criterion 7 cannot hold as worded: with the given gauge fields the
// evolution equation sits in F_wz and F_zz~ - F_ww~ vanishes identically.
const std::set<int> kWaived{7};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += "[fail] " + what + "; ";
        }
    }
    void note(const std::string& s) { detail += s + "; "; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SolitonParams kdv(const std::vector<std::pair<std::string, std::string>>& alpha_a, int flow = 3, int K = 2) {
    json sol = json::array();
    for (const auto& [al, a] : alpha_a) sol.push_back({{"alpha", al}, {"a", a}});
    return SolitonParams::from_json({{"kind", "kdv"}, {"flow", flow}, {"solitons", sol}, {"theta", {{"pair", "tx"}, {"K", K}}}});
}

SolitonParams kp(const std::vector<std::array<std::string, 3>>& abA, const std::string& pair) {
    json sol = json::array();
    for (const auto& s : abA) sol.push_back({{"alpha", s[0]}, {"beta", s[1]}, {"a", s[2]}});
    return SolitonParams::from_json({{"kind", "kp"}, {"solitons", sol}, {"theta", {{"pair", pair}, {"K", 2}}}});
}

// ---------------------------------------------------------------- 1

Outcome hierarchy() {
    Outcome o;
    auto want = flow_oracles::kp();
    int n = 0;
    auto check = [&](int m, int kmax) {
        for (const auto& e : kp_flow(m, kmax)) {
            auto it = want.find({m, e.k});
            if (it == want.end()) continue;
            o.require(e.rhs == it->second, "d" + std::to_string(m) + " u" + std::to_string(e.k) + ": " + e.rhs.str());
            ++n;
        }
    };
    check(1, 5);
    check(2, 4);
    check(3, 3);
    o.require(kdv_flow(3).rhs == flow_oracles::nckdv(), "ncKdV: " + kdv_flow(3).rhs.str());
    o.require(kdv_flow(5).rhs == flow_oracles::nckdv5(), "5th ncKdV: " + kdv_flow(5).rhs.str());
    o.note(std::to_string(n + 2) + " equations compared");
    return o;
}

// ---------------------------------------------------------------- 2

Outcome quasideterminants() {
    Outcome o;
    std::mt19937_64 rng(2024);
    const ThetaConfig cfg(0, 1, 2);
    int star_trials = 0, redraws = 0, deformed = 0;
    while (star_trials < 102) {
        const std::size_t n = 2 + star_trials % 3;
        std::vector<StarSeries> s;
        for (auto& p : ts::rand_linear_entries(rng, n)) s.emplace_back(cfg, ExpRational(p));
        NCMatrix<StarSeries> A(n, s, cfg);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t i = pick(rng), j = pick(rng);
        StarSeries q;
        try {
            q = quasidet(A, i, j);
        } catch (const singular_block&) {
            ++redraws;
            continue;
        }
        StarSeries r = quasidet_via_inverse(A, i, j);
        bool same = true;
        for (int k = 0; k <= cfg.K; ++k) same = same && (q[k] - r[k]).is_zero();
        o.require(same, "star trial " + std::to_string(star_trials));
        if (!q[1].is_zero() || !q[2].is_zero()) ++deformed;
        ++star_trials;
    }
    int rat_trials = 0;
    while (rat_trials < 100) {
        const std::size_t n = 1 + rat_trials % 5;
        std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(n));
        for (auto& row : a)
            for (auto& e : row) e = ts::rand_scalar(rng);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t i = pick(rng), j = pick(rng);
        Scalar minor = n == 1 ? Scalar(1) : ts::permutation_det(ts::drop(a, i, j));
        if (minor.is_zero()) continue;
        Scalar want = ts::permutation_det(a) * minor.inv();
        if ((i + j) % 2) want = -want;
        NCMatrix<Scalar> A(n, {});
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) A(r, c) = a[r][c];
        Scalar got;
        try {
            got = quasidet(A, i, j);
        } catch (const singular_block&) {
            continue;
        }
        o.require(got == want, "rational trial " + std::to_string(rat_trials));
        ++rat_trials;
    }
    o.note(std::to_string(star_trials) + " star-matrix trials (" + std::to_string(deformed) +
           " with θ-dependent result, " + std::to_string(redraws) + " redrawn for singular minors)");
    o.note(std::to_string(rat_trials) + " rational trials vs permutation determinant");
    return o;
}

// ---------------------------------------------------------------- 3

Outcome solitons() {
    Outcome o;
    struct Case {
        std::string name;
        SolitonParams p;
    };
    std::vector<Case> kdv_cases{
        {"N=1 m=3", kdv({{"1/2", "1"}})},
        {"N=2 m=3", kdv({{"1/2", "1"}, {"1", "-1"}})},
        {"N=3 m=3", kdv({{"1/2", "1"}, {"1", "-1"}, {"3/2", "1"}})},
        {"N=1 m=5", kdv({{"1", "1"}}, 5)},
        {"N=2 m=5", kdv({{"1/2", "1"}, {"1", "-1"}}, 5)},
    };
    for (const auto& c : kdv_cases) {
        ResidualReport r = verify_kdv(c.p);
        o.require(r.all_zero() && r.orders.size() == 3, "KdV " + c.name + ": " + r.summary());
    }
    std::vector<Case> kp_cases{
        {"N=1 xy", kp({{{"1", "-1/2", "1"}}}, "xy")},
        {"N=1 tx", kp({{{"1", "-1/2", "1"}}}, "tx")},
        {"N=2 xy", kp({{{"1", "-1/2", "1"}, {"3/2", "-1", "-1"}}}, "xy")},
        {"N=2 tx", kp({{{"1", "-1/2", "1"}, {"3/2", "-1", "-1"}}}, "tx")},
    };
    for (const auto& c : kp_cases) {
        ResidualReport r = verify_kp(c.p);
        o.require(r.all_zero() && r.orders.size() == 3, "KP " + c.name + ": " + r.summary());
    }
    // negative controls: perturbed amplitude, wrong time flow, perturbed KP data
    SolitonParams p2 = kdv_cases[1].p;
    o.require(!kdv_residual(p2, build_u(p2).scaled(Scalar(Rational(3, 2)))).order_zero(0), "control: 3/2 u");
    // α = 1 would not do: its m=3 and m=5 speeds coincide
    o.require(!kdv_residual(kdv_cases[0].p, build_u(kdv({{"1/2", "1"}}, 5))).order_zero(0), "control: m=5 data in m=3");
    SolitonParams q = kp_cases[0].p;
    o.require(!kp_residual(q, build_S(q).scaled(Scalar(2))).order_zero(0), "control: KP 2S");
    o.note("9 exact residual checks, 3 negative controls");
    return o;
}

// ---------------------------------------------------------------- 4

Outcome one_soliton() {
    Outcome o;
    for (const auto& [al, a] : std::vector<std::pair<std::string, std::string>>{{"1/2", "1"}, {"1", "3"}, {"2", "-1"}})
        for (int K : {2, 3}) {
            StarSeries u = build_u(kdv({{al, a}}, 3, K));
            for (int k = 1; k <= K; ++k)
                o.require(u[k].is_zero(), "alpha=" + al + " K=" + std::to_string(K) + " order " + std::to_string(k));
        }
    o.note("θ^1..θ^K vanish for 3 parameter sets, K=2,3");
    return o;
}

// ---------------------------------------------------------------- 5

Outcome dressing() {
    Outcome o;
    for (const auto& p : {kdv({{"1/2", "1"}}), kdv({{"1/2", "1"}, {"1", "-1"}})}) {
        const std::string tag = "N=" + std::to_string(p.N()) + ": ";
        StarOp phi = dressing_operator(p);
        for (std::size_t s = 0; s < p.N(); ++s)
            o.require(apply_operator(phi, StarSeries(p.theta(), ExpRational(make_f(p, s)))).is_zero(),
                      tag + "Phi*f_" + std::to_string(s + 1));
        StarOp L = dressed_lax(p, -7);
        StarOp L2 = power(L, 2, -6);
        o.require(L2.coeff(2).is_one() && L2.coeff(1).is_zero(), tag + "L^2 leading part");
        o.require((L2.coeff(0) - build_u(p)).reduced().is_zero(), tag + "res_0 L^2 = u");
        for (int d = -1; d >= -6; --d) o.require(L2.coeff(d).reduced().is_zero(), tag + "(L^2) at " + std::to_string(d));
    }
    o.note("N=1,2 through ∂^-6 and θ^2");
    return o;
}

// ---------------------------------------------------------------- 6

double literal_prefactor_drift(const SolitonParams& p, const StarOp& L) {
    // σ with the θ^{xt} coefficient read literally (c = -1 instead of i)
    StarSeries sigma = conserved_density(p, 3, &L);
    StarSeries lead = power(L, 3, -3).coeff(-1).reduced();
    StarSeries corr = sigma - lead;
    StarSeries literal = (lead + corr.scaled(Scalar::i())).reduced();
    QuadratureSettings q{kHalfWidth, kStep, 1e-6};
    return charges_of_density(p, literal, 3, kTimes, kThetaNum, q).drift();
}

Outcome charges(double& literal_drift) {
    Outcome o;
    QuadratureSettings q{kHalfWidth, kStep, 1e-6};
    struct Case {
        SolitonParams p;
        std::vector<double> alpha, a;
    };
    std::vector<Case> cases{{kdv({{"1/2", "1"}}), {0.5}, {1.0}}, {kdv({{"1/2", "1"}, {"1", "-1"}}), {0.5, 1.0}, {1.0, -1.0}}};
    for (const auto& c : cases) {
        const std::string tag = "N=" + std::to_string(c.p.N());
        StarOp L = dressed_lax(c.p, -6);
        ts::KdvTauOracle tau(c.alpha, c.a);
        const double oracle_q[4] = {
            0,
            ts::trapezoid([&](double x) { return 0.5 * tau.u(x, 0.0); }, -kHalfWidth, kHalfWidth, kStep / 4),
            0,
            ts::trapezoid([&](double x) { double u = tau.u(x, 0.0); return 0.375 * u * u; }, -kHalfWidth, kHalfWidth,
                          kStep / 4)};
        o.require(std::abs(oracle_q[1] - tau.q1_closed()) < 1e-9 && std::abs(oracle_q[3] - tau.q3_closed()) < 1e-9,
                  tag + " τ oracle vs closed form");
        for (int n = 1; n <= 3; ++n) {
            StarSeries sigma = conserved_density(c.p, n, &L);
            ChargeReport rep = charges_of_density(c.p, sigma, n, kTimes, kThetaNum, q);
            ChargeReport flat = charges_of_density(c.p, sigma, n, {0.0}, 0.0, q);
            const double dev = std::abs(flat.samples[0].Q - std::complex<double>(oracle_q[n]));
            o.require(rep.drift() < kDriftTol, tag + " Q" + std::to_string(n) + " drift " + fmt("%.2e", rep.drift()));
            o.require(dev < kCommutativeChargeTol, tag + " Q" + std::to_string(n) + " θ=0 deviation " + fmt("%.2e", dev));
            o.require(!rep.non_decay, tag + " Q" + std::to_string(n) + " boundary decay");
            o.note(tag + " Q" + std::to_string(n) + "=" + fmt("%.10f", rep.samples[0].Q.real()) + " drift " +
                   fmt("%.1e", rep.drift()));
        }
        if (c.p.N() == 2) literal_drift = literal_prefactor_drift(c.p, L);
    }
    return o;
}

// ---------------------------------------------------------------- 7

Outcome asdym() {
    Outcome o;
    ReductionReport r = check_kdv_reduction();
    const NCPoly rhs = kdv_flow(3).rhs;
    const AsdymResiduals& res = r.residuals;
    // the criterion as worded
    o.require(res.F_wz.is_zero(), "F_wz is not zero: its (2,1) entry is " + res.F_wz(1, 0).str());
    o.require(res.F_wtzt.is_zero(), "F_w~z~ is not zero");
    o.require(r.single_unit && r.carrier == "F_zz~ - F_ww~",
              "F_zz~ - F_ww~ does not carry the evolution equation (it is identically zero)");
    // what does hold
    o.note(std::string("observed: carrier ") + r.carrier + " entry (" + std::to_string(r.row + 1) + "," +
           std::to_string(r.col + 1) + ") factor " + r.udot_coeff.str() + ", udot = ncKdV RHS: " +
           (r.evolution == rhs ? "yes" : "no") + ", all residuals vanish after substitution: " +
           (r.closes ? "yes" : "no"));
    o.require(r.reduced() && r.evolution == rhs, "reduction does not close on ncKdV");
    return o;
}

// ---------------------------------------------------------------- 8

Outcome invariants() {
    Outcome o;
    std::mt19937_64 rng(8);
    const ThetaConfig cfg(0, 1, 2);
    auto lift = [&](const ExpPoly& p) { return StarSeries(cfg, ExpRational(p)); };
    int assoc = 0, comm = 0;
    for (int t = 0; t < 200; ++t) {
        StarSeries f = lift(ts::rand_exppoly(rng)), g = lift(ts::rand_exppoly(rng)), h = lift(ts::rand_exppoly(rng));
        StarSeries d = (f * g) * h - f * (g * h);
        if (d.is_zero()) ++assoc;
        if ((strachan(f, g) - strachan(g, f)).is_zero()) ++comm;
    }
    o.require(assoc == 200, "Moyal associativity " + std::to_string(assoc) + "/200");
    o.require(comm == 200, "Strachan commutativity " + std::to_string(comm) + "/200");
    StarSeries x = lift(ExpPoly::coordinate(0)), y = lift(ExpPoly::coordinate(1));
    StarSeries c = star_commutator(x, y);
    o.require(c[0].is_zero() && c[1] == ExpRational(Scalar::i()) && c[2].is_zero(), "[x,y] = iθ");
    // stored witness: (x² ⋄ x²) ⋄ y² - x² ⋄ (x² ⋄ y²) = -2/3 x² θ²
    StarSeries x2 = lift(ExpPoly::coordinate(0) * ExpPoly::coordinate(0));
    StarSeries y2 = lift(ExpPoly::coordinate(1) * ExpPoly::coordinate(1));
    StarSeries w = strachan(strachan(x2, x2), y2) - strachan(x2, strachan(x2, y2));
    o.require(w[2] == ExpRational(ExpPoly::coordinate(0) * ExpPoly::coordinate(0) * Scalar(Rational(-2, 3))),
              "Strachan non-associativity witness");
    using Op = PsDO<NCPoly>;
    int ps_assoc = 0;
    for (int t = 0; t < 10; ++t) {
        auto rop = [&](int top, int low) {
            std::vector<std::pair<int, NCPoly>> terms;
            for (int d = top; d >= low; --d) terms.emplace_back(d, ts::rand_ncpoly(rng, 2));
            return Op::from_terms({}, top, terms);
        };
        Op a = rop(1, -1), b = rop(1, -2), e = rop(2, 0);
        Op l = compose(compose(a, b, -5), e, -3), r = compose(a, compose(b, e, -4), -3);
        if (agree_on_common_range(l.truncate(-3), r.truncate(-3))) ++ps_assoc;
    }
    o.require(ps_assoc == 10, "PsDO associativity " + std::to_string(ps_assoc) + "/10");
    Op one = compose(Op::d(1), invert_monic(Op::d(1), -12), -10);
    o.require(one.coeff(0).is_one() && one.vanishes_on(-10, -1), "∂∘∂^-1 = 1");
    o.note("200 Moyal/Strachan triples, 10 PsDO triples");
    return o;
}

// ---------------------------------------------------------------- 9

Outcome asymptotics() {
    Outcome o;
    SolitonParams p = kdv({{"1/2", "1"}, {"1", "-1"}});
    StarSeries u = build_u(p);
    ts::KdvTauOracle tau({0.5, 1.0}, {1.0, -1.0});
    double worst_tau = 0;
    for (double x = -10; x <= 10; x += 0.5)
        for (double t : {-3.0, 0.0, 3.0})
            worst_tau = std::max(worst_tau, std::abs(u.eval(point_xt(p, x, t), 0.0) - tau.u(x, t)));
    o.require(worst_tau < 1e-9, "θ=0 profile vs τ oracle " + fmt("%.1e", worst_tau));
    double worst = 0;
    for (double th : {0.0, kThetaNum})
        for (double t : {-kFarTime, kFarTime})
            for (std::size_t s = 0; s < 2; ++s)
                worst = std::max(worst, asymptotic_mismatch(p, u, s, t, th, kWindowHalf));
    o.require(worst < kProfileTol, "asymptotic sup-norm " + fmt("%.2e", worst));
    PhaseShiftReport flat = phase_shift(p, u, 0.0, kFarTime);
    PhaseShiftReport deformed = phase_shift(p, u, kThetaNum, kFarTime);
    for (std::size_t s = 0; s < 2; ++s) {
        const double e0 = std::abs(flat.shift[s] - tau.shift(s));
        const double e1 = std::abs(deformed.shift[s] - flat.shift[s]);
        o.require(e0 < kShiftTol, "shift " + std::to_string(s + 1) + " vs oracle " + fmt("%.1e", e0));
        o.require(e1 < kDeformedShiftTol, "shift " + std::to_string(s + 1) + " θ=0.1 vs θ=0 " + fmt("%.1e", e1));
        o.note("shift " + std::to_string(s + 1) + " = " + fmt("%.9f", flat.shift[s]) + " (oracle " +
               fmt("%.9f", tau.shift(s)) + ")");
    }
    o.note("asymptotic mismatch " + fmt("%.1e", worst));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    double literal_drift = -1;
    std::vector<Criterion> all{
        {1, "hierarchy fidelity", 10, hierarchy},
        {2, "quasideterminant correctness", 60, quasideterminants},
        {3, "soliton verification", 300, solitons},
        {4, "one-soliton commutative equivalence", 60, one_soliton},
        {5, "dressing consistency", 120, dressing},
        {6, "conservation", 120, [&] { return charges(literal_drift); }},
        {7, "ASDYM reduction", 5, asdym},
        {8, "algebraic invariants", 60, invariants},
        {9, "asymptotics and phase shift", 120, asymptotics},
    };
    bool ok = true;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail += std::string("[exception] ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) o.require(false, "runtime " + fmt("%.1f", secs) + " s over budget");
        const bool waived = kWaived.count(c.id) > 0;
        std::printf("criterion %d: %s  %s (%.1f s)%s\n    %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                    !o.pass && waived ? "  [known: not attainable as worded, see notes]" : "", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass && !waived) ok = false;
    }
    if (literal_drift >= 0)
        std::printf("info: Q3 drift for N=2 with the literal θ^xt prefactor: %.3e (vs < %.0e with prefactor i)\n",
                    literal_drift, kDriftTol);
    return ok ? 0 : 1;
}
