#pragma once

// Pseudo-differential operators  A = Σ a_r ∂^r  over a noncommutative
// differential coefficient ring. The lowest correct degree ("cutoff") is part
// of the value: coefficients below it are unknown rather than zero, and every
// operation computes the cutoff its result is provably correct down to.

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ring.hpp"
#include "scalar.hpp"

namespace ncint {

struct cutoff_violation : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct non_monic : std::domain_error {
    using std::domain_error::domain_error;
};

/// Cutoff value meaning "every degree is known" (finite, exact symbol).
inline constexpr int kExact = INT_MIN / 4;

template <CoefficientRing R>
class PsDO {
public:
    using Ops = RingOps<R>;
    using context_type = typename Ops::context_type;
    using CoeffMap = std::map<int, R, std::greater<>>;

    explicit PsDO(context_type ctx = {}) : ctx_(std::move(ctx)) {}

    /// ∂^n, exact.
    static PsDO d(int n, context_type ctx = {}) {
        PsDO p(ctx);
        p.top_ = n;
        p.coeffs_.emplace(n, Ops::one(p.ctx_));
        return p;
    }

    /// f ∂^deg, exact.
    static PsDO monomial(const R& f, int deg = 0) {
        PsDO p(Ops::context_of(f));
        p.top_ = deg;
        if (!Ops::is_zero(f)) p.coeffs_.emplace(deg, f);
        return p;
    }

    /// Build from (degree, coefficient) pairs; `cutoff` is the lowest degree
    /// the listed coefficients are claimed correct for.
    static PsDO from_terms(context_type ctx, int top, const std::vector<std::pair<int, R>>& terms,
                           int cutoff = kExact) {
        PsDO p(ctx);
        p.top_ = top;
        p.cutoff_ = cutoff;
        for (const auto& [deg, c] : terms) {
            if (deg > top) throw std::invalid_argument("PsDO: coefficient above declared order");
            if (deg < cutoff) continue;
            p.add_to(deg, c);
        }
        return p;
    }

    const context_type& context() const { return ctx_; }
    int top() const { return top_; }
    int cutoff() const { return cutoff_; }
    bool is_exact() const { return cutoff_ == kExact; }
    const CoeffMap& coeffs() const { return coeffs_; }

    /// Lowest degree with a stored (nonzero) coefficient.
    std::optional<int> lowest_stored() const {
        if (coeffs_.empty()) return std::nullopt;
        return coeffs_.rbegin()->first;
    }

    R coeff(int deg) const {
        if (deg < cutoff_)
            throw cutoff_violation("PsDO: degree " + std::to_string(deg) + " is below the tracked cutoff " +
                                   std::to_string(cutoff_));
        auto it = coeffs_.find(deg);
        return it == coeffs_.end() ? Ops::zero(ctx_) : it->second;
    }
    R res(int deg = -1) const { return coeff(deg); }

    bool is_monic() const { return Ops::is_one(coeff(top_)); }

    /// Coefficients ≥ r. Needs every degree ≥ r to be known.
    PsDO project_geq(int r) const {
        if (r < cutoff_) throw cutoff_violation("project_geq: requested degree below cutoff");
        PsDO p(ctx_);
        p.top_ = top_;
        for (const auto& [deg, c] : coeffs_)
            if (deg >= r) p.coeffs_.emplace(deg, c);
        return p;
    }

    /// Coefficients ≤ r (the cutoff is inherited).
    PsDO project_leq(int r) const {
        if (r < cutoff_) throw cutoff_violation("project_leq: requested degree below cutoff");
        PsDO p(ctx_);
        p.top_ = std::min(top_, r);
        p.cutoff_ = cutoff_;
        for (const auto& [deg, c] : coeffs_)
            if (deg <= r) p.coeffs_.emplace(deg, c);
        return p;
    }

    /// Forget degrees below `c` (raises the cutoff).
    PsDO truncate(int c) const {
        PsDO p = *this;
        if (c <= p.cutoff_) return p;
        p.cutoff_ = c;
        for (auto it = p.coeffs_.begin(); it != p.coeffs_.end();)
            it = it->first < c ? p.coeffs_.erase(it) : std::next(it);
        return p;
    }

    /// True when every known coefficient in [from, to] is zero.
    bool vanishes_on(int from, int to) const {
        for (int d = std::max(from, cutoff_); d <= to; ++d)
            if (!Ops::is_zero(coeff(d))) return false;
        return true;
    }

    PsDO& operator+=(const PsDO& o) {
        cutoff_ = std::max(cutoff_, o.cutoff_);
        top_ = std::max(top_, o.top_);
        for (const auto& [deg, c] : o.coeffs_) add_to(deg, c);
        drop_below_cutoff();
        return *this;
    }
    PsDO& operator-=(const PsDO& o) {
        cutoff_ = std::max(cutoff_, o.cutoff_);
        top_ = std::max(top_, o.top_);
        for (const auto& [deg, c] : o.coeffs_) add_to(deg, Ops::scale(c, Scalar(-1)));
        drop_below_cutoff();
        return *this;
    }
    friend PsDO operator+(PsDO a, const PsDO& b) { return a += b; }
    friend PsDO operator-(PsDO a, const PsDO& b) { return a -= b; }

    PsDO scaled(const Scalar& s) const {
        PsDO p(ctx_);
        p.top_ = top_;
        p.cutoff_ = cutoff_;
        for (const auto& [deg, c] : coeffs_) p.add_to(deg, Ops::scale(c, s));
        return p;
    }

    /// Equality on the common tracked range, with matching cutoffs.
    friend bool operator==(const PsDO& a, const PsDO& b) {
        if (a.cutoff_ != b.cutoff_) return false;
        PsDO diff = a - b;
        return diff.coeffs_.empty();
    }

    /// Σ r(a_d) ∂^d applied coefficient-wise.
    template <class F>
    PsDO map_coeffs(F&& f) const {
        PsDO p(ctx_);
        p.top_ = top_;
        p.cutoff_ = cutoff_;
        for (const auto& [deg, c] : coeffs_) p.add_to(deg, f(c));
        return p;
    }

    void set_coeff(int deg, const R& c) {
        if (deg < cutoff_) throw cutoff_violation("set_coeff: below cutoff");
        coeffs_.erase(deg);
        if (!Ops::is_zero(c)) coeffs_.emplace(deg, c);
        top_ = std::max(top_, deg);
    }

    void add_to(int deg, const R& c) {
        if (Ops::is_zero(c)) return;
        auto it = coeffs_.find(deg);
        if (it == coeffs_.end()) {
            coeffs_.emplace(deg, c);
        } else {
            it->second = it->second + c;
            if (Ops::is_zero(it->second)) coeffs_.erase(it);
        }
    }

    void set_cutoff(int c) { cutoff_ = c; drop_below_cutoff(); }
    void set_top(int t) { top_ = t; }

    /// "d^2 + 2*u2 + (2*u3 + u2')*d^-1 + O(d^-4)"; `show` renders one coefficient.
    template <class Show>
    std::string str_with(Show&& show, bool latex = false) const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [deg, c] : coeffs_) {
            if (!first) os << " + ";
            first = false;
            std::string cs = show(c);
            bool unit = Ops::is_one(c);
            std::string op;
            if (deg == 1)
                op = latex ? "\\partial_x" : "d";
            else if (deg != 0)
                op = latex ? "\\partial_x^{" + std::to_string(deg) + "}" : "d^" + std::to_string(deg);
            if (unit && !op.empty())
                os << op;
            else if (op.empty())
                os << (coeffs_.size() > 1 ? "(" + cs + ")" : cs);
            else
                os << "(" << cs << ")" << (latex ? " " : "*") << op;
        }
        if (first) os << "0";
        if (!is_exact()) {
            int next = cutoff_ - 1;
            if (latex)
                os << " + \\mathcal{O}(\\partial_x^{" << next << "})";
            else
                os << " + O(d^" << next << ")";
        }
        return os.str();
    }

    std::string str() const {
        return str_with([](const R& c) { return c.str(); });
    }
    std::string latex() const {
        return str_with([](const R& c) { return c.latex(); }, true);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["top"] = top_;
        j["cutoff"] = is_exact() ? nlohmann::json(nullptr) : nlohmann::json(cutoff_);
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& [deg, c] : coeffs_) cs.push_back({{"deg", deg}, {"coeff", c.to_json()}});
        j["coeffs"] = cs;
        return j;
    }

private:
    void drop_below_cutoff() {
        if (cutoff_ == kExact) return;
        for (auto it = coeffs_.begin(); it != coeffs_.end();)
            it = it->first < cutoff_ ? coeffs_.erase(it) : std::next(it);
    }

    context_type ctx_;
    CoeffMap coeffs_;
    int top_ = 0;
    int cutoff_ = kExact;
};

namespace detail {

/// Lazily extended list f, f', f'', ... (stops growing once a zero appears).
template <CoefficientRing R>
class DerivativeChain {
public:
    explicit DerivativeChain(R f) { chain_.push_back(std::move(f)); }
    /// nullptr once the k-th derivative is identically zero.
    const R* get(std::size_t k) {
        while (chain_.size() <= k) {
            if (RingOps<R>::is_zero(chain_.back())) return nullptr;
            chain_.push_back(RingOps<R>::d_x(chain_.back()));
        }
        return RingOps<R>::is_zero(chain_[k]) ? nullptr : &chain_[k];
    }

private:
    std::vector<R> chain_;
};

inline int add_cut(int top, int cut) { return cut == kExact ? kExact : top + cut; }

// A fully exact operator with negative degrees composed with varying
// coefficients yields an infinite series; cap the expansion instead of
// looping. Callers pass a floor to stay well within this.
inline constexpr int kMaxExpansion = 512;

}  // namespace detail

/// Provable cutoff of A∘B.
template <CoefficientRing R>
int compose_cutoff(const PsDO<R>& a, const PsDO<R>& b) {
    return std::max(detail::add_cut(b.top(), a.cutoff()), detail::add_cut(a.top(), b.cutoff()));
}

/// A∘B via the generalized Leibniz rule, optionally truncated at `floor`.
template <CoefficientRing R>
PsDO<R> compose(const PsDO<R>& a, const PsDO<R>& b, std::optional<int> floor = std::nullopt) {
    using Ops = RingOps<R>;
    int cut = compose_cutoff(a, b);
    if (floor && *floor > cut) cut = *floor;
    PsDO<R> out(a.context());
    out.set_top(a.top() + b.top());
    out.set_cutoff(cut);
    std::vector<std::pair<int, detail::DerivativeChain<R>>> chains;
    chains.reserve(b.coeffs().size());
    for (const auto& [j, bj] : b.coeffs()) chains.emplace_back(j, detail::DerivativeChain<R>(bj));
    for (const auto& [i, ai] : a.coeffs()) {
        for (auto& [j, chain] : chains) {
            for (long k = 0;; ++k) {
                if (i >= 0 && k > i) break;
                long deg = static_cast<long>(i) + j - k;
                if (cut != kExact && deg < cut) break;
                if (cut == kExact && k > detail::kMaxExpansion)
                    throw cutoff_violation("compose: infinite expansion; supply a floor");
                const R* dbj = chain.get(static_cast<std::size_t>(k));
                if (!dbj) break;
                Rational c = binom(i, k);
                if (c.is_zero()) continue;
                R term = ai * *dbj;
                out.add_to(static_cast<int>(deg), c.is_one() ? term : Ops::scale(term, Scalar(c)));
            }
        }
    }
    return out;
}

/// ∂^n ∘ f = Σ_i binom(n,i) (∂^i f) ∂^{n-i}, all degrees ≥ cutoff correct.
template <CoefficientRing R>
PsDO<R> leibniz(int n, const R& f, std::optional<int> cutoff = std::nullopt) {
    PsDO<R> dn = PsDO<R>::d(n, RingOps<R>::context_of(f));
    return compose(dn, PsDO<R>::monomial(f), cutoff);
}

/// Equality of the coefficients on the range both operands track.
template <CoefficientRing R>
bool agree_on_common_range(const PsDO<R>& a, const PsDO<R>& b) {
    PsDO<R> diff = a - b;
    return diff.coeffs().empty();
}

template <CoefficientRing R>
PsDO<R> commutator(const PsDO<R>& a, const PsDO<R>& b, std::optional<int> floor = std::nullopt) {
    return compose(a, b, floor) - compose(b, a, floor);
}

template <CoefficientRing R>
PsDO<R> power(const PsDO<R>& a, int m, std::optional<int> floor = std::nullopt) {
    if (m < 1) throw std::invalid_argument("power: exponent must be ≥ 1");
    // partial products only need the degrees that can still reach `floor`
    PsDO<R> acc = a;
    for (int i = 1; i < m; ++i) {
        std::optional<int> f;
        if (floor) f = *floor - (m - i - 1) * a.top();
        acc = compose(acc, a, f);
    }
    return acc;
}

namespace detail {

/// Coefficient of ∂^deg in A∘B, with derivatives of B's coefficients cached
/// in `chains` (keyed by B's degree).
template <CoefficientRing R>
R compose_coeff(const PsDO<R>& a, std::map<int, DerivativeChain<R>>& bchains, int deg,
                const typename RingOps<R>::context_type& ctx) {
    using Ops = RingOps<R>;
    R acc = Ops::zero(ctx);
    for (const auto& [i, ai] : a.coeffs()) {
        for (auto& [j, chain] : bchains) {
            long k = static_cast<long>(i) + j - deg;
            if (k < 0) continue;
            if (i >= 0 && k > i) continue;
            const R* dbj = chain.get(static_cast<std::size_t>(k));
            if (!dbj) continue;
            Rational c = binom(i, k);
            if (c.is_zero()) continue;
            acc = acc + Ops::scale(ai * *dbj, Scalar(c));
        }
    }
    return acc;
}

}  // namespace detail

/// Monic S of order n with S∘S = A, for A monic of order 2n, solved from the
/// top coefficient downwards.
template <CoefficientRing R>
PsDO<R> sqrt_monic(const PsDO<R>& a, int cutoff) {
    using Ops = RingOps<R>;
    if (a.top() % 2 != 0) throw std::invalid_argument("sqrt_monic: operator order must be even");
    if (!a.is_monic()) throw non_monic("sqrt_monic: operator is not monic");
    const int n = a.top() / 2;
    int cut = std::max(cutoff, detail::add_cut(-n, a.cutoff()));
    PsDO<R> s = PsDO<R>::d(n, a.context());
    std::map<int, detail::DerivativeChain<R>> chains;
    chains.emplace(n, detail::DerivativeChain<R>(Ops::one(a.context())));
    const Scalar half(Rational(1, 2));
    for (int d = n - 1; d >= cut; --d) {
        R known = detail::compose_coeff(s, chains, n + d, a.context());
        R sd = Ops::scale(a.coeff(n + d) - known, half);
        if (!Ops::is_zero(sd)) {
            s.set_coeff(d, sd);
            chains.emplace(d, detail::DerivativeChain<R>(sd));
        }
    }
    s.set_cutoff(cut);
    return s;
}

/// Two-sided inverse of a monic operator, correct down to `cutoff`.
template <CoefficientRing R>
PsDO<R> invert_monic(const PsDO<R>& a, int cutoff) {
    using Ops = RingOps<R>;
    if (!a.is_monic()) throw non_monic("invert_monic: operator is not monic");
    const int n = a.top();
    int cut = cutoff;
    if (!a.is_exact()) cut = std::max(cutoff, a.cutoff() - 2 * n);
    PsDO<R> b = PsDO<R>::d(-n, a.context());
    std::map<int, detail::DerivativeChain<R>> chains;
    chains.emplace(-n, detail::DerivativeChain<R>(Ops::one(a.context())));
    for (int d = -n - 1; d >= cut; --d) {
        R known = detail::compose_coeff(a, chains, n + d, a.context());
        if (!Ops::is_zero(known)) {
            R bd = Ops::scale(known, Scalar(-1));
            b.set_coeff(d, bd);
            chains.emplace(d, detail::DerivativeChain<R>(bd));
        }
    }
    b.set_cutoff(cut);
    return b;
}

}  // namespace ncint
