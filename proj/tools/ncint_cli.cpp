// ncint: derive, build and check noncommutative KP/KdV data from the command line.
//
// Exit codes: 0 success, 1 a check failed, 2 bad configuration, 3 singularity.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <ncint/asdym.hpp>
#include <ncint/hierarchy.hpp>
#include <ncint/quasidet.hpp>
#include <ncint/soliton.hpp>

using namespace ncint;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kSingular = 3 };

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    std::string format = "text";
    std::string path;

    void write(const std::string& payload) const {
        if (path.empty()) {
            std::cout << payload;
            return;
        }
        // write-then-rename so readers never see a partial file
        std::filesystem::path dst(path);
        std::filesystem::path tmp = dst;
        tmp += ".tmp";
        {
            std::ofstream os(tmp, std::ios::binary);
            if (!os) throw config_error("cannot open output file " + path);
            os << payload;
        }
        std::filesystem::rename(tmp, dst);
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json with_defaults(json j) {
    j["defaults"] = Defaults::to_json();
    return j;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error("bad number '" + item + "' in list '" + s + "'");
        }
    }
    if (v.empty()) throw config_error("empty list");
    return v;
}

std::pair<double, double> parse_range(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw config_error("range must look like a:b, got '" + s + "'");
    auto a = parse_list(s.substr(0, colon)), b = parse_list(s.substr(colon + 1));
    if (a.size() != 1 || b.size() != 1 || !(a[0] < b[0])) throw config_error("bad range '" + s + "'");
    return {a[0], b[0]};
}

SolitonParams default_params() {
    return SolitonParams::from_json(json::parse(R"({"kind":"kdv","flow":3,
        "solitons":[{"alpha":"1/2","a":"1"},{"alpha":"1","a":"-1"}],"theta":{"pair":"tx","K":2}})"));
}

SolitonParams load_params(const std::string& path, int K_override) {
    SolitonParams p;
    if (path.empty()) {
        p = default_params();
    } else {
        std::ifstream is(path);
        if (!is) throw config_error("cannot read config " + path);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw config_error(std::string("config is not valid JSON: ") + e.what());
        }
        p = SolitonParams::from_json(j);
    }
    if (K_override >= 0) {
        p.K = p.pair == ThetaPair::none ? 0 : K_override;
        p.validate();
    }
    return p;
}

// ---------------------------------------------------------------- hierarchy

int cmd_hierarchy(const std::string& kind, int m, int kmax, const Output& out) {
    if (m < 1) throw config_error("--m must be ≥ 1");
    std::vector<FlowEquation> eqs;
    if (kind == "kp") {
        if (kmax < 2) throw config_error("--kmax must be ≥ 2");
        eqs = kp_flow(m, kmax);
    } else if (kind == "kdv") {
        eqs.push_back(kdv_flow(m));
    } else {
        throw config_error("hierarchy kind must be kp or kdv");
    }
    if (out.format == "json") {
        json arr = json::array();
        for (const auto& e : eqs) arr.push_back(e.to_json());
        out.write(dump(with_defaults({{"command", "hierarchy"}, {"kind", kind}, {"m", m}, {"equations", arr}})));
        return kOk;
    }
    std::string s;
    for (const auto& e : eqs) {
        if (out.format == "latex") {
            s += e.latex() + "\n";
        } else if (kind == "kdv" && e.rhs.is_zero()) {
            s += "0 = 0 (trivial even flow)\n";
        } else {
            s += e.str() + "\n";
        }
    }
    out.write(s);
    return kOk;
}

// ---------------------------------------------------------------- soliton

struct SolitonOptions {
    std::string config;
    int K = -1;
    int n = 1;
    std::string t_list = "-5,-2,0,2,5";
    double t = 0.0;
    std::string range = "-20:20";
    int samples = 2000;
    double theta = Defaults::theta_num;
    double half_width = Defaults::half_width;
    double step = Defaults::step;
    double tol = Defaults::tolerance;
    double t_far = Defaults::t_far;
};

int soliton_build(const SolitonParams& p, const Output& out) {
    StarSeries u = build_u(p);
    if (out.format == "json") {
        out.write(dump(with_defaults({{"command", "soliton build"}, {"params", p.to_json()}, {"u", u.to_json()}})));
    } else {
        out.write("u = " + u.str(p.coord_names()) + "\n");
    }
    return kOk;
}

int soliton_verify(const SolitonParams& p, const Output& out) {
    ResidualReport rep = p.kind == SolitonKind::kdv ? verify_kdv(p) : verify_kp(p);
    if (out.format == "json")
        out.write(dump(with_defaults({{"command", "soliton verify"}, {"params", p.to_json()}, {"report", rep.to_json()}})));
    else
        out.write(rep.summary() + "\n");
    return rep.all_zero() ? kOk : kCheckFailed;
}

int soliton_profile(const SolitonParams& p, const SolitonOptions& o, const Output& out) {
    auto [x0, x1] = parse_range(o.range);
    StarSeries u = build_u(p);
    auto rows = profile(p, u, o.t, x0, x1, o.samples, o.theta);
    if (out.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back({r.x, r.u.real(), r.u.imag(), std::abs(r.u)});
        out.write(dump(with_defaults({{"command", "soliton profile"}, {"params", p.to_json()}, {"t", o.t},
                                      {"theta_num", o.theta}, {"columns", {"x", "re", "im", "abs"}}, {"rows", arr}})));
    } else {
        out.write(profile_csv(rows));
    }
    return kOk;
}

int soliton_charges(const SolitonParams& p, const SolitonOptions& o, const Output& out) {
    QuadratureSettings q;
    q.half_width = o.half_width;
    q.step = o.step;
    if (!(q.step > 0) || !(q.half_width > 0)) throw config_error("quadrature step and half-width must be positive");
    auto ts = parse_list(o.t_list);
    ChargeReport rep = conserved_charge(p, o.n, ts, o.theta, q);
    const bool ok = rep.drift() < o.tol;
    if (out.format == "json") {
        json j = {{"command", "soliton charges"}, {"params", p.to_json()}, {"theta_num", o.theta},
                  {"tolerance", o.tol}, {"report", rep.to_json()}, {"pass", ok}};
        out.write(dump(with_defaults(j)));
    } else {
        std::string s = "t,re,im\n";
        char buf[160];
        for (const auto& c : rep.samples) {
            std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g\n", c.t, c.Q.real(), c.Q.imag());
            s += buf;
        }
        std::snprintf(buf, sizeof buf, "# drift %.3e (tolerance %.1e) %s%s\n", rep.drift(), o.tol, ok ? "PASS" : "FAIL",
                      rep.non_decay ? " [warning: integrand does not decay at the boundary]" : "");
        s += buf;
        out.write(s);
    }
    if (rep.non_decay) std::cerr << "warning: integrand does not decay at x = ±" << q.half_width << "\n";
    return ok ? kOk : kCheckFailed;
}

int soliton_phaseshift(const SolitonParams& p, const SolitonOptions& o, const Output& out) {
    StarSeries u = build_u(p);
    PhaseShiftReport rep = phase_shift(p, u, o.theta, o.t_far);
    std::vector<double> oracle{commutative_phase_shift(p, 0), commutative_phase_shift(p, 1)};
    bool ok = true;
    const double tol = o.theta == 0.0 ? o.tol : 1e-3;
    for (std::size_t s = 0; s < 2; ++s) ok = ok && std::abs(rep.shift[s] - oracle[s]) < tol;
    if (out.format == "json") {
        json j = {{"command", "soliton phaseshift"}, {"params", p.to_json()}, {"theta_num", o.theta},
                  {"report", rep.to_json()}, {"commutative_shift", oracle}, {"tolerance", tol}, {"pass", ok}};
        out.write(dump(with_defaults(j)));
    } else {
        char buf[200];
        std::string s;
        for (std::size_t k = 0; k < 2; ++k) {
            std::snprintf(buf, sizeof buf, "soliton %zu: shift %.9f (commutative %.9f)\n", k + 1, rep.shift[k], oracle[k]);
            s += buf;
        }
        s += ok ? "PASS\n" : "FAIL\n";
        out.write(s);
    }
    return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- quasidet

int cmd_quasidet_demo(int size, const Output& out) {
    if (size < 1 || size > 4) throw config_error("--size must be between 1 and 4 for the demo");
    QuasidetFormula f(out.format == "latex");
    std::vector<std::size_t> all(size);
    for (int k = 0; k < size; ++k) all[k] = k;
    if (out.format == "json") {
        json arr = json::array();
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j)
                arr.push_back({{"i", i + 1}, {"j", j + 1}, {"expansion", f.expansion(size, i, j)}});
        out.write(dump(with_defaults({{"command", "quasidet demo"}, {"size", size}, {"quasideterminants", arr}})));
        return kOk;
    }
    std::string s;
    if (size == 1) {
        s = "|a| = a\n";
    } else {
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j)
                s += f.boxed(all, all, i, j) + " = " + f.expansion(size, i, j) + "\n";
    }
    out.write(s);
    return kOk;
}

NCMatrix<Scalar> random_rational_matrix(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
    NCMatrix<Scalar> A(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = Scalar(Rational(num(rng), den(rng)), Rational(num(rng) % 3, den(rng)));
    return A;
}

int cmd_quasidet_check(int size, int trials, unsigned long seed, const Output& out) {
    if (size < 1 || size > 6) throw config_error("--size must be between 1 and 6");
    if (trials < 1) throw config_error("--trials must be ≥ 1");
    std::mt19937_64 rng(seed);
    int passed = 0, attempted = 0;
    for (int t = 0; t < trials; ++t) {
        bool ok = true;
        for (int attempt = 0;; ++attempt) {
            NCMatrix<Scalar> A = random_rational_matrix(rng, size);
            try {
                for (int i = 0; i < size && ok; ++i)
                    for (int j = 0; j < size && ok; ++j) ok = commutative_limit_check(A, i, j).pass;
                break;
            } catch (const zero_minor&) {
            } catch (const singular_block&) {
            }
            ok = true;
            if (attempt > 100) throw std::runtime_error("could not draw a matrix with invertible minors");
        }
        ++attempted;
        if (ok) ++passed;
    }
    const bool all = passed == attempted;
    if (out.format == "json") {
        out.write(dump(with_defaults({{"command", "quasidet check"}, {"size", size}, {"trials", attempted},
                                      {"passed", passed}, {"seed", seed}, {"pass", all}})));
    } else {
        out.write(std::to_string(passed) + "/" + std::to_string(attempted) + " commutative-limit passes (size " +
                  std::to_string(size) + ")\n");
    }
    return all ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- asdym

int cmd_asdym(bool perturb, const Output& out) {
    GaugeFields g = perturb ? GaugeFields::kdv_ansatz(Scalar(Rational(1, 4))) : GaugeFields::kdv_ansatz();
    ReductionReport rep = check_kdv_reduction(g);
    const NCPoly target = kdv_flow(3).rhs;
    const bool ok = rep.reduced() && rep.evolution == target;
    if (out.format == "json") {
        out.write(dump(with_defaults({{"command", "asdym"}, {"perturb", perturb}, {"report", rep.to_json()},
                                      {"matches_nckdv", rep.reduced() && rep.evolution == target}, {"pass", ok}})));
    } else if (out.format == "latex") {
        out.write(rep.latex() + (ok ? "% PASS\n" : "% FAIL\n"));
    } else {
        std::string s = rep.text();
        for (const auto& z : rep.zero_residuals) s += z + " = 0\n";
        if (rep.single_unit)
            s += "residual = (" + rep.udot_coeff.str() + ")*(udot - ncKdV RHS)*E" + std::to_string(rep.row + 1) +
                 std::to_string(rep.col + 1) + " in " + rep.carrier + "\n";
        s += ok ? "PASS\n" : "FAIL\n";
        out.write(s);
    }
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noncommutative KP/KdV workbench"};
    app.require_subcommand(1);
    Output out;
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", out.format, "text | latex | json | csv")
            ->check(CLI::IsMember({"text", "latex", "json", "csv"}));
        sub->add_option("-o,--out", out.path, "write the result to this file");
    };

    auto* hier = app.add_subcommand("hierarchy", "derive KP or KdV flow equations");
    std::string hkind;
    int hm = 2, hkmax = 4;
    hier->add_option("kind", hkind, "kp | kdv")->required();
    hier->add_option("--m", hm, "flow index");
    hier->add_option("--kmax", hkmax, "largest field index (kp)");
    add_output(hier);

    auto* sol = app.add_subcommand("soliton", "build and check N-soliton solutions");
    std::string sact;
    SolitonOptions so;
    sol->add_option("action", sact, "build | verify | profile | charges | phaseshift")
        ->required()
        ->check(CLI::IsMember({"build", "verify", "profile", "charges", "phaseshift"}));
    sol->add_option("--config", so.config, "soliton parameters (JSON)");
    sol->add_option("--K", so.K, "θ truncation order (overrides the config)");
    sol->add_option("--n", so.n, "charge index");
    sol->add_option("--t", so.t_list, "comma separated times (charges) or a single time (profile)");
    sol->add_option("--range", so.range, "x range a:b (profile)");
    sol->add_option("--samples", so.samples, "profile samples");
    sol->add_option("--theta", so.theta, "numeric θ");
    sol->add_option("--half-width", so.half_width, "quadrature half width L");
    sol->add_option("--step", so.step, "quadrature step");
    sol->add_option("--tol", so.tol, "drift / shift tolerance");
    sol->add_option("--t-far", so.t_far, "|t| used for phase shifts");
    add_output(sol);

    auto* qd = app.add_subcommand("quasidet", "quasideterminant formulas and oracle checks");
    std::string qact;
    int qsize = 2, qtrials = 100;
    unsigned long qseed = 1;
    qd->add_option("action", qact, "demo | check")->required()->check(CLI::IsMember({"demo", "check"}));
    qd->add_option("--size", qsize, "matrix size");
    qd->add_option("--trials", qtrials, "random trials (check)");
    qd->add_option("--seed", qseed, "random seed (check)");
    add_output(qd);

    auto* asd = app.add_subcommand("asdym", "ASDYM to KdV reduction check");
    bool perturb = false;
    asd->add_flag("--perturb", perturb, "use a deliberately wrong ansatz");
    add_output(asd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*hier) return cmd_hierarchy(hkind, hm, hkmax, out);
        if (*sol) {
            SolitonParams p = load_params(so.config, so.K);
            if (sact == "build") return soliton_build(p, out);
            if (sact == "verify") return soliton_verify(p, out);
            if (sact == "profile") {
                auto ts = parse_list(so.t_list == SolitonOptions{}.t_list ? "0" : so.t_list);
                if (ts.size() != 1) throw config_error("profile takes a single --t");
                so.t = ts[0];
                return soliton_profile(p, so, out);
            }
            if (sact == "charges") return soliton_charges(p, so, out);
            if (sact == "phaseshift") return soliton_phaseshift(p, so, out);
        }
        if (*qd) return qact == "demo" ? cmd_quasidet_demo(qsize, out) : cmd_quasidet_check(qsize, qtrials, qseed, out);
        if (*asd) return cmd_asdym(perturb, out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const param_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const insufficient_depth& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const singular_block& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const pole_at_point& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const not_invertible& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const division_by_zero& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const zero_leading_coefficient& e) {
        std::cerr << "singular: " << e.what() << "\n";
        return kSingular;
    } catch (const tracking_failure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    }
    return kConfig;
}
