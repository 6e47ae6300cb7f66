#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dasp/asymptotics.hpp"
#include "dasp/dyson_mc.hpp"
#include "dasp/errors.hpp"
#include "dasp/fredholm.hpp"
#include "dasp/kernels.hpp"
#include "dasp/painleve.hpp"
#include "dasp/parallel.hpp"
#include "dasp/pde_check.hpp"

namespace dasp::cli {
namespace {

using json = nlohmann::ordered_json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
};

// A subcommand yields a JSON document, a table, or both; the format flag picks.
struct Output {
    json object;
    std::optional<Table> table;
};

struct Common {
    double tol = 1e-10;
    std::uint64_t seed = 20240601;
    int jobs = 1;
    std::string format;  // empty: subcommand default
    std::string output;
    bool describe = false;
};

struct Command {
    CLI::App* app = nullptr;
    std::string default_format = "json";
    std::string description;
    std::function<Output()> run;
};

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
        return s;
    }
    return v.dump();
}

void emit(const Output& o, const std::string& format, std::ostream& os) {
    if (format == "json") {
        if (!o.object.is_null()) {
            os << o.object.dump(2) << '\n';
            return;
        }
        json arr = json::array();
        for (const auto& row : o.table->rows) {
            json r = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) r[o.table->header[i]] = row[i];
            arr.push_back(r);
        }
        os << arr.dump(2) << '\n';
        return;
    }
    Table t;
    if (o.table) {
        t = *o.table;
    } else {
        std::vector<json> row;
        for (const auto& [k, v] : o.object.items()) {
            t.header.push_back(k);
            row.push_back(v);
        }
        t.rows.push_back(row);
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

json report_json(const ResidualReport& r) {
    return json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"normalizer", r.normalizer}, {"rel_residual", r.rel_residual}};
}

json joint_json(const EmpiricalJoint& e) {
    return json{{"hits", e.hits}, {"samples", e.samples}, {"p_hat", e.p_hat}, {"stderr", e.stderr_}};
}

FredholmConfig fredholm_config(const Common& c) {
    FredholmConfig cfg;
    cfg.tol = c.tol;
    return cfg;
}

// key=value lines; '#' starts a comment.  Returns flags to append for keys
// not already present on the command line.
std::vector<std::string> config_flags(const std::string& path, const std::vector<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::vector<std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ConversionError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& a : given)
            if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
        if (present) continue;
        out.push_back(flag);
        out.push_back(value);
    }
    return out;
}

AiryForm parse_airy_form(const std::string& s) {
    if (s == "explicit" || s == "explicit_4_12") return AiryForm::explicit_form;
    if (s == "wronskian" || s == "wronskian_1_15") return AiryForm::wronskian;
    if (s == "xy" || s == "xy_1_16") return AiryForm::xy;
    throw DomainError("residual: unknown Airy form '" + s + "'");
}

SineForm parse_sine_form(const std::string& s) {
    if (s == "general" || s == "general_1_17") return SineForm::general;
    if (s == "single" || s == "single_1_18") return SineForm::single_interval;
    throw DomainError("residual: unknown Sine form '" + s + "'");
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dyson Brownian motion, Airy and Sine processes: distributions, PDE checks, asymptotics"};
    app.require_subcommand(1);
    Common c;
    std::map<std::string, Command> cmds;

    auto add_common = [&c](CLI::App* s) {
        s->add_option("--tol", c.tol, "determinant refinement tolerance")->check(CLI::PositiveNumber);
        s->add_option("--seed", c.seed, "random seed (default 20240601)");
        s->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1, 1024));
        s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        s->add_option("--output", c.output, "write to this file instead of stdout");
        s->add_flag("--describe", c.describe, "print the relation this subcommand evaluates");
    };
    auto add = [&](const std::string& name, const std::string& help, std::string description) -> Command& {
        Command& cmd = cmds[name];
        cmd.app = app.add_subcommand(name, help);
        cmd.description = std::move(description);
        add_common(cmd.app);
        return cmd;
    };

    // tw
    double tw_u = 0.0;
    bool tw_cross = false;
    {
        Command& cmd = add("tw", "Tracy-Widom F2 from Painleve II",
                           "F2(u) = exp(-int_u^inf (a - u) q(a)^2 da), q'' = u q + 2 q^3, q(u) ~ Ai(u) as u -> +inf");
        cmd.app->add_option("--u", tw_u, "argument")->required();
        cmd.app->add_flag("--cross-check", tw_cross, "also evaluate det(I - K_Airy) on (u, inf)");
        cmd.run = [&] {
            const TracyWidomPoint p = default_tracy_widom().at(tw_u);
            json o{{"u", p.u},         {"F2", p.F2}, {"F2_prime", p.F2_prime}, {"g", p.g},
                   {"g_prime", p.g_prime}, {"q", p.q},   {"q_prime", p.q_prime}};
            if (tw_cross) {
                const FredholmResult r = joint_probability(Process::airy, {}, 0.0, 0.0, IntervalUnion::below(tw_u),
                                                           std::nullopt, fredholm_config(c));
                o["fredholm"] = r.value;
                o["difference"] = std::abs(r.value - p.F2);
            }
            return Output{o, {}};
        };
    }

    // kernel
    std::string k_kind = "airy";
    int k_n = 10;
    double k_ti = 0.0, k_tj = 0.0;
    std::vector<double> k_x{0.0}, k_y{0.0};
    {
        Command& cmd = add("kernel", "extended kernel value K_{t_i t_j}(x, y)",
                           "K_{ts}(x,y) = sum_k e^{-k(t-s)} phi_k(x) phi_k(y) (t >= s), minus the complementary sum "
                           "for t < s; Airy: int_0^inf e^{-z(t-s)} Ai(x+z) Ai(y+z) dz; Sine: (1/pi) int_0^pi "
                           "e^{z^2(t-s)/2} cos(z(x-y)) dz");
        cmd.app->add_option("--kind", k_kind, "hermite, airy or sine")->check(CLI::IsMember({"hermite", "airy", "sine"}));
        cmd.app->add_option("--n", k_n, "matrix size (hermite)");
        cmd.app->add_option("--ti", k_ti, "first time");
        cmd.app->add_option("--tj", k_tj, "second time");
        cmd.app->add_option("--x", k_x, "first arguments (grid rows)");
        cmd.app->add_option("--y", k_y, "second arguments (grid columns)");
        cmd.run = [&] {
            const ExtendedKernelSpec spec = k_kind == "hermite" ? ExtendedKernelSpec::hermite(k_n, k_ti, k_tj)
                                            : k_kind == "airy"  ? ExtendedKernelSpec::airy(k_ti, k_tj)
                                                                : ExtendedKernelSpec::sine(k_ti, k_tj);
            Table tab{{"x", "y", "K"}, {}};
            for (double x : k_x)
                for (double y : k_y) tab.rows.push_back({x, y, eval_kernel(spec, x, y)});
            json o;
            if (tab.rows.size() == 1) {
                o = json{{"kind", k_kind}, {"t_i", k_ti}, {"t_j", k_tj}, {"x", k_x[0]}, {"y", k_y[0]}, {"K", tab.rows[0][2]}};
                if (k_kind == "hermite") o["n"] = k_n;
            }
            return Output{o, tab};
        };
    }

    // kernel-limit
    std::string kl_target = "airy";
    std::vector<int> kl_n{50, 400, 3200};
    double kl_t = 0.5, kl_s = 0.0, kl_u = 0.3, kl_v = -0.2;
    {
        Command& cmd = add("kernel-limit", "scaled Hermite kernel against its edge or bulk limit",
                           "edge: w K^n_{t/n^{1/3}, s/n^{1/3}}(e + w u, e + w v) -> K^A_{ts}(u, v), e = sqrt(2n+1), "
                           "w = 1/(sqrt2 n^{1/6}); bulk: w K^n_{tau t, tau s}(w u, w v) -> e^{-(pi^2/2)(t-s)} "
                           "K^S_{ts}(u, v), w = pi/sqrt(2n), tau = pi^2/(2n)");
        cmd.default_format = "csv";
        cmd.app->add_option("--target", kl_target, "airy or sine")->check(CLI::IsMember({"airy", "sine"}));
        cmd.app->add_option("--n", kl_n, "matrix sizes");
        cmd.app->add_option("--t", kl_t, "first time");
        cmd.app->add_option("--s", kl_s, "second time");
        cmd.app->add_option("--u", kl_u, "first argument");
        cmd.app->add_option("--v", kl_v, "second argument");
        cmd.run = [&] {
            Table tab{{"n", "scaled_hermite", "limit_value", "abs_error"}, {}};
            for (int n : kl_n) {
                const LimitComparison r = limit_compare(kl_target == "airy" ? LimitTarget::airy : LimitTarget::sine,
                                                        n, kl_t, kl_s, kl_u, kl_v);
                tab.rows.push_back({n, r.scaled_hermite, r.limit_value, r.abs_error});
            }
            return Output{json(), tab};
        };
    }

    // airy-joint
    double aj_t = 1.0, aj_u = 0.0, aj_v = 0.0;
    std::string aj_route = "direct";
    {
        Command& cmd = add("airy-joint", "P(A(0) <= u, A(t) <= v)",
                           "P(A(0) <= u, A(t) <= v) = det(I - chi K^A chi) on L^2((u,inf)) + L^2((v,inf)) with the "
                           "2x2 extended Airy kernel");
        cmd.app->add_option("--t", aj_t, "time gap")->check(CLI::PositiveNumber);
        cmd.app->add_option("--u", aj_u, "level at time 0");
        cmd.app->add_option("--v", aj_v, "level at time t");
        cmd.app->add_option("--route", aj_route, "direct or ratio")->check(CLI::IsMember({"direct", "ratio"}));
        cmd.run = [&] {
            json o{{"t", aj_t}, {"u", aj_u}, {"v", aj_v}, {"route", aj_route}};
            if (aj_route == "direct") {
                const FredholmResult r = joint_probability(Process::airy, {}, 0.0, aj_t, IntervalUnion::below(aj_u),
                                                           IntervalUnion::below(aj_v), fredholm_config(c));
                o["P"] = r.value;
                o["order_used"] = r.order_used;
                o["est_error"] = r.est_error;
            } else {
                const FredholmResult r = two_time_ratio_factorized(aj_t, aj_u, aj_v, fredholm_config(c));
                const TracyWidomCurve& tw = default_tracy_widom();
                o["ratio"] = r.value;
                o["P"] = r.value * tw.F2_at(aj_u) * tw.F2_at(aj_v);
                o["order_used"] = r.order_used;
                o["est_error"] = r.est_error;
            }
            return Output{o, {}};
        };
    }

    // sine-joint / dyson-joint
    double sj_t = 1.0;
    std::string sj_e1 = "-0.6:0.5", sj_e2 = "-0.5:0.7";
    {
        Command& cmd = add("sine-joint", "P(no Sine point in E1 at 0, none in E2 at t)",
                           "P(S(0) cap E1 = empty, S(t) cap E2 = empty) = det(I - chi_E K^S chi_E), extended sine kernel");
        cmd.app->add_option("--t", sj_t, "time gap")->check(CLI::PositiveNumber);
        cmd.app->add_option("--e1", sj_e1, "set at time 0, e.g. -0.6:0.5");
        cmd.app->add_option("--e2", sj_e2, "set at time t");
        cmd.run = [&] {
            const FredholmResult r = joint_probability(Process::sine, {}, 0.0, sj_t, IntervalUnion::parse(sj_e1),
                                                       IntervalUnion::parse(sj_e2), fredholm_config(c));
            return Output{json{{"t", sj_t}, {"E1", sj_e1}, {"E2", sj_e2}, {"P", r.value}, {"order_used", r.order_used},
                               {"est_error", r.est_error}},
                          {}};
        };
    }
    int dj_n = 2;
    double dj_t = 0.5;
    std::string dj_e1 = "-2:2", dj_e2 = "-2:2";
    {
        Command& cmd = add("dyson-joint", "P(all eigenvalues in E1 at 0 and in E2 at t)",
                           "P(spec B(0) in E1, spec B(t) in E2) = det(I - chi K^n chi) over the complements, with the "
                           "extended Hermite kernel of the matrix Ornstein-Uhlenbeck flow");
        cmd.app->add_option("--n", dj_n, "matrix size")->check(CLI::Range(1, 64));
        cmd.app->add_option("--t", dj_t, "time gap")->check(CLI::PositiveNumber);
        cmd.app->add_option("--e1", dj_e1, "set at time 0");
        cmd.app->add_option("--e2", dj_e2, "set at time t");
        cmd.run = [&] {
            const FredholmResult r = joint_probability(Process::dyson, {dj_n}, 0.0, dj_t, IntervalUnion::parse(dj_e1),
                                                       IntervalUnion::parse(dj_e2), fredholm_config(c));
            return Output{json{{"n", dj_n}, {"t", dj_t}, {"E1", dj_e1}, {"E2", dj_e2}, {"P", r.value},
                               {"order_used", r.order_used}, {"est_error", r.est_error}},
                          {}};
        };
    }

    // residual
    std::string r_process = "airy", r_form, r_variant = "direct", r_e1 = "-0.6:0.5", r_e2 = "-0.5:0.7";
    double r_t = 1.0, r_u = 0.0, r_v = 0.0, r_h = 0.05, r_ht = 0.02;
    int r_n = 2, r_order = 2, r_levels = 1;
    bool r_rich = false;
    {
        Command& cmd = add("residual", "finite-difference residual of the nonlinear PDEs",
                           "dyson: A1(B2 A1 G/(B1 A1 G + 2nc)) = B1(A2 B1 G/(A1 B1 G + 2nc)); airy explicit: "
                           "t(G_uut - G_vvt) = G_uuv(2G_vv + G_uv - G_uu + u - v - t^2) - G_uvv(2G_uu + G_uv - G_vv - u "
                           "+ v - t^2) + G_uuu(G_uv + G_vv) - G_vvv(G_uu + G_uv); airy xy: 2t H_txy = t^2 H_xxx - t^2 "
                           "H_xyy - x H_xxy + x H_yyy + 8(H_yy H_xyy - H_xy H_yyy); sine: L_u[(2E_v L_u + (E_v - E_u - "
                           "1)L_v)G/((L_u+L_v)^2 G + pi^2)] = (u <-> v)");
        cmd.app->add_option("--process", r_process, "dyson, airy or sine")
            ->check(CLI::IsMember({"dyson", "airy", "sine"}));
        cmd.app->add_option("--form", r_form, "airy: explicit | wronskian | xy; sine: general | single");
        cmd.app->add_option("--variant", r_variant, "dyson: direct or complement")
            ->check(CLI::IsMember({"direct", "complement"}));
        cmd.app->add_option("--t", r_t, "time gap");
        cmd.app->add_option("--u", r_u, "airy: level at time 0");
        cmd.app->add_option("--v", r_v, "airy: level at time t");
        cmd.app->add_option("--n", r_n, "dyson: matrix size");
        cmd.app->add_option("--e1", r_e1, "dyson/sine: set at time 0");
        cmd.app->add_option("--e2", r_e2, "dyson/sine: set at time t");
        cmd.app->add_option("--h-space", r_h, "spatial step");
        cmd.app->add_option("--h-time", r_ht, "time step");
        cmd.app->add_option("--order", r_order, "stencil order (2 or 4)");
        cmd.app->add_flag("--richardson", r_rich, "Richardson-combine h and h/2");
        cmd.app->add_option("--levels", r_levels, "number of step halvings to report")->check(CLI::Range(1, 6));
        cmd.run = [&] {
            Stencil st;
            st.h_space = r_h;
            st.h_time = r_ht;
            st.order = r_order;
            st.richardson = r_rich;
            PdeOptions opt;
            opt.fredholm = fredholm_config(c);
            std::function<ResidualReport(const Stencil&)> eval;
            if (r_process == "airy") {
                const AiryForm f = parse_airy_form(r_form.empty() ? "explicit" : r_form);
                eval = [&, f](const Stencil& s) { return airy_residual(r_t, r_u, r_v, s, f, opt); };
            } else if (r_process == "sine") {
                const SineForm f = parse_sine_form(r_form.empty() ? "general" : r_form);
                const IntervalUnion E1 = IntervalUnion::parse(r_e1), E2 = IntervalUnion::parse(r_e2);
                eval = [&, f, E1, E2](const Stencil& s) { return sine_residual(r_t, E1, E2, s, f, opt); };
            } else {
                if (!r_form.empty()) throw DomainError("residual: --form does not apply to dyson");
                const IntervalUnion E1 = IntervalUnion::parse(r_e1), E2 = IntervalUnion::parse(r_e2);
                const DysonVariant var = r_variant == "direct" ? DysonVariant::direct : DysonVariant::complement;
                eval = [&, E1, E2, var](const Stencil& s) { return dyson_residual(r_n, r_t, E1, E2, s, var, opt); };
            }
            const std::vector<ResidualReport> ladder = residual_ladder(eval, st, r_levels);
            Table tab{{"h_space", "h_time", "lhs", "rhs", "normalizer", "rel_residual"}, {}};
            Stencil s = st;
            for (const auto& r : ladder) {
                tab.rows.push_back({s.h_space, s.h_time, r.lhs, r.rhs, r.normalizer, r.rel_residual});
                s = s.scaled(0.5);
            }
            json o = report_json(ladder.front());
            o["process"] = r_process;
            if (!r_form.empty()) o["form"] = r_form;
            o["h_space"] = st.h_space;
            o["h_time"] = st.h_time;
            if (ladder.size() > 1) {
                json lad = json::array();
                for (const auto& r : ladder) lad.push_back(report_json(r));
                o["ladder"] = lad;
            }
            return Output{o, tab};
        };
    }

    // mc
    int mc_n = 2;
    double mc_t1 = 0.0, mc_t2 = 0.5;
    std::string mc_e1 = "-2:2", mc_e2 = "-2:2";
    long mc_samples = 200000;
    bool mc_compare = false;
    {
        Command& cmd = add("mc", "Monte Carlo estimate of the Dyson joint probability",
                           "B(t) = e^{-dt} B(0) + sqrt(1 - e^{-2dt}) X, X ~ GUE (density ~ e^{-Tr X^2}); p_hat = "
                           "fraction of paths with spec B(0) in E1 and spec B(t) in E2");
        cmd.app->add_option("--n", mc_n, "matrix size")->check(CLI::Range(1, 64));
        cmd.app->add_option("--t1", mc_t1, "first time")->check(CLI::NonNegativeNumber);
        cmd.app->add_option("--t2", mc_t2, "second time");
        cmd.app->add_option("--e1", mc_e1, "set at time 0");
        cmd.app->add_option("--e2", mc_e2, "set at time t");
        cmd.app->add_option("--samples", mc_samples, "number of paths")->check(CLI::PositiveNumber);
        cmd.app->add_flag("--compare", mc_compare, "also evaluate the Fredholm value");
        cmd.run = [&] {
            OUConfig cfg;
            cfg.n = mc_n;
            cfg.times = {mc_t1, mc_t2};
            cfg.samples = mc_samples;
            cfg.seed = c.seed;
            const IntervalUnion E1 = IntervalUnion::parse(mc_e1), E2 = IntervalUnion::parse(mc_e2);
            const EmpiricalJoint e = estimate_joint(cfg, mc_t1, mc_t2, E1, E2);
            json o{{"n", mc_n}, {"t1", mc_t1}, {"t2", mc_t2}, {"E1", mc_e1}, {"E2", mc_e2}, {"seed", c.seed}};
            o.update(joint_json(e));
            if (mc_compare) {
                const FredholmResult r = joint_probability(Process::dyson, {mc_n}, mc_t1, mc_t2, E1, E2, fredholm_config(c));
                o["fredholm"] = r.value;
                o["z_score"] = e.stderr_ > 0 ? (e.p_hat - r.value) / e.stderr_ : 0.0;
            }
            return Output{o, {}};
        };
    }

    // nonexplosion
    int nx_n = 2;
    double nx_t = 0.5, nx_z = 1.5, nx_a = 0.0;
    long nx_samples = 100000;
    {
        Command& cmd = add("nonexplosion", "conditioned top-eigenvalue inequality",
                           "P(lambda_max(t) >= a | lambda_max(0) <= -z) <= P(lambda_max(t) >= a + e^{-t} z)");
        cmd.app->add_option("--n", nx_n, "matrix size")->check(CLI::Range(1, 64));
        cmd.app->add_option("--t", nx_t, "time")->check(CLI::PositiveNumber);
        cmd.app->add_option("--z", nx_z, "conditioning depth");
        cmd.app->add_option("--a", nx_a, "level");
        cmd.app->add_option("--samples", nx_samples, "accepted samples")->check(CLI::PositiveNumber);
        cmd.run = [&] {
            const NonexplosionResult r = nonexplosion_experiment(nx_n, nx_t, nx_z, nx_a, nx_samples, c.seed);
            const double sigma = std::hypot(r.p_cond.stderr_, r.p_bound.stderr_);
            return Output{json{{"n", nx_n},
                               {"t", nx_t},
                               {"z", nx_z},
                               {"a", nx_a},
                               {"seed", c.seed},
                               {"p_cond", joint_json(r.p_cond)},
                               {"p_bound", joint_json(r.p_bound)},
                               {"acceptance_rate", r.acceptance_rate},
                               {"proposals", r.proposals},
                               {"holds_within_3sigma", r.p_cond.p_hat <= r.p_bound.p_hat + 3.0 * sigma}},
                          {}};
        };
    }

    // expansion
    double ex_u = -1.5, ex_v = -1.5;
    std::vector<double> ex_t{4, 6, 8};
    bool ex_cross = false;
    {
        Command& cmd = add("expansion", "large-t expansion of the two-time Airy distribution",
                           "P(A(0) <= u, A(t) <= v) = F(u)F(v) + F'(u)F'(v)/t^2 + (Phi(u,v) + Phi(v,u))/t^4 + O(t^-6)");
        cmd.app->add_option("--u", ex_u, "level at time 0");
        cmd.app->add_option("--v", ex_v, "level at time t");
        cmd.app->add_option("--t", ex_t, "time gaps in [2, 12]");
        cmd.app->add_flag("--cross-check", ex_cross, "also run the direct two-block determinant");
        cmd.run = [&] {
            const ExpansionReport r = expansion_report(ex_u, ex_v, ex_t, fredholm_config(c), ex_cross);
            json o{{"u", r.u},         {"v", r.v},         {"t_values", r.t_values}, {"joint", r.joint},
                   {"term0", r.term0}, {"term2", r.term2}, {"term4", r.term4},       {"scaled2", r.scaled2},
                   {"scaled3", r.scaled3}, {"scaled4", r.scaled4}};
            if (ex_cross) o["direct"] = r.direct;
            Table tab{{"t", "joint", "scaled2", "scaled3", "scaled4", "term2", "term4"}, {}};
            for (std::size_t i = 0; i < r.t_values.size(); ++i)
                tab.rows.push_back({r.t_values[i], r.joint[i], r.scaled2[i], r.scaled3[i], r.scaled4[i], r.term2, r.term4});
            return Output{o, tab};
        };
    }

    // covariance
    std::vector<double> cv_t{6};
    double cv_step = 0.25;
    {
        Command& cmd = add("covariance", "Cov(A(0), A(t)) by quadrature of the joint distribution",
                           "Cov(A(0), A(t)) = int int [P(A(0) <= u, A(t) <= v) - F(u)F(v)] du dv = 1/t^2 + c/t^4 + ...");
        cmd.default_format = "csv";
        cmd.app->add_option("--t", cv_t, "time gaps (>= 2)");
        cmd.app->add_option("--step", cv_step, "grid step (<= 0.25)");
        cmd.run = [&] {
            Table tab{{"t", "cov", "t2_cov", "t4_cov_minus_inv_t2", "tail_bound"}, {}};
            CovarianceGrid g;
            g.step = cv_step;
            for (double t : cv_t) {
                const CovarianceEstimate e = covariance_estimate(t, g, fredholm_config(c));
                tab.rows.push_back({t, e.cov, t * t * e.cov, t * t * t * t * (e.cov - 1.0 / (t * t)), e.tail_bound});
            }
            return Output{json(), tab};
        };
    }

    // --config is consumed here so file keys can be appended behind the flags.
    std::vector<std::string> args;
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
        const std::string& a = raw_args[i];
        if (a == "--config") {
            if (i + 1 >= raw_args.size()) {
                err << "--config requires a path\n";
                return kUsage;
            }
            config_path = raw_args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        } else {
            args.push_back(a);
        }
    }

    try {
        if (config_path) {
            const auto extra = config_flags(*config_path, args);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const Command* chosen = nullptr;
    for (const auto& [name, cmd] : cmds)
        if (cmd.app->parsed()) chosen = &cmd;

    if (c.describe) {
        out << chosen->app->get_name() << ": " << chosen->description << '\n';
        return kOk;
    }

    try {
        set_num_threads(c.jobs);
        const Output o = chosen->run();
        const std::string format = c.format.empty() ? chosen->default_format : c.format;
        if (c.output.empty()) {
            emit(o, format, out);
        } else {
            std::ofstream f(c.output);
            if (!f) {
                err << "cannot open " << c.output << '\n';
                return kUsage;
            }
            emit(o, format, f);
        }
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const AccuracyError& e) {
        err << "accuracy error: " << e.what() << " (achieved " << e.achieved() << ")\n";
        return kAccuracy;
    } catch (const SamplingError& e) {
        err << "sampling error: " << e.what() << " (rate " << e.observed_rate() << ")\n";
        return kAccuracy;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kAccuracy;
    }
    return kOk;
}

}  // namespace dasp::cli
