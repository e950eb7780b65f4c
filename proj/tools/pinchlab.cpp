#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinchlab/acceptance.hpp"
#include "pinchlab/io.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/scattering.hpp"
#include "pinchlab/surface.hpp"
#include "pinchlab/transform.hpp"
#include "pinchlab/zeta.hpp"

using namespace pinchlab;
using pinchlab::io::json;

namespace {

/// Everything a subcommand may read; filled by the parser, checked by validate().
struct RunConfig {
    std::string graph_path;
    std::string out = "-";
    std::string format = "auto";
    std::string edge;
    std::string lengths;
    std::string ells;
    std::vector<std::string> s_values;
    std::string sprime = "2";
    std::string s0 = "3";
    double ell = 1.0;
    double A = 0.2;
    double rmax = 6.0;
    double eps = 0.0;
    double tol = 0.0;
    double dedup_tol = 1e-8;
    double power = 2.0;
    double tmax = 20.0;
    int points = 400;
    int threads = 0;

    void validate() const {
        if (tol < 0.0) throw Error(ErrorKind::Usage, "--tol must be positive");
        if (rmax <= 0.0) throw Error(ErrorKind::Usage, "--rmax must be positive");
        if (points < 1) throw Error(ErrorKind::Usage, "--points must be at least 1");
        if (format != "json" && format != "csv" && format != "auto")
            throw Error(ErrorKind::Usage, "--format must be csv or json");
    }

    /// csv when --format csv, or when unset and the output file ends in .csv
    bool csv() const {
        if (format != "auto") return format == "csv";
        return out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0;
    }

    double tolerance_or(double fallback) const { return tol > 0.0 ? tol : fallback; }

    std::vector<cplx> s_grid() const {
        if (s_values.empty()) throw Error(ErrorKind::Usage, "--s is required");
        std::vector<cplx> out;
        for (const auto& v : s_values) out.push_back(io::parse_complex(v));
        return out;
    }

    cplx single_s() const {
        const auto g = s_grid();
        if (g.size() != 1) throw Error(ErrorKind::Usage, "exactly one --s value expected");
        return g.front();
    }

    std::vector<double> ell_grid() const {
        if (ells.empty()) throw Error(ErrorKind::Usage, "--ells is required");
        return io::parse_list(ells);
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// relative error bound from a bound on the log
double relative_bound(double log_error) { return std::expm1(log_error); }

io::GraphFile load_graph(const RunConfig& cfg) {
    io::GraphFile f = io::graph_from_json(io::read_json(cfg.graph_path));
    f.graph.validate();
    return f;
}

AssembledSurface surface_from(const RunConfig& cfg) {
    if (!cfg.graph_path.empty()) {
        const io::GraphFile f = load_graph(cfg);
        return assemble(f.graph, f.label);
    }
    if (!cfg.lengths.empty()) {
        const auto l = io::parse_list(cfg.lengths);
        if (l.size() != 3) throw Error(ErrorKind::Usage, "--lengths needs three values");
        return pants_surface(l[0], l[1], l[2]);
    }
    throw Error(ErrorKind::Usage, "either --graph or --lengths is required");
}

void write_sweep(const RunConfig& cfg, const std::vector<io::SweepRow>& rows) {
    io::write_file(cfg.out, cfg.csv() ? io::sweep_csv(rows) : dump(io::sweep_to_json(rows)));
}

/// Evaluates f on the (ell, s) grid in parallel, rows in input order.
template <class F>
std::vector<io::SweepRow> sweep(const std::vector<double>& ells, const std::vector<cplx>& ss, F f) {
    std::vector<io::SweepRow> rows(ells.size() * ss.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        io::SweepRow& r = rows[k];
        r.ell = ells[k / ss.size()];
        r.s = ss[k % ss.size()];
        f(r);
    });
    return rows;
}

// ---------------------------------------------------------------------------

int cmd_pants(const RunConfig& cfg) {
    const auto l = io::parse_list(cfg.lengths);
    if (l.size() != 3) throw Error(ErrorKind::Usage, "--lengths needs three values");
    io::write_file(cfg.out, dump(io::pants_to_json(build_pants(l[0], l[1], l[2]))));
    return 0;
}

int cmd_assemble(const RunConfig& cfg) {
    const io::GraphFile f = load_graph(cfg);
    const AssembledSurface s = assemble(f.graph, f.label);
    json j;
    const auto [p, n] = f.graph.type();
    j["type"] = {p, n};
    j["descriptor_hash"] = s.descriptor_hash;
    j["graph"] = io::graph_to_json(f.graph, f.label);
    j["components"] = json::array();
    for (const auto& c : s.components) {
        json comp;
        std::vector<std::string> verts;
        for (int v : c.vertices) verts.push_back(f.graph.vertices[v]);
        comp["vertices"] = verts;
        comp["root"] = f.graph.vertices[c.root];
        comp["generators"] = json::object();
        for (std::size_t k = 0; k < c.symbol_names.size(); ++k)
            comp["generators"][c.symbol_names[k]] = io::to_json(c.symbol_matrices[k]);
        comp["residual_relations"] = c.residual_relations.size();
        comp["core_radius"] = c.core_radius;
        j["components"].push_back(comp);
    }
    io::write_file(cfg.out, dump(j));
    return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
    const LengthSpectrum sp = length_spectrum(surface_from(cfg), cfg.rmax, cfg.dedup_tol);
    io::write_file(cfg.out, cfg.csv() ? io::spectrum_csv(sp) : dump(io::spectrum_to_json(sp)));
    return 0;
}

int cmd_zeta(const RunConfig& cfg) {
    const double tol = cfg.tolerance_or(1e-16);
    std::vector<io::SweepRow> rows;
    if (cfg.graph_path.empty() && cfg.lengths.empty()) {
        rows = sweep(cfg.ell_grid(), cfg.s_grid(), [&](io::SweepRow& r) {
            const ZetaResult z = zeta_factor_detail(r.ell, r.s, tol);
            r.value = z.value;
            r.err_bound = std::abs(z.value) * relative_bound(z.error);
        });
    } else {
        const LengthSpectrum sp = length_spectrum(surface_from(cfg), cfg.rmax, cfg.dedup_tol);
        rows = sweep({0.0}, cfg.s_grid(), [&](io::SweepRow& r) {
            const ZetaResult z = zeta_truncated_detail(sp, r.s, tol);
            r.value = z.value;
            r.err_bound = std::abs(z.value) * relative_bound(z.error);
        });
    }
    write_sweep(cfg, rows);
    return 0;
}

int cmd_zeta_sweep(const RunConfig& cfg) {
    io::GraphFile f = load_graph(cfg);
    if (cfg.edge.empty()) throw Error(ErrorKind::Usage, "--edge is required");
    const int e = f.graph.edge_index(cfg.edge);
    const double tol = cfg.tolerance_or(1e-16);
    const std::vector<double> ells = cfg.ell_grid();
    const std::vector<cplx> ss = cfg.s_grid();
    std::vector<io::SweepRow> rows(ells.size() * ss.size());
    // one spectrum per length; the s values reuse it
    for (std::size_t i = 0; i < ells.size(); ++i) {
        FNLabel label = f.label;
        EdgeLabel el = label.at(f.graph, e);
        el.ell = ells[i];
        label.labels.erase(cfg.edge);
        if (auto p = f.graph.edges[e].pair) label.labels.erase(*p);
        label.labels[cfg.edge] = el;
        const LengthSpectrum sp = length_spectrum(assemble(f.graph, label), cfg.rmax, cfg.dedup_tol);
        parallel_for(ss.size(), [&](std::size_t j) {
            io::SweepRow& r = rows[i * ss.size() + j];
            r.ell = ells[i];
            r.s = ss[j];
            const ZetaResult z = zeta_truncated_detail(sp, r.s, tol);
            const ZetaResult d = zeta_factor_detail(r.ell, r.s, tol);
            r.value = std::exp(z.log_value - d.log_value);
            r.err_bound = std::abs(r.value) * relative_bound(z.error + d.error);
        });
    }
    write_sweep(cfg, rows);
    return 0;
}

int cmd_pinch_asym(const RunConfig& cfg) {
    const auto rows = sweep(cfg.ell_grid(), cfg.s_grid(), [](io::SweepRow& r) {
        r.value = pinch_asymptotic(r.ell, r.s);
        r.err_bound = std::abs(r.value) * relative_bound(zeta_factor_detail(r.ell, r.s).error);
    });
    write_sweep(cfg, rows);
    return 0;
}

int cmd_lhp_ratio(const RunConfig& cfg) {
    const auto rows = sweep(cfg.ell_grid(), cfg.s_grid(), [](io::SweepRow& r) {
        r.value = lhp_reduction_ratio(r.ell, r.s);
        const double e = zeta_factor_detail(r.ell, r.s).error + zeta_factor_detail(r.ell, 1.0 - r.s).error;
        r.err_bound = std::abs(r.value) * relative_bound(e);
    });
    write_sweep(cfg, rows);
    return 0;
}

int cmd_cyl_scatter(const RunConfig& cfg, const Tolerances& defaults) {
    const cplx s = cfg.single_s();
    CylinderOptions opts;
    opts.eps = cfg.eps;
    const ScatteringPair p = cylinder_scattering(cfg.ell, s, opts);
    CylinderOptions narrow;
    narrow.eps = 2.0 / 3.0 * (cfg.eps > 0.0 ? cfg.eps : default_cutoff_width(cfg.ell));
    const ScatteringPair q = cylinder_scattering(cfg.ell, s, narrow);
    io::ScatteringResiduals r;
    r.dcalc = (p.D - d_from_c(p.C, p.iota, p.ell, s)).norm();
    r.symmetry = (p.C - p.C.transpose()).norm();
    r.commutation = (p.C * p.D.transpose() - p.D * p.C.transpose()).norm();
    r.chi_independence = std::max((p.C - q.C).norm(), (p.D - q.D).norm());
    json j = io::scattering_report(p, r);
    const IdentityReport ir = identity_residuals(p);
    j["residuals"]["cprime_symmetry"] = ir.cprime_symmetry;
    j["residuals"]["d_antisymmetric"] = ir.d_antisymmetric;
    const double tol = cfg.tolerance_or(defaults.quadrature);
    const bool pass = r.dcalc < tol && r.symmetry < tol && r.chi_independence < tol;
    j["tol"] = tol;
    j["pass"] = pass;
    io::write_file(cfg.out, dump(j));
    return pass ? 0 : 1;
}

int cmd_ms_check(const RunConfig& cfg, const Tolerances& defaults) {
    const cplx s = cfg.single_s();
    const cplx sp = io::parse_complex(cfg.sprime);
    CylinderOptions opts;
    opts.eps = cfg.eps;
    const double tol = cfg.tolerance_or(defaults.quadrature);
    json j;
    j["ell"] = cfg.ell;
    j["s"] = io::to_json(s);
    j["sprime"] = io::to_json(sp);
    j["A"] = cfg.A;
    j["entries"] = json::array();
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            const MaassSelbergCheck m = maass_selberg_residual(cfg.ell, s, sp, cfg.A, i, k, opts);
            worst = std::max(worst, m.residual);
            j["entries"].push_back(
                {{"i", i}, {"j", k}, {"lhs", io::to_json(m.lhs)}, {"rhs", io::to_json(m.rhs)}, {"residual", m.residual}});
        }
    j["residual"] = worst;
    j["tol"] = tol;
    j["pass"] = worst < tol;
    io::write_file(cfg.out, dump(j));
    return worst < tol ? 0 : 1;
}

int cmd_trace_check(const RunConfig& cfg, const Tolerances& defaults) {
    TraceConfig tc;
    tc.s = cfg.single_s();
    tc.s0 = io::parse_complex(cfg.s0);
    tc.A = cfg.A;
    const double tol = cfg.tolerance_or(defaults.quadrature);
    const TraceCheck c = cylinder_trace_check(cfg.ell, tc, 0.01 * tol);
    json j = io::trace_report(cfg.ell, tc, c);
    j["tol"] = tol;
    j["pass"] = c.residual < tol;
    io::write_file(cfg.out, dump(j));
    return c.residual < tol ? 0 : 1;
}

int cmd_transform_roundtrip(const RunConfig& cfg, const Tolerances& defaults) {
    const double p = cfg.power;
    const RealFunction k = [p](double t) { return cplx(std::pow(1.0 + t, -p)); };
    TransformSpec fwd;
    fwd.decay.rho = std::min(0.5, p - 1.0);
    if (fwd.decay.rho <= 0.0) throw Error(ErrorKind::Usage, "--power must exceed 1");
    const SelbergTriple a = transform_chain(k, ChainDirection::KtoH, fwd);
    TransformSpec back = fwd;
    back.input_support = a.h_support;
    const SelbergTriple b = transform_chain(a.h, ChainDirection::HtoK, back);
    const double tol = cfg.tolerance_or(defaults.quadrature);
    json j;
    j["kernel"] = "(1+t)^-" + io::format_double(p);
    j["tmax"] = cfg.tmax;
    j["samples"] = json::array();
    double worst = 0.0;
    for (int i = 0; i <= cfg.points; ++i) {
        const double t = cfg.tmax * i / cfg.points;
        const cplx back_k = b.k(t);
        const double r = std::abs(back_k - k(t));
        worst = std::max(worst, r);
        j["samples"].push_back({{"t", t}, {"k", io::to_json(k(t))}, {"round_trip", io::to_json(back_k)}});
    }
    j["h_support"] = io::format_double(a.h_support);
    j["sup_residual"] = worst;
    j["tol"] = tol;
    j["pass"] = worst < tol;
    io::write_file(cfg.out, dump(j));
    return worst < tol ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinchlab: hyperbolic surfaces, Selberg Zeta factors, cylinder scattering and trace checks"};
    app.require_subcommand(1);
    RunConfig cfg;
    const Tolerances defaults;

    auto out_opt = [&](CLI::App* c) { c->add_option("--out", cfg.out, "output file, - for stdout"); };
    auto format_opt = [&](CLI::App* c) {
        c->add_option("--format", cfg.format, "csv or json (default: csv for a .csv output file)")
            ->check(CLI::IsMember({"csv", "json"}));
    };
    auto tol_opt = [&](CLI::App* c) { c->add_option("--tol", cfg.tol, "tolerance override")->check(CLI::PositiveNumber); };
    auto s_opt = [&](CLI::App* c, bool required) {
        auto o = c->add_option("--s", cfg.s_values, "spectral parameter(s) re+imi");
        if (required) o->required();
    };
    app.add_option("--threads", cfg.threads, "worker threads (overrides PINCHLAB_THREADS)")->check(CLI::PositiveNumber);

    auto* pants = app.add_subcommand("pants", "generator matrices and hexagon data of a pair of pants");
    pants->add_option("--lengths", cfg.lengths, "l1,l2,l3")->required();
    out_opt(pants);

    auto* asmb = app.add_subcommand("assemble", "assemble a surface group from a graph JSON");
    asmb->add_option("--graph", cfg.graph_path)->required();
    out_opt(asmb);

    auto* spec = app.add_subcommand("spectrum", "primitive length spectrum up to --rmax");
    spec->add_option("--graph", cfg.graph_path);
    spec->add_option("--lengths", cfg.lengths, "pants lengths l1,l2,l3 instead of a graph");
    spec->add_option("--rmax", cfg.rmax);
    spec->add_option("--dedup-tol", cfg.dedup_tol);
    out_opt(spec);
    format_opt(spec);

    auto* zeta = app.add_subcommand("zeta", "single-geodesic factor (--ells) or truncated product (--graph/--lengths)");
    zeta->add_option("--ells", cfg.ells);
    zeta->add_option("--graph", cfg.graph_path);
    zeta->add_option("--lengths", cfg.lengths);
    zeta->add_option("--rmax", cfg.rmax);
    s_opt(zeta, true);
    out_opt(zeta);
    format_opt(zeta);
    tol_opt(zeta);

    auto* zsweep = app.add_subcommand("zeta-sweep", "Zeta quotient over a pinched edge length grid");
    zsweep->add_option("--graph", cfg.graph_path)->required();
    zsweep->add_option("--edge", cfg.edge)->required();
    zsweep->add_option("--ells", cfg.ells)->required();
    zsweep->add_option("--rmax", cfg.rmax);
    s_opt(zsweep, true);
    out_opt(zsweep);
    format_opt(zsweep);
    tol_opt(zsweep);

    auto* pinch = app.add_subcommand("pinch-asym", "Gamma(s)^2 Z_l(s) e^{pi^2/3l} l^{2s-1} on a grid");
    pinch->add_option("--ells", cfg.ells)->required();
    s_opt(pinch, true);
    out_opt(pinch);
    format_opt(pinch);

    auto* lhp = app.add_subcommand("lhp-ratio", "left half-plane reduction ratio on a grid");
    lhp->add_option("--ells", cfg.ells)->required();
    s_opt(lhp, true);
    out_opt(lhp);
    format_opt(lhp);

    auto* cyl = app.add_subcommand("cyl-scatter", "approximate scattering matrices of the elementary cylinder");
    cyl->add_option("--ell", cfg.ell)->required();
    s_opt(cyl, true);
    cyl->add_option("--eps", cfg.eps, "cut-off width (0: default)");
    out_opt(cyl);
    tol_opt(cyl);

    auto* ms = app.add_subcommand("ms-check", "Maass-Selberg residual on the elementary cylinder");
    ms->add_option("--ell", cfg.ell)->required();
    s_opt(ms, true);
    ms->add_option("--sprime", cfg.sprime);
    ms->add_option("--A", cfg.A);
    ms->add_option("--eps", cfg.eps);
    out_opt(ms);
    tol_opt(ms);

    auto* trace = app.add_subcommand("trace-check", "resolvent trace formula on an elementary cylinder");
    trace->add_option("--ell", cfg.ell);
    s_opt(trace, false);
    trace->add_option("--s0", cfg.s0);
    trace->add_option("--A", cfg.A);
    out_opt(trace);
    tol_opt(trace);

    auto* rt = app.add_subcommand("transform-roundtrip", "k -> h -> k round trip for k(t) = (1+t)^-power");
    rt->add_option("--power", cfg.power);
    rt->add_option("--tmax", cfg.tmax);
    rt->add_option("--points", cfg.points);
    out_opt(rt);
    tol_opt(rt);

    auto* self = app.add_subcommand("selfcheck", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.validate();
        if (cfg.threads > 0) setenv("PINCHLAB_THREADS", std::to_string(cfg.threads).c_str(), 1);
        if (*trace && cfg.s_values.empty()) cfg.s_values = {"2"};

        if (*pants) return cmd_pants(cfg);
        if (*asmb) return cmd_assemble(cfg);
        if (*spec) return cmd_spectrum(cfg);
        if (*zeta) return cmd_zeta(cfg);
        if (*zsweep) return cmd_zeta_sweep(cfg);
        if (*pinch) return cmd_pinch_asym(cfg);
        if (*lhp) return cmd_lhp_ratio(cfg);
        if (*cyl) return cmd_cyl_scatter(cfg, defaults);
        if (*ms) return cmd_ms_check(cfg, defaults);
        if (*trace) return cmd_trace_check(cfg, defaults);
        if (*rt) return cmd_transform_roundtrip(cfg, defaults);
        if (*self) return run_acceptance(std::cout, defaults);
    } catch (const Error& e) {
        std::cerr << io::error_json(e).dump() << '\n';
        return e.kind() == ErrorKind::Usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << io::error_json("internal", e.what()).dump() << '\n';
        return 1;
    }
    return 2;
}
