// Command-line front end: kernel evaluation, spectral tables and fields, verification sweeps.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conemag/errors.hpp"
#include "conemag/io.hpp"
#include "conemag/kernels.hpp"
#include "conemag/lpbesov.hpp"
#include "conemag/spectrum.hpp"
#include "conemag/verify.hpp"

namespace fs = std::filesystem;
using namespace conemag;

namespace {

struct Globals {
    std::string config_path;
    std::string cone;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool json = false;
    bool timing = false;
};

RunConfig load(const Globals& g) {
    RunConfig rc = g.config_path.empty() ? default_run_config() : load_run_config(g.config_path);
    if (!g.cone.empty()) rc.active = g.cone;
    if (!g.out.empty()) rc.output_dir = g.out;
    if (g.seed_set) rc.seed = g.seed;
    rc.validate();
    return rc;
}

fs::path ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory '" + p.string() + "'");
    return p;
}

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream os(p, std::ios::out | mode);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

ConePoint parse_point(const std::string& s, const ConeConfig& cfg) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("points are given as r,theta (theta in radians)");
    try {
        return ConePoint(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)), cfg);
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse point '" + s + "'");
    }
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
    std::string kind;
    std::string repr = "series";
    double t = 1.0;
    std::string p = "1,0";
    std::string q = "1,0";
    int j = 2;
};

constexpr const char* kKernelHeader = "kind,repr,t,r1,th1,r2,th2,re,im,largest_term,k_max_used,rel_diff";

int cmd_kernel(const Globals& g, const KernelArgs& a) {
    const RunConfig rc = load(g);
    const ConeConfig& cfg = rc.active_cone();
    const ConePoint p = parse_point(a.p, cfg);
    const ConePoint q = parse_point(a.q, cfg);

    struct Row {
        std::string repr;
        KernelValue v;
    };
    std::vector<Row> rows;
    auto eval = [&](const std::string& repr) {
        if (a.kind == "heat") {
            if (repr == "series") return heat_kernel_series(a.t, p, q, cfg, rc.trunc);
            if (repr == "closed") return heat_kernel_closed(a.t, p, q, cfg, rc.trunc);
            if (repr == "spectral") return heat_kernel_spectral(a.t, p, q, cfg, rc.window);
        } else if (a.kind == "schrodinger") {
            if (repr == "series") return schrodinger_kernel_series(a.t, p, q, cfg, rc.trunc);
            if (repr == "closed") return schrodinger_kernel_closed(a.t, p, q, cfg, rc.trunc);
            throw ConfigError("schrodinger kernel: the eigenfunction sum does not converge; use series or closed");
        } else if (a.kind == "halfwave") {
            if (repr != "spectral") throw ConfigError("halfwave kernel is available as --repr spectral only");
            const HalfwaveKernel hk(a.j, cfg, {p.r(), q.r()});
            KernelValue v;
            v.value = hk(a.t, 0, 1, p.theta() - q.theta());
            v.truncation.k_max = hk.window().k_max;
            return v;
        }
        throw ConfigError("unknown kernel kind '" + a.kind + "'");
    };
    if (a.repr == "both") {
        if (a.kind == "halfwave") throw ConfigError("halfwave kernel has a single representation");
        rows.push_back({"series", eval("series")});
        rows.push_back({"closed", eval("closed")});
    } else {
        rows.push_back({a.repr, eval(a.repr)});
    }
    double rel = std::nan("");
    if (rows.size() == 2) {
        rel = std::abs(rows[0].v.value - rows[1].v.value) / std::abs(rows[0].v.value);
    }

    const fs::path dir = ensure_dir(rc.output_dir);
    const fs::path csv = dir / "kernel.csv";
    const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
    std::ofstream os = open_out(csv, std::ios::app);
    if (fresh) os << kKernelHeader << '\n';
    std::ostringstream text;
    text << kKernelHeader << '\n';
    nlohmann::ordered_json js = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        std::ostringstream line;
        line << a.kind << ',' << r.repr << ',' << format_number(a.t) << ',' << format_number(p.r()) << ','
             << format_number(p.theta()) << ',' << format_number(q.r()) << ',' << format_number(q.theta()) << ','
             << format_number(r.v.value.real()) << ',' << format_number(r.v.value.imag()) << ','
             << format_number(r.v.largest_term) << ',' << r.v.truncation.k_max << ','
             << (rows.size() == 2 ? format_number(rel) : "");
        os << line.str() << '\n';
        text << line.str() << '\n';
        js.push_back({{"kind", a.kind},
                      {"repr", r.repr},
                      {"t", a.t},
                      {"p", {p.r(), p.theta()}},
                      {"q", {q.r(), q.theta()}},
                      {"re", r.v.value.real()},
                      {"im", r.v.value.imag()},
                      {"largest_term", r.v.largest_term},
                      {"cancellation_digits",
                       r.v.largest_term > 0.0 && std::abs(r.v.value) > 0.0
                           ? std::log10(r.v.largest_term / std::abs(r.v.value))
                           : 0.0},
                      {"k_max_used", r.v.truncation.k_max}});
        if (rows.size() == 2) js.back()["rel_diff"] = rel;
    }
    if (g.json) {
        std::cout << js.dump(2) << '\n';
    } else {
        std::cout << text.str();
    }
    return 0;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    std::string action;
    std::string in;
    std::string field;
    std::string field_out;
    std::string mult = "heat";
    double t = 1.0;
    int j = -1000;
    double nu = 0.5;
};

Multiplier named_multiplier(const SpectrumArgs& a) {
    if (a.mult == "heat") {
        if (!(a.t >= 0.0)) throw ConfigError("heat multiplier needs t >= 0");
        return heat_multiplier(a.t);
    }
    if (a.mult == "schrodinger") return schrodinger_multiplier(a.t);
    if (a.mult == "fractional") return fractional_multiplier(a.nu, a.t);
    if (a.mult == "halfwave") {
        if (a.j == -1000) return halfwave_multiplier(a.t);
        const DyadicCutoff phi;
        const int j = a.j;
        const double t = a.t;
        return [phi, j, t](double lam) { return phi.shell(j, std::sqrt(lam)) * std::polar(1.0, t * std::sqrt(lam)); };
    }
    throw ConfigError("unknown multiplier '" + a.mult + "'");
}

int cmd_spectrum(const Globals& g, const SpectrumArgs& a) {
    const RunConfig rc = load(g);
    const ConeConfig& cfg = rc.active_cone();
    const fs::path dir = ensure_dir(rc.output_dir);
    if (a.action == "table") {
        std::ostringstream os;
        os << "k,m,lambda,norm_sq\n";
        nlohmann::ordered_json js = nlohmann::ordered_json::array();
        for (int k = -rc.window.k_max; k <= rc.window.k_max; ++k) {
            for (int m = 0; m <= rc.window.m_max; ++m) {
                const ModeData d = mode_data({k, m}, cfg);
                os << k << ',' << m << ',' << format_number(d.lambda) << ',' << format_number(d.norm_sq) << '\n';
                js.push_back({{"k", k}, {"m", m}, {"lambda", d.lambda}, {"norm_sq", d.norm_sq}});
            }
        }
        open_out(dir / "spectrum_table.csv") << os.str();
        std::cout << (g.json ? js.dump(2) + "\n" : os.str());
        return 0;
    }
    SpectralField result;
    fs::path target;
    if (a.action == "expand") {
        std::ifstream in(a.in);
        if (a.in.empty() || !in) throw ConfigError("spectrum expand needs a readable --in sample CSV");
        const SampleGrid s = read_sample_csv(in, cfg);
        result = expand_samples(s.radii, s.n_theta, s.values, rc.window, cfg);
        target = a.field_out.empty() ? dir / "field.csv" : fs::path(a.field_out);
    } else if (a.action == "evolve") {
        std::ifstream in(a.field);
        if (a.field.empty() || !in) throw ConfigError("spectrum evolve needs a readable --field CSV");
        const SpectralField f = read_field_csv(in);
        result = spectral_apply(named_multiplier(a), f, cfg);
        target = a.field_out.empty() ? dir / "field_evolved.csv" : fs::path(a.field_out);
    } else {
        throw ConfigError("unknown spectrum action '" + a.action + "'");
    }
    std::ostringstream os;
    write_field_csv(os, result);
    open_out(target) << os.str();
    if (g.json) {
        nlohmann::ordered_json js = {{"action", a.action},
                                     {"field", target.string()},
                                     {"k_max", result.window().k_max},
                                     {"m_max", result.window().m_max},
                                     {"l2_norm", result.l2_norm()}};
        std::cout << js.dump(2) << '\n';
    } else {
        std::cout << os.str();
    }
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string suite = "all";
    std::vector<double> gamma;
    std::vector<int> j;
};

struct Emitted {
    std::string cone;
    SweepReport rep;
};

std::string gamma_label(double gamma, double kappa) {
    std::ostringstream os;
    os << "weighted_dispersive_g" << format_number(gamma / kappa) << "k";
    return os.str();
}

int cmd_verify(const Globals& g, const VerifyArgs& a) {
    const RunConfig rc = load(g);
    static const std::set<std::string> suites = {"all",      "dispersive", "weighted", "gaussian",     "reduced",
                                                 "a-l1",     "halfwave",   "energy",   "subordination"};
    if (!suites.count(a.suite)) throw ConfigError("unknown verify suite '" + a.suite + "'");
    const bool all = a.suite == "all";
    std::vector<Emitted> out;
    auto want = [&](const char* s) { return all || a.suite == s; };

    for (const auto& nc : rc.cones) {
        const ConeConfig& cfg = nc.cfg;
        const double kappa = kappa_sigma(cfg).kappa;
        if (want("dispersive") || want("weighted")) {
            std::vector<double> gammas;
            if (!a.gamma.empty()) {
                gammas = a.gamma;
            } else if (a.suite == "weighted") {
                gammas = {0.0, 0.5 * kappa, kappa};
            } else if (all) {
                gammas = {0.0, 0.5 * kappa, kappa};
            } else {
                gammas = {0.0};
            }
            auto reps = weighted_dispersive_family(cfg, gammas, rc.time_grid, rc.space_grid, rc.trunc);
            for (std::size_t i = 0; i < reps.size(); ++i) {
                if (gammas[i] == 0.0 && (all || a.suite == "dispersive")) {
                    SweepReport d = reps[i];
                    d.name = "dispersive";
                    d.extras.clear();
                    out.push_back({nc.name, d});
                    if (!all && a.suite == "dispersive" && a.gamma.empty()) continue;
                }
                if (gammas[i] == 0.0 && all) continue;
                reps[i].name = gamma_label(gammas[i], kappa);
                out.push_back({nc.name, reps[i]});
            }
        }
        if (want("gaussian")) out.push_back({nc.name, gaussian_heat_constant(cfg, rc.heat_grid, rc.trunc)});
        if (want("reduced")) {
            out.push_back({nc.name, reduced_kernel_bound_scan(cfg, rc.reduced_R, rc.reduced_grid, rc.trunc)});
        }
        if (want("a-l1")) out.push_back({nc.name, a_integrand_l1_bound(cfg, rc.a_n_delta)});
        if (want("energy")) out.push_back({nc.name, energy_conservation_check(cfg, rc.window, rc.energy_trials, rc.seed)});
        if (want("halfwave")) {
            const bool selected = rc.halfwave_cones.empty()
                                      ? nc.name == rc.cones.front().name
                                      : std::count(rc.halfwave_cones.begin(), rc.halfwave_cones.end(), nc.name) > 0;
            if (selected) {
                for (int j : a.j.empty() ? rc.halfwave_j : a.j) {
                    out.push_back({nc.name, halfwave_decay_fit(cfg, j, rc.halfwave_grid)});
                }
            }
        }
    }
    if (want("subordination")) {
        out.push_back({"", subordination_identity_check(rc.subordination_z, rc.subordination_y)});
    }

    const fs::path root = ensure_dir(fs::path(rc.output_dir) / "verify");
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    bool ok = true;
    for (const auto& e : out) {
        const fs::path dir = ensure_dir(e.cone.empty() ? root : root / e.cone);
        {
            std::ofstream os = open_out(dir / (e.rep.name + ".csv"));
            write_csv(os, e.rep.samples);
        }
        open_out(dir / (e.rep.name + ".json")) << report_json(e.rep, g.timing);
        ok = ok && e.rep.pass;
        nlohmann::ordered_json s = {{"cone", e.cone},
                                    {"name", e.rep.name},
                                    {"pass", e.rep.pass},
                                    {"empirical_constant", format_number(e.rep.empirical_constant)},
                                    {"refinement_ratio", format_number(e.rep.refinement_ratio)}};
        if (g.timing) s["runtime_ms"] = e.rep.runtime_ms;
        summary.push_back(s);
        if (!g.json) {
            std::cout << (e.rep.pass ? "PASS " : "FAIL ") << (e.cone.empty() ? "-" : e.cone) << ' ' << e.rep.name
                      << " constant=" << format_number(e.rep.empirical_constant)
                      << " ratio=" << format_number(e.rep.refinement_ratio);
            if (g.timing) std::cout << " runtime_ms=" << e.rep.runtime_ms;
            std::cout << '\n';
        }
    }
    open_out(root / "summary.json") << summary.dump(2) << '\n';
    if (g.json) std::cout << summary.dump(2) << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic Aharonov-Bohm operator on a product cone: kernels, spectra, verification sweeps"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Run configuration file (key = value)");
    app.add_option("--cone", g.cone, "Name of the cone.<name> entry used by kernel and spectrum");
    app.add_option("--out", g.out, "Output directory (overrides output_dir)");
    auto* seed = app.add_option("--seed", g.seed, "Random seed (overrides seed)");
    app.add_flag("--json", g.json, "Print machine-readable JSON");
    app.add_flag("--timing", g.timing, "Include wall-clock runtimes in reports");

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "Evaluate a propagator kernel at one pair of points");
    kernel->add_option("kind", ka.kind, "heat | schrodinger | halfwave")
        ->required()
        ->check(CLI::IsMember({"heat", "schrodinger", "halfwave"}));
    kernel->add_option("--repr", ka.repr, "series | closed | spectral | both")
        ->check(CLI::IsMember({"series", "closed", "spectral", "both"}));
    kernel->add_option("--t", ka.t, "Time");
    kernel->add_option("--p", ka.p, "First point r,theta");
    kernel->add_option("--q", ka.q, "Second point r,theta");
    kernel->add_option("--j", ka.j, "Dyadic shell of the half-wave kernel");

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue tables, expansions and spectral multipliers");
    spectrum->add_option("action", sa.action, "table | expand | evolve")
        ->required()
        ->check(CLI::IsMember({"table", "expand", "evolve"}));
    spectrum->add_option("--in", sa.in, "Sample CSV (r,theta,re,im) for expand");
    spectrum->add_option("--field", sa.field, "Field CSV (k,m,re_c,im_c) for evolve");
    spectrum->add_option("--field-out", sa.field_out, "Where to write the resulting field CSV");
    spectrum->add_option("--mult", sa.mult, "heat | schrodinger | halfwave | fractional")
        ->check(CLI::IsMember({"heat", "schrodinger", "halfwave", "fractional"}));
    spectrum->add_option("--t", sa.t, "Time parameter of the multiplier");
    spectrum->add_option("--j", sa.j, "Dyadic shell for the half-wave multiplier");
    spectrum->add_option("--nu", sa.nu, "Exponent of the fractional multiplier");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run verification sweeps; exit 1 if any fails");
    verify->add_option("suite", va.suite,
                       "all | dispersive | weighted | gaussian | reduced | a-l1 | halfwave | energy | subordination");
    verify->add_option("--gamma", va.gamma, "Weights for the weighted dispersive sweep");
    verify->add_option("--j", va.j, "Dyadic shells for the half-wave sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    g.seed_set = seed->count() > 0;

    try {
        if (*kernel) return cmd_kernel(g, ka);
        if (*spectrum) return cmd_spectrum(g, sa);
        if (*verify) return cmd_verify(g, va);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
