#include "conemag/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "conemag/errors.hpp"

namespace conemag {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("config: '" + key + "' expects an integer");
    return static_cast<int>(d);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& x : split(v, ',')) out.push_back(to_double(key, x));
    return out;
}

}  // namespace

const ConeConfig& RunConfig::cone(const std::string& name) const {
    for (const auto& c : cones) {
        if (c.name == name) return c.cfg;
    }
    throw ConfigError("config: no cone named '" + name + "'");
}

void RunConfig::validate() const {
    if (cones.empty()) throw ConfigError("config: at least one cone.<name> entry is required");
    (void)active_cone();
    for (const auto& n : halfwave_cones) (void)cone(n);
    trunc.validate();
    if (window.k_max < 0 || window.m_max < 0) throw ConfigError("config: window sizes must be nonnegative");
    if (quad.n_rad < 1 || quad.n_theta < 1) throw ConfigError("config: quadrature sizes must be positive");
    if (space_grid.n_r < 2 || space_grid.n_theta < 1 || !(space_grid.r_min > 0.0) ||
        !(space_grid.r_max > space_grid.r_min)) {
        throw ConfigError("config: bad grid.space");
    }
    if (heat_grid.times.empty() || heat_grid.space.n_r < 2 || !(heat_grid.space.r_min > 0.0) ||
        !(heat_grid.space.r_max > heat_grid.space.r_min)) {
        throw ConfigError("config: bad grid.heat");
    }
    for (double t : heat_grid.times) {
        if (!(t > 0.0)) throw ConfigError("config: grid.heat.times must be positive");
    }
    if (!(reduced_R > 0.0)) throw ConfigError("config: grid.reduced.R must be positive");
    if (subordination_z.empty() || subordination_y.empty()) throw ConfigError("config: empty subordination grid");
    if (energy_trials < 1) throw ConfigError("config: grid.energy.trials must be positive");
    if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
}

RunConfig default_run_config() {
    RunConfig rc;
    rc.cones = {{"ref1", ConeConfig(1.0, 1.0, 0.25)},
                {"ref2", ConeConfig(1.5, 1.0, 0.4)},
                {"ref3", ConeConfig(2.0, 0.5, 0.3)}};
    rc.active = "ref1";
    rc.subordination_z = log_points(10, 0.1, 10.0);
    rc.subordination_y = log_points(10, 0.01, 10.0);
    return rc;
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig rc = default_run_config();
    bool cones_reset = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto num = [](double& dst) -> Setter { return [&dst](const std::string& k, const std::string& v) { dst = to_double(k, v); }; };
    auto integer = [](int& dst) -> Setter { return [&dst](const std::string& k, const std::string& v) { dst = to_int(k, v); }; };
    const std::map<std::string, Setter> setters = {
        {"active", [&](const std::string&, const std::string& v) { rc.active = v; }},
        {"output_dir", [&](const std::string&, const std::string& v) { rc.output_dir = v; }},
        {"seed",
         [&](const std::string& k, const std::string& v) {
             const double d = to_double(k, v);
             if (d < 0.0 || d != std::floor(d) || d > 9.0e15) throw ConfigError("config: seed must be a nonnegative integer");
             rc.seed = static_cast<std::uint64_t>(d);
         }},
        {"trunc.k_max", integer(rc.trunc.k_max)},
        {"trunc.quad_nodes", integer(rc.trunc.quad_nodes)},
        {"trunc.s_max", num(rc.trunc.s_max)},
        {"window.k_max", integer(rc.window.k_max)},
        {"window.m_max", integer(rc.window.m_max)},
        {"quad.n_rad", integer(rc.quad.n_rad)},
        {"quad.n_theta", integer(rc.quad.n_theta)},
        {"grid.time.n_t", integer(rc.time_grid.n_t)},
        {"grid.time.sin_floor", num(rc.time_grid.sin_floor)},
        {"grid.space.n_r", integer(rc.space_grid.n_r)},
        {"grid.space.r_min", num(rc.space_grid.r_min)},
        {"grid.space.r_max", num(rc.space_grid.r_max)},
        {"grid.space.n_theta", integer(rc.space_grid.n_theta)},
        {"grid.heat.times", [&](const std::string& k, const std::string& v) { rc.heat_grid.times = to_doubles(k, v); }},
        {"grid.heat.n_r", integer(rc.heat_grid.space.n_r)},
        {"grid.heat.r_min", num(rc.heat_grid.space.r_min)},
        {"grid.heat.r_max", num(rc.heat_grid.space.r_max)},
        {"grid.heat.n_theta", integer(rc.heat_grid.space.n_theta)},
        {"grid.reduced.rho_step", num(rc.reduced_grid.rho_step)},
        {"grid.reduced.rho_start", num(rc.reduced_grid.rho_start)},
        {"grid.reduced.rho_cap", num(rc.reduced_grid.rho_cap)},
        {"grid.reduced.n_delta", integer(rc.reduced_grid.n_delta)},
        {"grid.reduced.R", num(rc.reduced_R)},
        {"grid.a.n_delta", integer(rc.a_n_delta)},
        {"grid.halfwave.n_t", integer(rc.halfwave_grid.n_t)},
        {"grid.halfwave.radial_per_scale", integer(rc.halfwave_grid.radial_per_scale)},
        {"grid.halfwave.n_p", integer(rc.halfwave_grid.n_p)},
        {"grid.halfwave.oversample", integer(rc.halfwave_grid.oversample)},
        {"grid.halfwave.j",
         [&](const std::string& k, const std::string& v) {
             rc.halfwave_j.clear();
             for (const auto& x : split(v, ',')) rc.halfwave_j.push_back(to_int(k, x));
         }},
        {"grid.halfwave.cones", [&](const std::string&, const std::string& v) { rc.halfwave_cones = split(v, ','); }},
        {"grid.subordination.z",
         [&](const std::string& k, const std::string& v) {
             const auto p = to_doubles(k, v);
             if (p.size() != 3) throw ConfigError("config: grid.subordination.z = lo, hi, n");
             rc.subordination_z = log_points(static_cast<int>(p[2]), p[0], p[1]);
         }},
        {"grid.subordination.y",
         [&](const std::string& k, const std::string& v) {
             const auto p = to_doubles(k, v);
             if (p.size() != 3) throw ConfigError("config: grid.subordination.y = lo, hi, n");
             rc.subordination_y = log_points(static_cast<int>(p[2]), p[0], p[1]);
         }},
        {"grid.energy.trials", integer(rc.energy_trials)},
    };

    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("cone.", 0) == 0) {
            const auto p = to_doubles(key, value);
            if (p.size() != 3) throw ConfigError("config: " + key + " = sigma, alpha, b0");
            if (!cones_reset) {
                rc.cones.clear();
                cones_reset = true;
            }
            const std::string name = key.substr(5);
            if (name.empty()) throw ConfigError("config: empty cone name");
            NamedCone nc{name, ConeConfig(p[0], p[2], p[1])};
            auto it = std::find_if(rc.cones.begin(), rc.cones.end(), [&](const NamedCone& c) { return c.name == name; });
            if (it != rc.cones.end()) {
                *it = nc;
            } else {
                rc.cones.push_back(nc);
            }
            continue;
        }
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(key, value);
    }
    if (cones_reset && std::none_of(rc.cones.begin(), rc.cones.end(), [&](const NamedCone& c) { return c.name == rc.active; })) {
        rc.active = rc.cones.front().name;
    }
    rc.validate();
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const SampleTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);  // JSON has no NaN or infinity
}

nlohmann::ordered_json to_json(const SweepReport& rep, bool include_runtime) {
    nlohmann::ordered_json j;
    j["name"] = rep.name;
    j["config"] = {{"sigma", rep.config.sigma()}, {"alpha", rep.config.alpha()}, {"b0", rep.config.b0()}};
    j["grid_spec"] = rep.grid_spec;
    j["empirical_constant"] = number(rep.empirical_constant);
    j["refinement_ratio"] = number(rep.refinement_ratio);
    j["pass"] = rep.pass;
    if (include_runtime) j["runtime_ms"] = rep.runtime_ms;
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.extras) extras[k] = number(v);
    j["extras"] = extras;
    if (!rep.parts.empty()) {
        j["parts"] = nlohmann::ordered_json::array();
        for (const auto& p : rep.parts) j["parts"].push_back(to_json(p, include_runtime));
    }
    return j;
}

}  // namespace

std::string report_json(const SweepReport& rep, bool include_runtime) {
    return to_json(rep, include_runtime).dump(2) + "\n";
}

void write_field_csv(std::ostream& os, const SpectralField& f) {
    os << "k,m,re_c,im_c\n";
    const Window& w = f.window();
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) {
            const auto c = f.at(k, m);
            os << k << ',' << m << ',' << format_number(c.real()) << ',' << format_number(c.imag()) << '\n';
        }
    }
}

namespace {

std::vector<std::vector<std::string>> read_rows(std::istream& is, const std::vector<std::string>& header) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("CSV input is empty");
    if (split(trim(line), ',') != header) {
        std::string want;
        for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
        throw ConfigError("CSV header must be '" + want + "'");
    }
    std::vector<std::vector<std::string>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) throw ConfigError("CSV line " + std::to_string(lineno) + ": wrong column count");
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

SpectralField read_field_csv(std::istream& is) {
    const auto rows = read_rows(is, {"k", "m", "re_c", "im_c"});
    int kmax = 0, mmax = 0;
    std::vector<std::tuple<int, int, std::complex<double>>> entries;
    for (const auto& r : rows) {
        const int k = to_int("k", r[0]);
        const int m = to_int("m", r[1]);
        if (m < 0) throw ConfigError("field CSV: m must be nonnegative");
        entries.emplace_back(k, m, std::complex<double>(to_double("re_c", r[2]), to_double("im_c", r[3])));
        kmax = std::max(kmax, std::abs(k));
        mmax = std::max(mmax, m);
    }
    if (entries.empty()) throw ConfigError("field CSV has no rows");
    SpectralField f(Window{kmax, mmax});
    for (const auto& [k, m, c] : entries) f.set(k, m, c);
    return f;
}

SampleGrid read_sample_csv(std::istream& is, const ConeConfig& cfg) {
    const auto rows = read_rows(is, {"r", "theta", "re", "im"});
    std::set<double> rs;
    std::map<std::pair<double, double>, std::complex<double>> vals;
    std::set<double> ths;
    for (const auto& r : rows) {
        const double rr = to_double("r", r[0]);
        const double th = to_double("theta", r[1]);
        if (!(rr > 0.0)) throw ConfigError("sample CSV: radii must be positive");
        rs.insert(rr);
        ths.insert(th);
        vals[{rr, th}] = {to_double("re", r[2]), to_double("im", r[3])};
    }
    SampleGrid g;
    g.radii.assign(rs.begin(), rs.end());
    g.n_theta = static_cast<int>(ths.size());
    if (g.radii.size() < 2 || g.n_theta < 1) throw ConfigError("sample CSV: need at least two radii");
    if (vals.size() != g.radii.size() * ths.size() || rows.size() != vals.size()) {
        throw ConfigError("sample CSV: samples must form a complete tensor grid without duplicates");
    }
    std::vector<double> th(ths.begin(), ths.end());
    for (int j = 0; j < g.n_theta; ++j) {
        const double want = cfg.period() * j / g.n_theta;
        if (std::abs(th[j] - want) > 1e-9 * cfg.period()) {
            throw ConfigError("sample CSV: angles must be j * 2 sigma pi / n_theta");
        }
    }
    for (double r : g.radii) {
        for (double t : th) g.values.push_back(vals.at({r, t}));
    }
    return g;
}

}  // namespace conemag
