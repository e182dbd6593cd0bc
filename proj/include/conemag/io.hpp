#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "conemag/geometry.hpp"
#include "conemag/kernels.hpp"
#include "conemag/spectrum.hpp"
#include "conemag/verify.hpp"

namespace conemag {

struct NamedCone {
    std::string name;
    ConeConfig cfg;
};

struct RunConfig {
    std::vector<NamedCone> cones;       // every cone.<name> entry, in file order
    std::string active;                 // cone used by kernel and spectrum commands
    TruncationSpec trunc;
    Window window{8, 8};
    QuadratureSpec quad;
    TimeGrid time_grid;
    SpaceGrid space_grid;
    HeatGrid heat_grid;
    ReducedScanGrid reduced_grid;
    double reduced_R = kPi;
    int a_n_delta = 65;
    HalfwaveGrid halfwave_grid;
    std::vector<int> halfwave_j{1, 2, 3};
    std::vector<std::string> halfwave_cones;  // empty: the first cone only
    std::vector<double> subordination_z, subordination_y;
    int energy_trials = 50;
    std::string output_dir = "out";
    std::uint64_t seed = 20240601;

    const ConeConfig& cone(const std::string& name) const;
    const ConeConfig& active_cone() const { return cone(active); }
    void validate() const;
};

// Built-in defaults: the three reference cones and the sweep grids used by `verify all`.
RunConfig default_run_config();

// Flat "key = value" text; '#' starts a comment; later keys override earlier ones.
// Unknown keys and malformed values raise ConfigError.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Fixed-format number rendering shared by every CSV writer (round-trip exact).
std::string format_number(double v);

void write_csv(std::ostream& os, const SampleTable& table);
// JSON text of a report (runtime_ms only when include_runtime), with a trailing newline.
std::string report_json(const SweepReport& rep, bool include_runtime);

// Field CSV: header "k,m,re_c,im_c", one row per window mode.
void write_field_csv(std::ostream& os, const SpectralField& f);
SpectralField read_field_csv(std::istream& is);

// Sample CSV "r,theta,re,im" on a tensor grid of radii x uniform angles.
struct SampleGrid {
    std::vector<double> radii;
    int n_theta = 0;
    std::vector<std::complex<double>> values;  // values[i * n_theta + j]
};
SampleGrid read_sample_csv(std::istream& is, const ConeConfig& cfg);

}  // namespace conemag
