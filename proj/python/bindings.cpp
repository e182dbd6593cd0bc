#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "conemag/errors.hpp"
#include "conemag/geometry.hpp"
#include "conemag/io.hpp"
#include "conemag/kernels.hpp"
#include "conemag/lpbesov.hpp"
#include "conemag/spectrum.hpp"
#include "conemag/verify.hpp"

namespace py = pybind11;
using namespace conemag;

namespace {

using Point = std::pair<double, double>;

ConePoint to_point(const Point& p, const ConeConfig& cfg) { return ConePoint(p.first, p.second, cfg); }

KernelValue heat_kernel(const ConeConfig& cfg, double t, const Point& p, const Point& q, const std::string& repr,
                        const TruncationSpec& trunc, const Window& window) {
    const ConePoint a = to_point(p, cfg), b = to_point(q, cfg);
    if (repr == "series") return heat_kernel_series(t, a, b, cfg, trunc);
    if (repr == "closed") return heat_kernel_closed(t, a, b, cfg, trunc);
    if (repr == "spectral") return heat_kernel_spectral(t, a, b, cfg, window);
    throw ConfigError("repr must be series, closed or spectral");
}

KernelValue schrodinger_kernel(const ConeConfig& cfg, double t, const Point& p, const Point& q,
                               const std::string& repr, const TruncationSpec& trunc) {
    const ConePoint a = to_point(p, cfg), b = to_point(q, cfg);
    if (repr == "series") return schrodinger_kernel_series(t, a, b, cfg, trunc);
    if (repr == "closed") return schrodinger_kernel_closed(t, a, b, cfg, trunc);
    throw ConfigError("repr must be series or closed");
}

Multiplier named_multiplier(const std::string& kind, double t, double nu) {
    if (kind == "heat") return heat_multiplier(t);
    if (kind == "schrodinger") return schrodinger_multiplier(t);
    if (kind == "halfwave") return halfwave_multiplier(t);
    if (kind == "fractional") return fractional_multiplier(nu, t);
    throw ConfigError("unknown multiplier: " + kind);
}

// Coefficients as a (2 k_max + 1, m_max + 1) array, row k + k_max.
py::array_t<std::complex<double>> coeff_array(const SpectralField& f) {
    const Window& w = f.window();
    py::array_t<std::complex<double>> a({2 * w.k_max + 1, w.m_max + 1});
    auto view = a.mutable_unchecked<2>();
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) view(k + w.k_max, m) = f.at(k, m);
    }
    return a;
}

SpectralField field_from_array(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) % 2 == 0) {
        throw ConfigError("coefficient array must have shape (2 k_max + 1, m_max + 1)");
    }
    const Window w{static_cast<int>((a.shape(0) - 1) / 2), static_cast<int>(a.shape(1) - 1)};
    SpectralField f(w);
    auto view = a.unchecked<2>();
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) f.set(k, m, view(k + w.k_max, m));
    }
    return f;
}

}  // namespace

PYBIND11_MODULE(_conemag, mod) {
    mod.doc() = "Magnetic Schrodinger operator with an Aharonov-Bohm flux on a product cone";

    auto base = py::register_exception<Error>(mod, "ConeMagError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
    py::register_exception<DomainError>(mod, "DomainError", base.ptr());
    py::register_exception<QuadratureError>(mod, "QuadratureError", base.ptr());
    py::register_exception<WindowTooSmallError>(mod, "WindowTooSmallError", base.ptr());
    py::register_exception<GammaOutOfRangeError>(mod, "GammaOutOfRangeError", base.ptr());
    py::register_exception<SingularTimeError>(mod, "SingularTimeError", base.ptr());
    py::register_exception<NonconvergenceError>(mod, "NonconvergenceError", base.ptr());

    py::class_<ConeConfig>(mod, "ConeConfig")
        .def(py::init<double, double, double>(), py::arg("sigma"), py::arg("b0"), py::arg("alpha"))
        .def_property_readonly("sigma", &ConeConfig::sigma)
        .def_property_readonly("b0", &ConeConfig::b0)
        .def_property_readonly("alpha", &ConeConfig::alpha)
        .def_property_readonly("period", &ConeConfig::period)
        .def("__repr__", [](const ConeConfig& c) {
            return "ConeConfig(sigma=" + format_number(c.sigma()) + ", b0=" + format_number(c.b0()) +
                   ", alpha=" + format_number(c.alpha()) + ")";
        });

    mod.def("angular_difference", &angular_difference, py::arg("t1"), py::arg("t2"), py::arg("cfg"));
    mod.def(
        "cone_distance",
        [](const Point& p, const Point& q, const ConeConfig& cfg) {
            return cone_distance(to_point(p, cfg), to_point(q, cfg), cfg);
        },
        py::arg("p"), py::arg("q"), py::arg("cfg"));
    mod.def(
        "kappa_sigma", [](const ConeConfig& cfg) { return kappa_sigma(cfg).kappa; }, py::arg("cfg"));

    py::class_<Window>(mod, "Window")
        .def(py::init([](int k_max, int m_max) { return Window{k_max, m_max}; }), py::arg("k_max") = 24,
             py::arg("m_max") = 24)
        .def_readwrite("k_max", &Window::k_max)
        .def_readwrite("m_max", &Window::m_max);

    py::class_<TruncationSpec>(mod, "TruncationSpec")
        .def(py::init([](int k_max, int quad_nodes, double s_max) {
                 TruncationSpec t{k_max, quad_nodes, s_max};
                 t.validate();
                 return t;
             }),
             py::arg("k_max") = 40, py::arg("quad_nodes") = 16, py::arg("s_max") = 40.0)
        .def_readonly("k_max", &TruncationSpec::k_max)
        .def_readonly("quad_nodes", &TruncationSpec::quad_nodes)
        .def_readonly("s_max", &TruncationSpec::s_max);

    mod.def(
        "mode_data",
        [](int k, int m, const ConeConfig& cfg) {
            const ModeData d = mode_data({k, m}, cfg);
            py::dict out;
            out["alpha_k"] = d.alpha_k;
            out["beta_k"] = d.beta_k;
            out["lambda"] = d.lambda;
            out["norm_sq"] = d.norm_sq;
            return out;
        },
        py::arg("k"), py::arg("m"), py::arg("cfg"));
    mod.def(
        "eigenvalue", [](int k, int m, const ConeConfig& cfg) { return mode_data({k, m}, cfg).lambda; },
        py::arg("k"), py::arg("m"), py::arg("cfg"));
    mod.def(
        "eigenfunction",
        [](int k, int m, const Point& p, const ConeConfig& cfg, bool normalized) {
            return eigenfunction({k, m}, to_point(p, cfg), cfg, normalized);
        },
        py::arg("k"), py::arg("m"), py::arg("p"), py::arg("cfg"), py::arg("normalized") = true);

    py::class_<SpectralField>(mod, "SpectralField")
        .def(py::init<Window>(), py::arg("window"))
        .def(py::init(&field_from_array), py::arg("coeffs"))
        .def_property_readonly("window", &SpectralField::window)
        .def_property_readonly("coeffs", &coeff_array)
        .def("at", &SpectralField::at, py::arg("k"), py::arg("m"))
        .def("set", &SpectralField::set, py::arg("k"), py::arg("m"), py::arg("value"))
        .def("l2_norm", &SpectralField::l2_norm);

    mod.def(
        "expand",
        [](const std::function<std::complex<double>(double, double)>& f, const Window& window,
           const ConeConfig& cfg, int n_rad, int n_theta) {
            return expand([&](const ConePoint& p) { return f(p.r(), p.theta()); }, window, cfg,
                          QuadratureSpec{n_rad, n_theta});
        },
        py::arg("f"), py::arg("window"), py::arg("cfg"), py::arg("n_rad") = 80, py::arg("n_theta") = 128);
    mod.def(
        "synthesize",
        [](const SpectralField& f, const Point& p, const ConeConfig& cfg) {
            return synthesize(f, to_point(p, cfg), cfg);
        },
        py::arg("field"), py::arg("p"), py::arg("cfg"));
    mod.def(
        "evolve",
        [](const SpectralField& f, const std::string& kind, double t, const ConeConfig& cfg, double nu) {
            return spectral_apply(named_multiplier(kind, t, nu), f, cfg);
        },
        py::arg("field"), py::arg("kind"), py::arg("t"), py::arg("cfg"), py::arg("nu") = 1.0,
        "Apply F(H) for kind heat, schrodinger, halfwave or fractional.");
    mod.def("random_field", &random_field, py::arg("window"), py::arg("seed"));

    py::class_<KernelValue>(mod, "KernelValue")
        .def_readonly("value", &KernelValue::value)
        .def_readonly("largest_term", &KernelValue::largest_term)
        .def_property_readonly("k_max_used", [](const KernelValue& v) { return v.truncation.k_max; })
        .def("__repr__", [](const KernelValue& v) {
            return "KernelValue(" + format_number(v.value.real()) + (v.value.imag() < 0 ? "-" : "+") +
                   format_number(std::abs(v.value.imag())) + "j, largest_term=" + format_number(v.largest_term) + ")";
        });

    mod.def("heat_kernel", &heat_kernel, py::arg("cfg"), py::arg("t"), py::arg("p"), py::arg("q"),
            py::arg("repr") = "series", py::arg("trunc") = TruncationSpec{}, py::arg("window") = Window{});
    mod.def("schrodinger_kernel", &schrodinger_kernel, py::arg("cfg"), py::arg("t"), py::arg("p"), py::arg("q"),
            py::arg("repr") = "series", py::arg("trunc") = TruncationSpec{});
    mod.def(
        "reduced_kernel",
        [](double rho, double delta, const ConeConfig& cfg) { return reduced_kernel(rho, delta, cfg); },
        py::arg("rho"), py::arg("delta"), py::arg("cfg"));
    mod.def(
        "halfwave_kernel",
        [](int j, double t, const Point& p, const Point& q, const ConeConfig& cfg) {
            HalfwaveKernel kern(j, cfg, {p.first, q.first});
            return kern(t, 0, 1, angular_difference(p.second, q.second, cfg));
        },
        py::arg("j"), py::arg("t"), py::arg("p"), py::arg("q"), py::arg("cfg"));

    mod.def(
        "cutoff", [](double lambda) { return DyadicCutoff{}(lambda); }, py::arg("lam"));
    mod.def(
        "besov_norm",
        [](const SpectralField& f, double s, double p, double q, const ConeConfig& cfg) {
            return besov_norm(f, s, p, q, cfg).value;
        },
        py::arg("field"), py::arg("s"), py::arg("p"), py::arg("q"), py::arg("cfg"));
    mod.def("sobolev_norm", &sobolev_norm, py::arg("field"), py::arg("s"), py::arg("cfg"));
    mod.def(
        "lp_norm",
        [](const SpectralField& f, double p, const ConeConfig& cfg) {
            return lp_norm(f, p, cfg, make_lp_grid(cfg, f.window()));
        },
        py::arg("field"), py::arg("p"), py::arg("cfg"));

    py::class_<SweepReport>(mod, "SweepReport")
        .def_readonly("name", &SweepReport::name)
        .def_readonly("empirical_constant", &SweepReport::empirical_constant)
        .def_readonly("refinement_ratio", &SweepReport::refinement_ratio)
        .def_readonly("passed", &SweepReport::pass)
        .def_readonly("grid_spec", &SweepReport::grid_spec)
        .def_property_readonly("extras",
                               [](const SweepReport& r) {
                                   py::dict d;
                                   for (const auto& [k, v] : r.extras) d[py::str(k)] = v;
                                   return d;
                               })
        .def("to_json", [](const SweepReport& r) { return report_json(r, false); });

    mod.def(
        "dispersive_constant",
        [](const ConeConfig& cfg) {
            const RunConfig rc = default_run_config();
            return dispersive_constant_schrodinger(cfg, rc.time_grid, rc.space_grid, rc.trunc);
        },
        py::arg("cfg"));
    mod.def(
        "weighted_dispersive_constant",
        [](const ConeConfig& cfg, double gamma) {
            const RunConfig rc = default_run_config();
            return weighted_dispersive_constant(cfg, gamma, rc.time_grid, rc.space_grid, rc.trunc);
        },
        py::arg("cfg"), py::arg("gamma"));
    mod.def(
        "gaussian_heat_constant",
        [](const ConeConfig& cfg) { return gaussian_heat_constant(cfg, default_run_config().heat_grid); },
        py::arg("cfg"));
    mod.def(
        "energy_conservation_check",
        [](const ConeConfig& cfg, const Window& window, int trials, std::uint64_t seed) {
            return energy_conservation_check(cfg, window, trials, seed);
        },
        py::arg("cfg"), py::arg("window") = Window{8, 8}, py::arg("trials") = 10, py::arg("seed") = 1);
}
