#include <doctest.h>

#include <sstream>

#include "conemag/errors.hpp"
#include "conemag/io.hpp"
#include "conemag/lpbesov.hpp"

using namespace conemag;

TEST_CASE("default configuration") {
    const RunConfig rc = default_run_config();
    REQUIRE(rc.cones.size() == 3);
    CHECK(rc.cones[1].cfg == ConeConfig(1.5, 1.0, 0.4));
    CHECK(rc.cones[2].cfg == ConeConfig(2.0, 0.5, 0.3));
    CHECK(rc.active_cone() == ConeConfig(1.0, 1.0, 0.25));
    CHECK_NOTHROW(rc.validate());
}

TEST_CASE("config parsing") {
    const RunConfig rc = parse_run_config(
        "# comment\n"
        "cone.a = 1.5, 0.4, 2   # sigma, alpha, b0\n"
        "cone.b = 1, 0.1, 1\n"
        "active = b\n"
        "window.k_max = 3\n"
        "grid.heat.times = 0.5, 2\n"
        "grid.subordination.z = 1, 100, 3\n"
        "seed = 42\n");
    REQUIRE(rc.cones.size() == 2);
    CHECK(rc.cone("a") == ConeConfig(1.5, 2.0, 0.4));
    CHECK(rc.active_cone() == ConeConfig(1.0, 1.0, 0.1));
    CHECK(rc.window.k_max == 3);
    CHECK(rc.heat_grid.times == std::vector<double>{0.5, 2.0});
    REQUIRE(rc.subordination_z.size() == 3);
    CHECK(rc.subordination_z[1] == doctest::Approx(10.0));
    CHECK(rc.seed == 42u);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_run_config("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("window.k_max = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("cone.a = 1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("cone.a = 0.5, 0.2, 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("active = nowhere\n"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.conf"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("report serialization") {
    SweepReport r;
    r.name = "x";
    r.empirical_constant = 0.5;
    r.runtime_ms = 12;
    r.extras = {{"j", 2.0}};
    r.samples = {{"a", "b"}, {{1.0, 2.0}}};
    const std::string quiet = report_json(r, false);
    CHECK(quiet.find("runtime_ms") == std::string::npos);
    CHECK(quiet.find("\"x\"") != std::string::npos);
    CHECK(report_json(r, true).find("runtime_ms") != std::string::npos);
    std::ostringstream os;
    write_csv(os, r.samples);
    CHECK(os.str() == "a,b\n1,2\n");
}

TEST_CASE("field CSV round trip") {
    const SpectralField f = random_field(Window{2, 3}, 9);
    std::stringstream ss;
    write_field_csv(ss, f);
    const SpectralField g = read_field_csv(ss);
    CHECK(g.window().k_max == 2);
    CHECK(g.window().m_max == 3);
    CHECK(g.coeffs() == f.coeffs());
    std::istringstream bad("k,m,re_c,im_c\n0,-1,1,0\n");
    CHECK_THROWS_AS(read_field_csv(bad), ConfigError);
    std::istringstream junk("hello\n");
    CHECK_THROWS_AS(read_field_csv(junk), ConfigError);
}

TEST_CASE("sample CSV") {
    const ConeConfig cfg(1.0, 1.0, 0.25);
    std::ostringstream os;
    os << "r,theta,re,im\n";
    for (double r : {0.5, 1.0}) {
        for (int j = 0; j < 4; ++j) os << r << ',' << format_number(j * cfg.period() / 4) << ',' << r + j << ",0\n";
    }
    std::istringstream in(os.str());
    const SampleGrid g = read_sample_csv(in, cfg);
    CHECK(g.radii == std::vector<double>{0.5, 1.0});
    CHECK(g.n_theta == 4);
    CHECK(g.values[1 * 4 + 2] == std::complex<double>(3.0, 0.0));
    std::istringstream holes("r,theta,re,im\n0.5,0,1,0\n1.0,0,1,0\n1.0,3.14159,1,0\n");
    CHECK_THROWS_AS(read_sample_csv(holes, cfg), ConfigError);
    std::istringstream words("r,theta,re,im\n0.5,zero,1,0\n");
    CHECK_THROWS_AS(read_sample_csv(words, cfg), ConfigError);
}
