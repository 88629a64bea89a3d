#include "doctest.h"

#include "qkick/cli_io.hpp"
#include "qkick/diagnostics.hpp"
#include "qkick/ode_engine.hpp"
#include "qkick/perturbation.hpp"

#include "json.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace qkick;
using namespace qkick::cli;
constexpr double pi = std::numbers::pi;

namespace {

RunConfig config(Command c, const KeyValues& flags, std::string_view file = {}) {
    return resolve_config(c, parse_config_file(file, c), flags);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
        out.push_back(cell);
    return out;
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) {
        if (line.starts_with("#"))
            csv.comments.push_back(line);
        else if (csv.header.empty())
            csv.header = split_line(line);
        else
            csv.rows.push_back(split_line(line));
    }
    return csv;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    REQUIRE(ec == std::errc());
    REQUIRE(ptr == s.data() + s.size());
    return v;
}

}  // namespace

TEST_CASE("units and preset") {
    CHECK(internal_delta_e(2.0, UnitTag::Dimensionless) == 2.0);
    CHECK(internal_delta_e(kHbarEvPs, UnitTag::ElectronVoltWithPicoseconds) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(preset_2s2p_rabi_period() == doctest::Approx(946.4).epsilon(1e-3));

    const Schedule s = preset_2s2p(preset_2s2p_rabi_period() / 100);
    CHECK(s.t0() == 0.0);
    CHECK(s.tf() == doctest::Approx(150.0 + 3 * preset_2s2p_rabi_period()));
    REQUIRE(s.pulses().size() == 1);
    CHECK(strength(s.pulses()[0]) == pi / 2);

    SUBCASE("no pulse: nothing moves") {
        const Schedule bare = preset_2s2p(0.0);
        CHECK(bare.pulses().empty());
        const auto tr = evolve(bare, default_config(bare, Representation::Schrodinger), StateVector2d(1.0, 0.0));
        for (const auto& st : tr.states)
            CHECK(probabilities(st).p2 == 0.0);
    }
}

TEST_CASE("format_number round-trips") {
    for (double x : {0.0, 1.0, -0.1, 1e-300, 6.02214076e23, pi, 1.0 / 3.0}) {
        const std::string s = format_number(x);
        CHECK(to_double(s) == x);
    }
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(-2.0) == "-2");
}

TEST_CASE("pulse text") {
    const Pulse g = parse_pulse("gaussian alpha=pi/2 t=150 tau=9.5 axis=y");
    const auto* gp = std::get_if<GaussianPulse>(&g);
    REQUIRE(gp);
    CHECK(gp->alpha == pi / 2);
    CHECK(gp->t_k == 150.0);
    CHECK(gp->tau == 9.5);
    CHECK(gp->axis == PauliAxis::Y);

    CHECK(std::get<DeltaKick>(parse_pulse("kick alpha=2*pi/3 t=1")).alpha == doctest::Approx(2 * pi / 3));
    CHECK(std::get<RectangularPulse>(parse_pulse("  rect  alpha=1 start=2 tau=3 ")).t_start == 2.0);

    for (const Pulse& p : {g, parse_pulse("kick alpha=-0.3 t=1e-3 axis=x"), parse_pulse("rect alpha=1 start=2 tau=3")})
        CHECK(format_pulse(parse_pulse(format_pulse(p))) == format_pulse(p));

    CHECK_THROWS_AS(parse_pulse("gaussian alpha=1 t=0"), PreconditionError);
    CHECK_THROWS_AS(parse_pulse("gaussian alpha=1 t=0 tau=0"), PreconditionError);
    CHECK_THROWS_AS(parse_pulse("kick alpha=1 t=0 axis=z"), PreconditionError);
    CHECK_THROWS_AS(parse_pulse("kick alpha=1 t=0 width=2"), PreconditionError);
    CHECK_THROWS_AS(parse_pulse("square alpha=1 t=0"), PreconditionError);
    CHECK_THROWS_AS(parse_pulse("kick alpha=one t=0"), PreconditionError);
}

TEST_CASE("config file parsing") {
    const std::string text = R"(
# shared settings
delta_e = 1.5
eps_step = 0.1   # trailing comment

[sweep-surface]
phi_max = pi

[evolve]
dt = 0.01
)";
    const auto fv = parse_config_file(text, Command::SweepSurface);
    REQUIRE(fv.top.size() == 2);
    CHECK(fv.top[1].second == "0.1");
    REQUIRE(fv.section.size() == 1);
    CHECK(fv.section[0].first == "phi_max");

    CHECK_THROWS_AS(parse_config_file("[nonsense]\n", Command::Evolve), ConfigError);
    CHECK_THROWS_AS(parse_config_file("[evolve\n", Command::Evolve), ConfigError);
    CHECK_THROWS_AS(parse_config_file("just words\n", Command::Evolve), ConfigError);
    CHECK_THROWS_AS(parse_config_file(" = 3\n", Command::Evolve), ConfigError);

    SUBCASE("top-level keys of other commands are ignored") {
        const RunConfig cfg = resolve_config(Command::SweepSurface, fv, {});
        CHECK_FALSE(cfg.has("delta_e"));
        CHECK(cfg.text("eps_step") == "0.1");
        CHECK(cfg.number("phi_max") == pi);
    }
    SUBCASE("keys unknown to every command are rejected") {
        CHECK_THROWS_AS(resolve_config(Command::Evolve, parse_config_file("colour = red\n", Command::Evolve), {}),
                        ConfigError);
    }
}

TEST_CASE("precedence") {
    const std::string file = "eps_step = 0.1\nphi_step = 0.2\nphi_max = 1\n[sweep-surface]\nphi_step = 0.25\n";
    const RunConfig cfg = config(Command::SweepSurface, {{"phi_max", "2"}}, file);
    CHECK(cfg.text("eps_min") == "0");      // default
    CHECK(cfg.text("eps_step") == "0.1");   // file top level
    CHECK(cfg.text("phi_step") == "0.25");  // file section over top level
    CHECK(cfg.text("phi_max") == "2");      // flag over file

    SUBCASE("preset sits between defaults and explicit sources") {
        const RunConfig p = config(Command::Evolve, {{"preset", "2s2p"}, {"t_k", "200"}});
        CHECK(p.text("units") == "ev-ps");
        CHECK(p.number("t_k") == 200.0);
        CHECK(p.number("tau") == doctest::Approx(preset_2s2p_rabi_period() / 100));
        CHECK(p.number("tf") == doctest::Approx(200.0 + 3 * preset_2s2p_rabi_period()));
        CHECK(p.values.at("pulse").size() == 1);
    }
    SUBCASE("pulse lists are replaced, not merged") {
        const RunConfig p = config(Command::CompareNto, {{"pulse", "kick alpha=1 t=2"}},
                                   "delta_e = 1\ntf = 3\npulse = kick alpha=1 t=1\npulse = kick alpha=-1 t=1.5\n");
        REQUIRE(p.values.at("pulse").size() == 1);
        CHECK(p.values.at("pulse")[0] == "kick alpha=1 t=2");
    }
    SUBCASE("duplicates within one source") {
        CHECK_THROWS_AS(config(Command::SweepSurface, {{"eps_step", "0.1"}, {"eps_step", "0.2"}}), ConfigError);
        CHECK_THROWS_AS(config(Command::SweepSurface, {}, "eps_step = 0.1\neps_step = 0.2\n"), ConfigError);
        CHECK_NOTHROW(config(Command::SweepSurface, {{"eps_step", "0.1"}}, "eps_step = 0.2\n"));
    }
    SUBCASE("unknown flag key") {
        CHECK_THROWS_AS(config(Command::MapClassify, {{"delta_e", "1"}}), ConfigError);
    }
}

TEST_CASE("exit codes") {
    std::ostringstream err;
    SUBCASE("config error") {
        auto cfg = config(Command::SweepSurface, {{"format", "xml"}});
        CHECK(run(cfg, err) == kExitConfig);
        CHECK(err.str().find("config error") != std::string::npos);
    }
    SUBCASE("precondition") {
        CHECK(run(config(Command::SweepSurface, {{"eps_step", "0"}}), err) == kExitPrecondition);
        CHECK(run(config(Command::SweepSurface, {{"eps_max", "1.5"}}), err) == kExitPrecondition);
        CHECK(run(config(Command::Evolve, {{"delta_e", "1"}, {"tf", "1"}, {"pulse", "kick alpha=1 t=0.5"}}), err) ==
              kExitPrecondition);
        CHECK(run(config(Command::MapClassify, {{"strength_phase", "-1"}}), err) == kExitPrecondition);
    }
    SUBCASE("i/o") {
        const auto path = (std::filesystem::temp_directory_path() / "qkick-missing-dir" / "x" / "out.csv").string();
        CHECK(run(config(Command::SweepSurface, {{"output", path}}), err) == kExitIo);
    }
    SUBCASE("numeric") {
        CHECK(run(config(Command::Evolve, {{"delta_e", "1"}, {"tf", "1"}, {"dt", "1e-12"},
                                           {"pulse", "gaussian alpha=1 t=0.5 tau=0.1"}}),
                  err) == kExitNumeric);
    }
}

TEST_CASE("sweep-surface CSV matches the library values") {
    const RunConfig cfg = config(Command::SweepSurface, {});
    const std::string text = render_csv(execute(cfg), cfg);
    const Csv csv = parse_csv(text);
    CHECK(csv.comments.front() == "# qkick sweep-surface");
    CHECK(csv.header == std::vector<std::string>{"epsilon", "phi", "p2_ordered", "p2_nto", "difference"});

    const auto eps = default_epsilon_grid();
    const auto phi = default_phi_grid();
    const auto surf = ordering_difference_surface(eps, phi);
    REQUIRE(csv.rows.size() == surf.size());
    bool exact = true;
    for (std::size_t i = 0; i < surf.size(); ++i) {
        exact = exact && to_double(csv.rows[i][0]) == surf[i].epsilon && to_double(csv.rows[i][1]) == surf[i].phi &&
                to_double(csv.rows[i][4]) == surf[i].difference;
    }
    CHECK(exact);
    CHECK(text == render_csv(execute(cfg), cfg));
}

TEST_CASE("JSON output") {
    const RunConfig cfg = config(Command::MapClassify, {{"half_split_phase", "0.01,100"}, {"strength_phase", "0.01"}});
    const auto doc = nlohmann::json::parse(render_json(execute(cfg), cfg));
    CHECK(doc["command"] == "map-classify");
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][0]["regime"] == "kicked-perturbative");
    CHECK(doc["rows"][1]["regime"] == "perturbative");
    CHECK(doc["config"]["strength_phase"] == "0.01");
}

TEST_CASE("commands") {
    SUBCASE("pert2 with dE = 0 has no commutator correction") {
        const RunConfig cfg = config(Command::Pert2, {{"delta_e", "0"},
                                                      {"tf", "4"},
                                                      {"pulse", "kick alpha=0.3 t=1"},
                                                      {"pulse", "kick alpha=0.5 t=3"}});
        const Table t = execute(cfg);
        int seen = 0;
        for (const auto& row : t.rows) {
            if (std::get<std::string>(row[0]) != "commutator_correction")
                continue;
            ++seen;
            CHECK(std::abs(std::get<double>(row[3])) < kTolKickSums);
            CHECK(std::abs(std::get<double>(row[4])) < kTolKickSums);
        }
        CHECK(seen == 4);
    }
    SUBCASE("compare-nto on a kick pair") {
        const RunConfig cfg = config(Command::CompareNto, {{"delta_e", "1"},
                                                           {"tf", "5"},
                                                           {"pulse", "kick alpha=0.4 t=1"},
                                                           {"pulse", "kick alpha=-0.4 t=3"}});
        const Table t = execute(cfg);
        REQUIRE(t.rows.size() == 1);
        const double eps = std::sin(1.0);
        CHECK(std::get<double>(t.rows[0][0]) == doctest::Approx(p2_ordered(eps, 0.8)).epsilon(1e-12));
        CHECK(std::get<double>(t.rows[0][1]) == doctest::Approx(p2_nto(eps, 0.8)).epsilon(1e-12));
    }
    SUBCASE("evolve records a trajectory and warns about coarse steps") {
        const RunConfig cfg = config(Command::Evolve, {{"delta_e", "1"},
                                                       {"tf", "6"},
                                                       {"dt", "0.5"},
                                                       {"record_every", "1"},
                                                       {"pulse", "gaussian alpha=0.5 t=3 tau=0.5"}});
        const Table t = execute(cfg);
        CHECK(t.rows.size() == 13);
        CHECK(t.notes.size() == 1);
    }
    SUBCASE("evolve on the bare preset stays in the initial state") {
        const RunConfig cfg = config(Command::Evolve, {{"preset", "2s2p"}, {"pulse", "rect alpha=0 start=0 tau=1"}});
        for (const auto& row : execute(cfg).rows)
            CHECK(std::get<double>(row[2]) == 0.0);
    }
    SUBCASE("kick-limit and obs-time run on the preset") {
        const RunConfig kl = config(Command::KickLimit, {{"preset", "2s2p"}, {"tau_fractions", "0.0625,0.03125"}});
        CHECK(execute(kl).rows.size() == 2);
        const RunConfig ot = config(Command::ObsTime, {{"preset", "2s2p"}, {"tf_count", "5"}});
        const Table t = execute(ot);
        REQUIRE(t.rows.size() == 5);
        CHECK(std::get<double>(t.rows.back()[0]) == doctest::Approx(150.0 + 3 * preset_2s2p_rabi_period()));
    }
}
