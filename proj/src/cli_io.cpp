#include "qkick/cli_io.hpp"

#include "qkick/diagnostics.hpp"
#include "qkick/ode_engine.hpp"
#include "qkick/perturbation.hpp"
#include "qkick/propagators.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

namespace qkick::cli {

namespace {

// ---------------------------------------------------------------- text utils

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_plain(std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        return std::nullopt;
    return v;
}

/// Plain decimals plus the forms pi, pi/N, M*pi and M*pi/N.
std::optional<double> parse_value(std::string_view raw) {
    const std::string s = trim(raw);
    const auto pi_pos = s.find("pi");
    if (pi_pos == std::string::npos)
        return parse_plain(s);
    double factor = 1.0;
    if (pi_pos > 0) {
        if (s[pi_pos - 1] != '*')
            return std::nullopt;
        const std::string head = s.substr(0, pi_pos - 1);
        if (head == "-")
            factor = -1.0;
        else if (auto m = parse_plain(head))
            factor = *m;
        else
            return std::nullopt;
    }
    const std::string tail = s.substr(pi_pos + 2);
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail[0] != '/')
            return std::nullopt;
        auto d = parse_plain(tail.substr(1));
        if (!d || *d == 0.0)
            return std::nullopt;
        divisor = *d;
    }
    return factor * std::numbers::pi / divisor;
}

PauliAxis parse_axis(const std::string& s) {
    if (s == "x" || s == "X")
        return PauliAxis::X;
    if (s == "y" || s == "Y")
        return PauliAxis::Y;
    if (s == "z" || s == "Z")
        return PauliAxis::Z;
    throw PreconditionError("unknown axis '" + s + "'");
}

// --------------------------------------------------------------- key tables

const std::vector<std::string> kScheduleKeys = {"preset", "units", "delta_e", "t0",  "tf",
                                                "pulse",  "alpha", "t_k",     "tau"};
const std::vector<std::string> kOutputKeys = {"output", "format", "workers"};

std::vector<std::string> command_keys(Command c) {
    switch (c) {
        case Command::Evolve: {
            auto k = kScheduleKeys;
            k.insert(k.end(), {"representation", "dt", "record_every"});
            return k;
        }
        case Command::CompareNto: {
            auto k = kScheduleKeys;
            k.push_back("dt");
            return k;
        }
        case Command::Pert2: {
            auto k = kScheduleKeys;
            k.push_back("abs_tol");
            return k;
        }
        case Command::SweepSurface:
            return {"eps_min", "eps_max", "eps_step", "phi_min", "phi_max", "phi_step"};
        case Command::MapClassify:
            return {"half_split_phase", "strength_phase"};
        case Command::KickLimit:
            return {"preset", "units", "delta_e", "alpha", "t_k", "t0", "tf", "taus",
                    "tau_fractions"};
        case Command::ObsTime:
            return {"preset", "units", "delta_e", "alpha", "t_k", "tau", "t0", "tf_max",
                    "tf_count", "tf_list"};
    }
    return {};
}

// ------------------------------------------------------------- schedule glue

UnitTag parse_units(const std::string& s) {
    if (s == "dimensionless")
        return UnitTag::Dimensionless;
    if (s == "ev-ps")
        return UnitTag::ElectronVoltWithPicoseconds;
    throw PreconditionError("units must be 'dimensionless' or 'ev-ps'");
}

Representation parse_representation(const std::string& s) {
    if (s == "schrodinger")
        return Representation::Schrodinger;
    if (s == "interaction")
        return Representation::Interaction;
    throw PreconditionError("representation must be 'schrodinger' or 'interaction'");
}

double delta_e_of(const RunConfig& cfg) {
    return internal_delta_e(cfg.number("delta_e"), parse_units(cfg.text("units")));
}

double rabi_period_of(const RunConfig& cfg) {
    const double de = delta_e_of(cfg);
    if (de == 0.0)
        throw PreconditionError("this command needs a nonzero delta_e");
    return 2.0 * std::numbers::pi / std::abs(de);
}

Schedule schedule_of(const RunConfig& cfg) {
    std::vector<Pulse> pulses;
    if (cfg.has("pulse"))
        for (const auto& text : cfg.values.at("pulse"))
            pulses.push_back(parse_pulse(text));
    try {
        return Schedule(delta_e_of(cfg), std::move(pulses), cfg.number("t0"), cfg.number("tf"));
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(e.what());
    }
}

std::vector<std::string> schedule_notes(const Schedule& s) {
    std::vector<std::string> notes;
    for (const auto& w : s.warnings())
        notes.push_back("warning: " + w);
    return notes;
}

// ------------------------------------------------------------------ commands

const StateVector2d kGround{1.0, 0.0};

Table run_evolve(const RunConfig& cfg) {
    const Schedule s = schedule_of(cfg);
    if (s.has_kicks())
        throw PreconditionError("evolve integrates finite pulses only; use compare-nto for kicks");
    const Representation rep = parse_representation(cfg.text("representation"));
    IntegratorConfig ic = default_config(s, rep);
    if (cfg.has("dt"))
        ic.dt = cfg.number("dt");
    const double record = cfg.number("record_every");
    if (record < 1 || record != std::floor(record))
        throw PreconditionError("record_every must be a positive integer");
    ic.record_every = static_cast<int>(record);

    Table t{{"t", "p1", "p2"}, {}, schedule_notes(s)};
    if (ic.dt > step_warning_threshold(s))
        t.notes.push_back("warning: dt exceeds the resolution threshold " +
                          format_number(step_warning_threshold(s)));
    const Trajectory traj = evolve(s, ic, kGround);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto p = probabilities(traj.states[i]);
        t.rows.push_back({traj.times[i], p.p1, p.p2});
    }
    return t;
}

Table run_compare_nto(const RunConfig& cfg) {
    const Schedule s = schedule_of(cfg);
    if (s.has_kicks() && s.has_smooth_pulses())
        throw PreconditionError("compare-nto needs either all kicks or all smooth pulses");
    double ordered = 0.0;
    if (s.has_kicks()) {
        std::vector<KickSpec> kicks;
        for (const auto& p : s.pulses()) {
            const auto& k = std::get<DeltaKick>(p);
            if (k.t_k >= s.t0() && k.t_k <= s.tf())
                kicks.push_back({k.alpha, k.t_k, k.axis});
        }
        ordered = std::norm(kick_sequence(s.delta_e(), kicks)(1, 0));
    } else {
        IntegratorConfig ic = default_config(s, Representation::Interaction);
        if (cfg.has("dt"))
            ic.dt = cfg.number("dt");
        ordered = probabilities(evolve(s, ic, kGround).final_state()).p2;
    }
    const double nto_i = std::norm(nto_propagator(s, Representation::Interaction)(1, 0));
    const double nto_s = std::norm(nto_propagator(s, Representation::Schrodinger)(1, 0));
    Table t{{"p2_ordered", "p2_nto_interaction", "p2_nto_schrodinger", "difference_interaction",
             "difference_schrodinger"},
            {},
            schedule_notes(s)};
    t.rows.push_back({ordered, nto_i, nto_s, ordered - nto_i, ordered - nto_s});
    return t;
}

Table run_pert2(const RunConfig& cfg) {
    const Schedule s = schedule_of(cfg);
    NestedQuadratureOptions opt;
    opt.abs_tol = cfg.number("abs_tol");
    if (!(opt.abs_tol > 0.0))
        throw PreconditionError("abs_tol must be positive");
    const SecondOrderBreakdown b = dyson_second_order(s, opt);
    Table t{{"term", "row", "col", "re", "im"}, {}, schedule_notes(s)};
    const std::pair<const char*, const Matrix2d*> terms[] = {
        {"zeroth", &b.zeroth},
        {"first", &b.first},
        {"second_ordered", &b.second_ordered},
        {"second_nto", &b.second_nto},
        {"commutator_correction", &b.commutator_correction},
    };
    for (const auto& [name, m] : terms)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                t.rows.push_back({std::string(name), double(r + 1), double(c + 1),
                                  (*m)(r, c).real(), (*m)(r, c).imag()});
    t.notes.push_back("identity_residual = " + format_number(b.identity_residual()));
    return t;
}

unsigned workers_of(const RunConfig& cfg) {
    const double w = cfg.number("workers");
    if (w < 1 || w != std::floor(w) || w > 1024)
        throw PreconditionError("workers must be an integer in [1, 1024]");
    return static_cast<unsigned>(w);
}

Table run_sweep_surface(const RunConfig& cfg) {
    const auto eps = stepped_grid(cfg.number("eps_min"), cfg.number("eps_max"),
                                  cfg.number("eps_step"));
    const auto phi = stepped_grid(cfg.number("phi_min"), cfg.number("phi_max"),
                                  cfg.number("phi_step"));
    Table t{{"epsilon", "phi", "p2_ordered", "p2_nto", "difference"}, {}, {}};
    for (const auto& p : ordering_difference_surface(eps, phi, {workers_of(cfg)}))
        t.rows.push_back({p.epsilon, p.phi, p.p2_ordered, p.p2_nto, p.difference});
    return t;
}

Table run_map_classify(const RunConfig& cfg) {
    Table t{{"half_split_phase", "strength_phase", "regime"}, {}, {}};
    for (const double a : cfg.number_list("half_split_phase"))
        for (const double b : cfg.number_list("strength_phase"))
            t.rows.push_back({a, b, std::string(to_string(classify_regime(a, b)))});
    return t;
}

Table run_kick_limit(const RunConfig& cfg) {
    std::vector<double> taus;
    if (cfg.has("taus")) {
        taus = cfg.number_list("taus");
    } else {
        const double period = rabi_period_of(cfg);
        for (const double f : cfg.number_list("tau_fractions"))
            taus.push_back(f * period);
    }
    ScanWindow window;
    window.t0 = cfg.number("t0");
    if (cfg.has("tf"))
        window.tf = cfg.number("tf");
    Table t{{"tau", "p2_rk4_ordered", "p2_nto_interaction", "p2_nto_schrodinger"}, {}, {}};
    for (const auto& r : kick_limit_scan(delta_e_of(cfg), cfg.number("alpha"), cfg.number("t_k"),
                                         taus, window, {workers_of(cfg)}))
        t.rows.push_back({r.tau, r.p2_rk4_ordered, r.p2_nto_interaction, r.p2_nto_schrodinger});
    return t;
}

Table run_obs_time(const RunConfig& cfg) {
    const double t_k = cfg.number("t_k");
    std::vector<double> grid;
    if (cfg.has("tf_list")) {
        grid = cfg.number_list("tf_list");
    } else {
        const double tf_max = cfg.number("tf_max");
        const double count = cfg.number("tf_count");
        if (count < 1 || count != std::floor(count))
            throw PreconditionError("tf_count must be a positive integer");
        const auto n = static_cast<std::size_t>(count);
        for (std::size_t i = 1; i <= n; ++i)
            grid.push_back(t_k + (tf_max - t_k) * static_cast<double>(i) / static_cast<double>(n));
    }
    Table t{{"tf", "p2_ordered", "p2_nto_schrodinger", "p2_nto_interaction"}, {}, {}};
    for (const auto& r : observation_time_scan(delta_e_of(cfg), cfg.number("alpha"), t_k,
                                               cfg.number("tau"), grid, cfg.number("t0"),
                                               {workers_of(cfg)}))
        t.rows.push_back({r.tf, r.p2_ordered, r.p2_nto_schrodinger, r.p2_nto_interaction});
    return t;
}

const char* command_description(Command c) {
    switch (c) {
        case Command::Evolve: return "RK4 trajectory P1(t), P2(t) for finite pulses";
        case Command::SweepSurface: return "P2 - P2(0) for the +/- kick pair over (epsilon, phi)";
        case Command::CompareNto: return "ordered vs unordered P2 in both pictures";
        case Command::MapClassify: return "qubit-map regime for phase pairs";
        case Command::Pert2: return "second-order Dyson terms and the ordering correction";
        case Command::KickLimit: return "Gaussian pulse P2 as the width shrinks";
        case Command::ObsTime: return "P2 against observation time";
    }
    return "";
}

// ------------------------------------------------------------ resolution

void put_default(std::map<std::string, std::vector<std::string>>& values, const std::string& key,
                 const std::string& value) {
    if (!values.contains(key))
        values[key] = {value};
}

/// Layers one source over `values`; rejects duplicates within the source.
void layer(std::map<std::string, std::vector<std::string>>& values, const KeyValues& source,
           const std::set<std::string>& allowed, const char* origin) {
    std::map<std::string, std::vector<std::string>> local;
    for (const auto& [key, value] : source) {
        if (!allowed.contains(key))
            throw ConfigError(std::string("unknown key '") + key + "' in " + origin);
        auto& slot = local[key];
        if (!slot.empty() && key != "pulse")
            throw ConfigError(std::string("key '") + key + "' given twice in " + origin);
        slot.push_back(value);
    }
    for (auto& [key, list] : local)
        values[key] = std::move(list);
}

}  // namespace

// ------------------------------------------------------------------ public

const char* to_string(Command c) {
    switch (c) {
        case Command::Evolve: return "evolve";
        case Command::SweepSurface: return "sweep-surface";
        case Command::CompareNto: return "compare-nto";
        case Command::MapClassify: return "map-classify";
        case Command::Pert2: return "pert2";
        case Command::KickLimit: return "kick-limit";
        case Command::ObsTime: return "obs-time";
    }
    return "?";
}

const std::vector<Command>& all_commands() {
    static const std::vector<Command> all = {Command::Evolve,     Command::SweepSurface,
                                             Command::CompareNto, Command::MapClassify,
                                             Command::Pert2,      Command::KickLimit,
                                             Command::ObsTime};
    return all;
}

double internal_delta_e(double value, UnitTag units) {
    return units == UnitTag::ElectronVoltWithPicoseconds ? value / kHbarEvPs : value;
}

double preset_2s2p_rabi_period() {
    return 2.0 * std::numbers::pi /
           internal_delta_e(kPreset2s2pDeltaEeV, UnitTag::ElectronVoltWithPicoseconds);
}

Schedule preset_2s2p(double tau) {
    const double de = internal_delta_e(kPreset2s2pDeltaEeV, UnitTag::ElectronVoltWithPicoseconds);
    const double tf = kPreset2s2pKickTimePs + 3.0 * preset_2s2p_rabi_period();
    std::vector<Pulse> pulses;
    if (tau > 0.0)
        pulses.push_back(
            GaussianPulse{std::numbers::pi / 2.0, kPreset2s2pKickTimePs, tau, PauliAxis::X});
    return Schedule(de, std::move(pulses), 0.0, tf);
}

Pulse parse_pulse(std::string_view text) {
    const auto words = split(trim(text), ' ');
    std::vector<std::string> tokens;
    for (const auto& w : words)
        if (!w.empty())
            tokens.push_back(w);
    if (tokens.empty())
        throw PreconditionError("empty pulse description");
    std::map<std::string, std::string> fields;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos)
            throw PreconditionError("pulse field '" + tokens[i] + "' is not name=value");
        fields[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
    }
    const auto num = [&](const std::string& name) {
        const auto it = fields.find(name);
        if (it == fields.end())
            throw PreconditionError("pulse is missing '" + name + "'");
        const auto v = parse_value(it->second);
        if (!v || !std::isfinite(*v))
            throw PreconditionError("pulse field '" + name + "' is not a number");
        return *v;
    };
    const PauliAxis axis = fields.contains("axis") ? parse_axis(fields["axis"]) : PauliAxis::X;
    const std::string& kind = tokens[0];
    std::set<std::string> expected;
    Pulse p;
    if (kind == "kick") {
        p = DeltaKick{num("alpha"), num("t"), axis};
        expected = {"alpha", "t", "axis"};
    } else if (kind == "gaussian") {
        p = GaussianPulse{num("alpha"), num("t"), num("tau"), axis};
        expected = {"alpha", "t", "tau", "axis"};
    } else if (kind == "rect") {
        p = RectangularPulse{num("alpha"), num("start"), num("tau"), axis};
        expected = {"alpha", "start", "tau", "axis"};
    } else {
        throw PreconditionError("unknown pulse kind '" + kind + "'");
    }
    for (const auto& [name, value] : fields)
        if (!expected.contains(name))
            throw PreconditionError("unknown pulse field '" + name + "'");
    try {
        validate(p);
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(e.what());
    }
    return p;
}

std::string format_pulse(const Pulse& p) {
    std::ostringstream os;
    if (const auto* k = std::get_if<DeltaKick>(&p))
        os << "kick alpha=" << format_number(k->alpha) << " t=" << format_number(k->t_k);
    else if (const auto* g = std::get_if<GaussianPulse>(&p))
        os << "gaussian alpha=" << format_number(g->alpha) << " t=" << format_number(g->t_k)
           << " tau=" << format_number(g->tau);
    else if (const auto* r = std::get_if<RectangularPulse>(&p))
        os << "rect alpha=" << format_number(r->alpha) << " start=" << format_number(r->t_start)
           << " tau=" << format_number(r->tau);
    os << " axis=" << to_string(axis_of(p));
    return os.str();
}

bool RunConfig::has(const std::string& key) const {
    const auto it = values.find(key);
    return it != values.end() && !it->second.empty();
}

const std::string& RunConfig::text(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end() || it->second.empty())
        throw ConfigError("missing required key '" + key + "'");
    return it->second.front();
}

double RunConfig::number(const std::string& key) const {
    const auto v = parse_value(text(key));
    if (!v || !std::isfinite(*v))
        throw PreconditionError("key '" + key + "' is not a finite number: '" + text(key) + "'");
    return *v;
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(text(key), ',')) {
        const auto v = parse_value(item);
        if (!v || !std::isfinite(*v))
            throw PreconditionError("key '" + key + "' holds a non-number: '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::string> known_keys(Command c) {
    auto keys = command_keys(c);
    keys.insert(keys.end(), kOutputKeys.begin(), kOutputKeys.end());
    return keys;
}

FileValues parse_config_file(std::string_view text, Command command) {
    FileValues fv;
    std::set<std::string> sections;
    for (const Command c : all_commands())
        sections.insert(to_string(c));
    enum class Scope { Top, Mine, Other } scope = Scope::Top;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!sections.contains(name))
                throw ConfigError("config line " + std::to_string(line_no) + ": unknown section '" +
                                  name + "'");
            scope = name == to_string(command) ? Scope::Mine : Scope::Other;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::pair<std::string, std::string> kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (kv.first.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (scope == Scope::Top)
            fv.top.push_back(std::move(kv));
        else if (scope == Scope::Mine)
            fv.section.push_back(std::move(kv));
    }
    return fv;
}

RunConfig resolve_config(Command command, const FileValues& file, const KeyValues& flags) {
    const auto keys = known_keys(command);
    const std::set<std::string> allowed(keys.begin(), keys.end());

    RunConfig cfg;
    cfg.command = command;
    auto& v = cfg.values;
    // The top level of a shared file may carry keys for other commands.
    KeyValues top;
    for (const auto& kv : file.top)
        if (allowed.contains(kv.first))
            top.push_back(kv);
        else if (std::none_of(all_commands().begin(), all_commands().end(), [&](Command c) {
                     const auto k = known_keys(c);
                     return std::find(k.begin(), k.end(), kv.first) != k.end();
                 }))
            throw ConfigError("unknown key '" + kv.first + "' in config file");
    layer(v, top, allowed, "config file");
    layer(v, file.section, allowed, "config file section");
    layer(v, flags, allowed, "command-line flags");

    // Defaults below every explicit source.
    const char* env_workers = std::getenv("QKICK_WORKERS");
    put_default(v, "workers", env_workers && *env_workers ? env_workers : "1");
    put_default(v, "output", "-");
    put_default(v, "format", "csv");

    const bool schedule_command = allowed.contains("preset");
    if (schedule_command && cfg.has("preset")) {
        if (cfg.text("preset") != "2s2p")
            throw ConfigError("unknown preset '" + cfg.text("preset") + "'");
        put_default(v, "units", "ev-ps");
        put_default(v, "delta_e", format_number(kPreset2s2pDeltaEeV));
        put_default(v, "alpha", "pi/2");
        put_default(v, "t_k", format_number(kPreset2s2pKickTimePs));
        put_default(v, "t0", "0");
        const double period = rabi_period_of(cfg);
        if (allowed.contains("tau"))
            put_default(v, "tau", format_number(period / 100.0));
        if (allowed.contains("pulse")) {
            put_default(v, "tf", format_number(cfg.number("t_k") + 3.0 * period));
            put_default(v, "pulse",
                        format_pulse(GaussianPulse{cfg.number("alpha"), cfg.number("t_k"),
                                                   cfg.number("tau"), PauliAxis::X}));
        }
    }
    if (schedule_command) {
        put_default(v, "units", "dimensionless");
        put_default(v, "t0", "0");
    }

    switch (command) {
        case Command::Evolve:
            put_default(v, "representation", "schrodinger");
            put_default(v, "record_every", "10");
            break;
        case Command::Pert2:
            put_default(v, "abs_tol", "1e-9");
            break;
        case Command::SweepSurface:
            put_default(v, "eps_min", "0");
            put_default(v, "eps_max", "1");
            put_default(v, "eps_step", "0.02");
            put_default(v, "phi_min", "0");
            put_default(v, "phi_max", "2*pi");
            put_default(v, "phi_step", "0.05");
            break;
        case Command::MapClassify:
            put_default(v, "half_split_phase", "0.01,0.1,1,10,100");
            put_default(v, "strength_phase", "0.01,0.1,1,10,100");
            break;
        case Command::KickLimit:
            put_default(v, "alpha", "pi/2");
            put_default(v, "tau_fractions",
                        "0.5,0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625");
            break;
        case Command::ObsTime:
            put_default(v, "alpha", "pi/2");
            put_default(v, "tf_count", "100");
            if (!cfg.has("tf_list") && cfg.has("t_k") && cfg.has("delta_e"))
                put_default(v, "tf_max", format_number(cfg.number("t_k") + 3.0 * rabi_period_of(cfg)));
            break;
        case Command::CompareNto:
            break;
    }
    return cfg;
}

Table execute(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::Evolve: return run_evolve(cfg);
            case Command::SweepSurface: return run_sweep_surface(cfg);
            case Command::CompareNto: return run_compare_nto(cfg);
            case Command::MapClassify: return run_map_classify(cfg);
            case Command::Pert2: return run_pert2(cfg);
            case Command::KickLimit: return run_kick_limit(cfg);
            case Command::ObsTime: return run_obs_time(cfg);
        }
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(e.what());
    } catch (const std::domain_error& e) {
        throw PreconditionError(e.what());
    } catch (const std::length_error& e) {
        throw NumericError(e.what());
    }
    throw ConfigError("unknown command");
}

std::string format_number(double x) {
    char buf[64];
    if (x == 0.0)
        x = 0.0;  // no "-0" in tables
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc())
        throw NumericError("number formatting failed");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, list] : cfg.values)
        for (const auto& value : list)
            out.emplace_back(key, value);
    return out;
}

}  // namespace

std::string render_csv(const Table& table, const RunConfig& cfg) {
    std::string out = "# qkick ";
    out += to_string(cfg.command);
    out += '\n';
    for (const auto& [key, value] : provenance(cfg))
        out += "# " + key + " = " + value + '\n';
    for (const auto& note : table.notes)
        out += "# " + note + '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i)
            out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            if (const auto* d = std::get_if<double>(&row[i]))
                out += format_number(*d);
            else
                out += std::get<std::string>(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& table, const RunConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["command"] = to_string(cfg.command);
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, list] : cfg.values)
        config[key] = list.size() == 1 && key != "pulse" ? nlohmann::ordered_json(list.front())
                                                         : nlohmann::ordered_json(list);
    doc["config"] = std::move(config);
    doc["notes"] = table.notes;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& cell) { obj[table.columns[i]] = cell; }, row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + '\n';
}

int run(const RunConfig& cfg, std::ostream& err) {
    try {
        const std::string& format = cfg.text("format");
        if (format != "csv" && format != "json")
            throw ConfigError("format must be 'csv' or 'json'");
        const Table table = execute(cfg);
        for (const auto& row : table.rows)
            for (const auto& cell : row)
                if (const auto* d = std::get_if<double>(&cell); d && !std::isfinite(*d))
                    throw NumericError("non-finite value in output table");
        const std::string text =
            format == "csv" ? render_csv(table, cfg) : render_json(table, cfg);
        const std::string& path = cfg.text("output");
        if (path == "-") {
            std::cout << text << std::flush;
            if (!std::cout)
                throw IoError("failed writing to stdout");
        } else {
            std::ofstream file(path, std::ios::binary | std::ios::trunc);
            if (!file)
                throw IoError("cannot open output file '" + path + "'");
            file << text;
            file.close();
            if (!file)
                throw IoError("failed writing output file '" + path + "'");
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "qkick: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "qkick: invalid input: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const IoError& e) {
        err << "qkick: i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        err << "qkick: numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "qkick: numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Time-ordering studies for pulsed two-state systems"};
    app.require_subcommand(1);

    struct Sub {
        Command command;
        CLI::App* app;
        std::string config_path;
        std::map<std::string, std::vector<std::string>> flags;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    for (const Command c : all_commands()) {
        auto sub = std::make_unique<Sub>();
        sub->command = c;
        sub->app = app.add_subcommand(to_string(c), command_description(c));
        sub->app->add_option("--config", sub->config_path, "key = value configuration file");
        for (const auto& key : known_keys(c)) {
            std::string names = "--" + key;
            if (key.find('_') != std::string::npos) {
                std::string dashed = key;
                std::replace(dashed.begin(), dashed.end(), '_', '-');
                names += ",--" + dashed;
            }
            auto* opt = sub->app->add_option(names, sub->flags[key]);
            if (key == "pulse")
                opt->description("pulse description, repeatable")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            else
                opt->multi_option_policy(CLI::MultiOptionPolicy::Throw);
        }
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "qkick: config error: " << e.what() << '\n';
        return kExitConfig;
    }

    for (const auto& sub : subs) {
        if (!sub->app->parsed())
            continue;
        try {
            FileValues file;
            if (!sub->config_path.empty()) {
                std::ifstream in(sub->config_path, std::ios::binary);
                if (!in) {
                    std::cerr << "qkick: i/o error: cannot read config '" << sub->config_path << "'\n";
                    return kExitIo;
                }
                std::ostringstream buf;
                buf << in.rdbuf();
                file = parse_config_file(buf.str(), sub->command);
            }
            KeyValues flags;
            for (const auto& [key, list] : sub->flags)
                for (const auto& value : list)
                    flags.emplace_back(key, value);
            return run(resolve_config(sub->command, file, flags), std::cerr);
        } catch (const ConfigError& e) {
            std::cerr << "qkick: config error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const PreconditionError& e) {
            std::cerr << "qkick: invalid input: " << e.what() << '\n';
            return kExitPrecondition;
        }
    }
    return kExitConfig;
}

}  // namespace qkick::cli
