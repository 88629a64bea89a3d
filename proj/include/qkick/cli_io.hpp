// cli_io.hpp
//
// Command-line front end: configuration resolution, unit conversion, the
// 2s-2p preset, and CSV/JSON serialization of every diagnostic table.
//
// Configuration precedence, lowest to highest:
//   built-in defaults < preset values < config file top level
//     < config file [command] section < command-line flags.
// A key set twice within one source is an error. The multi-valued `pulse`
// key is replaced wholesale by the highest source that sets it.

#ifndef QKICK_CLI_IO_HPP
#define QKICK_CLI_IO_HPP

#include "qkick/pulses.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qkick::cli {

enum class Command { Evolve, SweepSurface, CompareNto, MapClassify, Pert2, KickLimit, ObsTime };

const char* to_string(Command c);
const std::vector<Command>& all_commands();

enum class UnitTag { Dimensionless, ElectronVoltWithPicoseconds };

enum class OutputFormat { Csv, Json };

/// hbar in eV * ps.
inline constexpr double kHbarEvPs = 6.58211957e-4;

/// Splitting in internal units (inverse time). For ElectronVoltWithPicoseconds
/// the value is in eV and the result in 1/ps.
double internal_delta_e(double value, UnitTag units);

/// 2s-2p hydrogen numbers, in eV and ps.
inline constexpr double kPreset2s2pDeltaEeV = 4.37e-6;
inline constexpr double kPreset2s2pKickTimePs = 150.0;

/// 2 pi / dE for the preset, in ps (about 946 ps).
double preset_2s2p_rabi_period();

/// Gaussian sigma_x pulse, alpha = pi/2, t_k = 150 ps, window
/// [0, t_k + 3 T_dE], times in ps. tau <= 0 builds the pulse-free schedule.
Schedule preset_2s2p(double tau);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitNumeric = 5;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "gaussian alpha=1 t=0 tau=2 axis=x", "kick alpha=1 t=0 axis=y"
/// or "rect alpha=1 start=0 tau=2 axis=x".
Pulse parse_pulse(std::string_view text);
std::string format_pulse(const Pulse& p);

/// Fully resolved settings for one command. Values are kept as text until
/// the command validates them.
struct RunConfig {
    Command command = Command::SweepSurface;
    std::map<std::string, std::vector<std::string>> values;

    bool has(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    /// Throws PreconditionError if the value is not a finite number.
    double number(const std::string& key) const;
    std::vector<double> number_list(const std::string& key) const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Keys accepted by the command.
std::vector<std::string> known_keys(Command c);

/// Config-file text: `key = value` lines, `#` comments and `[section]`
/// headers naming a command. Only the top level and the section of
/// `command` apply. Throws ConfigError.
struct FileValues {
    KeyValues top;
    KeyValues section;
};
FileValues parse_config_file(std::string_view text, Command command);

RunConfig resolve_config(Command command, const FileValues& file, const KeyValues& flags);

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;  ///< non-fatal warnings, emitted as comments
};

/// Runs the command. Throws PreconditionError / NumericError.
Table execute(const RunConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double x);

std::string render_csv(const Table& table, const RunConfig& cfg);
std::string render_json(const Table& table, const RunConfig& cfg);

/// Executes and writes the artifact; returns an exit code and reports
/// failures as one line on `err`.
int run(const RunConfig& cfg, std::ostream& err);

/// Whole CLI: argv parsing, config file loading, run().
int main_entry(int argc, char** argv);

}  // namespace qkick::cli

#endif  // QKICK_CLI_IO_HPP
