#pragma once
// Command-line front end: argument parsing (pure, testable), config file
// loading, and subcommand dispatch. Kept out of main() so tests can drive
// the parser without spawning processes.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mti/config.hpp"
#include "mti/core.hpp"
#include "mti/harness.hpp"

namespace mti {

enum class Command : uint8_t {
    run,
    sweep,
    bounds,
    selftest,
    help,
};

enum class OutputFormat : uint8_t {
    pretty,
    csv,
};

struct CliOptions {
    Command command = Command::help;
    OutputFormat format = OutputFormat::pretty;

    std::vector<Algorithm> algorithms;
    std::vector<uint64_t> ns;
    std::vector<double> alphas;
    std::vector<double> epsilons;
    std::vector<double> deltas;
    uint32_t trials = 1;
    std::optional<uint64_t> seed;   // unset: MTI_SEED env, else 0

    TimingModel timing;
    ProtocolConfig protocol;

    std::string config_path;
    std::string output_path;        // empty: stdout
    bool allow_out_of_range = false;
    bool show_help = false;
};

struct ParseError {
    std::string message;
};

struct ParseResult {
    CliOptions options;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

// Pure: consumes argv-style tokens (excluding the program name), never
// touches the environment or filesystem. Repeated flags follow last-wins
// semantics, which is how config files merge under explicit flags: the
// driver re-parses with file-derived tokens inserted before the original
// flag tokens.
ParseResult parse_args(const std::vector<std::string>& args);

// Flat "key = value" lines; '#' starts a comment, blank lines ignored.
// Returns the parsed pairs or a ParseError for malformed lines.
struct ConfigFile {
    std::map<std::string, std::string> values;
    std::optional<ParseError> error;
};
ConfigFile load_config_file(const std::string& path);
ConfigFile parse_config_text(const std::string& text);

// Converts file entries into the equivalent "--key value" token pairs so
// the driver can re-parse with them ahead of the explicit flags. Keys must
// name real flags; "config" itself is rejected to keep loading acyclic.
struct ConfigTokens {
    std::vector<std::string> tokens;
    std::optional<ParseError> error;
};
ConfigTokens config_to_args(const ConfigFile& file);

// Fills options.seed from the MTI_SEED environment variable when unset;
// invalid values are a ParseError.
std::optional<ParseError> apply_env_seed(CliOptions& options);

// Validates ranges. Soft violations (outside recommended accuracy ranges)
// are allowed with allow_out_of_range; hard violations (nonpositive n,
// alpha outside [0,1], delta outside (0,1), negative epsilon, zero trials)
// always fail. epsilon == 0 is allowed and documented as exhaustive mode.
std::optional<ParseError> validate_options(const CliOptions& options);

// Executes the parsed command, writing human/CSV output to out and
// diagnostics to err. Returns the process exit code: 0 success, 1 runtime
// failure (including a failed selftest), 2 usage error.
int run_cli(const CliOptions& options, std::ostream& out, std::ostream& err);

// Convenience wrapper used by main(): parse, env seed, config file, range
// validation, dispatch. argv conventions as in main.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

std::string usage_text();

}  // namespace mti
