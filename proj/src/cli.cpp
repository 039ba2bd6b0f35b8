#include "mti/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "mti/selftest.hpp"
#include "mti/stats.hpp"

namespace mti {

namespace {

const char* command_name(Command c) {
    switch (c) {
        case Command::run: return "run";
        case Command::sweep: return "sweep";
        case Command::bounds: return "bounds";
        case Command::selftest: return "selftest";
        case Command::help: return "help";
    }
    return "help";
}

bool command_from_name(const std::string& name, Command& out) {
    if (name == "run") { out = Command::run; return true; }
    if (name == "sweep") { out = Command::sweep; return true; }
    if (name == "bounds") { out = Command::bounds; return true; }
    if (name == "selftest") { out = Command::selftest; return true; }
    if (name == "help") { out = Command::help; return true; }
    return false;
}

bool parse_u64(const std::string& text, uint64_t& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out, 10);
    return res.ec == std::errc() && res.ptr == last;
}

bool parse_u32(const std::string& text, uint32_t& out) {
    uint64_t wide = 0;
    if (!parse_u64(text, wide) || wide > UINT32_MAX) return false;
    out = static_cast<uint32_t>(wide);
    return true;
}

bool parse_f64(const std::string& text, double& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) return false;
    if (std::isnan(v)) return false;
    out = v;
    return true;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return parts;
}

std::optional<ParseError> parse_double_list(const std::string& flag,
                                            const std::string& value,
                                            std::vector<double>& out) {
    std::vector<double> parsed;
    for (const std::string& part : split_commas(value)) {
        double v = 0.0;
        if (!parse_f64(part, v))
            return ParseError{flag + ": cannot parse '" + part + "' as a number"};
        parsed.push_back(v);
    }
    out = std::move(parsed);  // last occurrence of the flag wins
    return std::nullopt;
}

std::optional<ParseError> parse_u64_list(const std::string& flag,
                                         const std::string& value,
                                         std::vector<uint64_t>& out) {
    std::vector<uint64_t> parsed;
    for (const std::string& part : split_commas(value)) {
        uint64_t v = 0;
        if (!parse_u64(part, v))
            return ParseError{flag + ": cannot parse '" + part +
                              "' as a nonnegative integer"};
        parsed.push_back(v);
    }
    out = std::move(parsed);
    return std::nullopt;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ParseResult parse_args(const std::vector<std::string>& args) {
    ParseResult result;
    CliOptions& opt = result.options;

    if (args.empty()) {
        result.error = ParseError{"no command given"};
        return result;
    }

    size_t pos = 0;
    if (args[0] == "-h" || args[0] == "--help") {
        opt.command = Command::help;
        opt.show_help = true;
        pos = 1;
    } else if (!args[0].empty() && args[0][0] == '-') {
        result.error = ParseError{"expected a command before flags; got '" + args[0] +
                                  "' (commands: run, sweep, bounds, selftest, help)"};
        return result;
    } else {
        if (!command_from_name(args[0], opt.command)) {
            result.error = ParseError{"unknown command: '" + args[0] +
                                      "' (commands: run, sweep, bounds, selftest, help)"};
            return result;
        }
        pos = 1;
    }

    for (; pos < args.size(); ++pos) {
        const std::string& tok = args[pos];
        auto take = [&](const char* flag) -> const std::string* {
            if (pos + 1 >= args.size()) {
                result.error = ParseError{std::string(flag) + " requires a value"};
                return nullptr;
            }
            return &args[++pos];
        };

        if (tok == "-h" || tok == "--help") {
            opt.show_help = true;
        } else if (tok == "--allow-out-of-range") {
            opt.allow_out_of_range = true;
        } else if (tok == "--algorithm") {
            const std::string* v = take("--algorithm");
            if (!v) return result;
            std::vector<Algorithm> algos;
            if (*v == "all") {
                algos = {Algorithm::cpt, Algorithm::polling, Algorithm::pcmti,
                         Algorithm::mmti, Algorithm::sfmti};
            } else {
                for (const std::string& part : split_commas(*v)) {
                    try {
                        algos.push_back(algorithm_from_name(part));
                    } catch (const std::invalid_argument&) {
                        result.error = ParseError{
                            "--algorithm: unknown algorithm '" + part +
                            "' (choices: cpt, polling, pcmti, mmti, sfmti, all)"};
                        return result;
                    }
                }
            }
            opt.algorithms = std::move(algos);
        } else if (tok == "--n") {
            const std::string* v = take("--n");
            if (!v) return result;
            if (auto err = parse_u64_list("--n", *v, opt.ns)) {
                result.error = err;
                return result;
            }
        } else if (tok == "--alpha") {
            const std::string* v = take("--alpha");
            if (!v) return result;
            if (auto err = parse_double_list("--alpha", *v, opt.alphas)) {
                result.error = err;
                return result;
            }
        } else if (tok == "--epsilon") {
            const std::string* v = take("--epsilon");
            if (!v) return result;
            if (auto err = parse_double_list("--epsilon", *v, opt.epsilons)) {
                result.error = err;
                return result;
            }
        } else if (tok == "--delta") {
            const std::string* v = take("--delta");
            if (!v) return result;
            if (auto err = parse_double_list("--delta", *v, opt.deltas)) {
                result.error = err;
                return result;
            }
        } else if (tok == "--trials") {
            const std::string* v = take("--trials");
            if (!v) return result;
            if (!parse_u32(*v, opt.trials)) {
                result.error =
                    ParseError{"--trials: cannot parse '" + *v + "' as a count"};
                return result;
            }
        } else if (tok == "--seed") {
            const std::string* v = take("--seed");
            if (!v) return result;
            uint64_t seed = 0;
            if (!parse_u64(*v, seed)) {
                result.error =
                    ParseError{"--seed: cannot parse '" + *v + "' as an integer"};
                return result;
            }
            opt.seed = seed;
        } else if (tok == "--rho") {
            const std::string* v = take("--rho");
            if (!v) return result;
            double rho = 0.0;
            if (!parse_f64(*v, rho)) {
                result.error =
                    ParseError{"--rho: cannot parse '" + *v + "' as a number"};
                return result;
            }
            opt.protocol.rho_hat = rho;
        } else if (tok == "--out") {
            const std::string* v = take("--out");
            if (!v) return result;
            opt.output_path = *v;
        } else if (tok == "--config") {
            const std::string* v = take("--config");
            if (!v) return result;
            opt.config_path = *v;
        } else if (tok == "--format") {
            const std::string* v = take("--format");
            if (!v) return result;
            if (*v == "csv") {
                opt.format = OutputFormat::csv;
            } else if (*v == "pretty") {
                opt.format = OutputFormat::pretty;
            } else {
                result.error = ParseError{"--format: expected 'csv' or 'pretty', got '" +
                                          *v + "'"};
                return result;
            }
        } else if (!tok.empty() && tok[0] == '-') {
            result.error = ParseError{"unknown flag: '" + tok + "'"};
            return result;
        } else {
            result.error = ParseError{"unexpected argument: '" + tok + "'"};
            return result;
        }
    }
    return result;
}

ConfigFile parse_config_text(const std::string& text) {
    ConfigFile file;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        size_t eq = body.find('=');
        if (eq == std::string::npos) {
            file.error = ParseError{"config line " + std::to_string(line_no) +
                                    ": expected 'key = value'"};
            return file;
        }
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            file.error = ParseError{"config line " + std::to_string(line_no) +
                                    ": empty key or value"};
            return file;
        }
        file.values[key] = value;
    }
    return file;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ConfigFile file;
        file.error = ParseError{"cannot open config file: " + path};
        return file;
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

ConfigTokens config_to_args(const ConfigFile& file) {
    ConfigTokens out;
    if (file.error) {
        out.error = file.error;
        return out;
    }
    static const char* known[] = {"algorithm", "n",   "alpha", "epsilon",
                                  "delta",     "trials", "seed",  "rho",
                                  "out",       "format"};
    for (const auto& [key, value] : file.values) {
        if (key == "config") {
            out.error = ParseError{"config files may not set 'config'"};
            return out;
        }
        if (key == "allow-out-of-range") {
            if (value == "true") {
                out.tokens.push_back("--allow-out-of-range");
            } else if (value != "false") {
                out.error = ParseError{"config: allow-out-of-range must be true or false"};
                return out;
            }
            continue;
        }
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            out.error = ParseError{"config: unknown key '" + key + "'"};
            return out;
        }
        out.tokens.push_back("--" + key);
        out.tokens.push_back(value);
    }
    return out;
}

std::optional<ParseError> apply_env_seed(CliOptions& options) {
    if (options.seed.has_value()) return std::nullopt;
    const char* env = std::getenv("MTI_SEED");
    if (env == nullptr) return std::nullopt;
    uint64_t seed = 0;
    if (!parse_u64(env, seed))
        return ParseError{std::string("MTI_SEED: cannot parse '") + env +
                          "' as an integer"};
    options.seed = seed;
    return std::nullopt;
}

std::optional<ParseError> validate_options(const CliOptions& options) {
    const bool needs_grid = options.command == Command::run ||
                            options.command == Command::sweep ||
                            options.command == Command::bounds;
    if (!needs_grid) return std::nullopt;

    if (options.ns.empty()) return ParseError{"--n is required"};
    for (uint64_t n : options.ns)
        if (n == 0) return ParseError{"--n: population size must be >= 1"};
    for (double a : options.alphas)
        if (!(a >= 0.0 && a <= 1.0))
            return ParseError{"--alpha: missing fraction must lie in [0, 1]"};
    for (double e : options.epsilons) {
        if (!(e >= 0.0 && e < 1.0))
            return ParseError{"--epsilon: tolerance must lie in [0, 1)"};
        if (e > 0.5 && !options.allow_out_of_range)
            return ParseError{
                "--epsilon: values above 0.5 are outside the analysis validity "
                "window (pass --allow-out-of-range to override)"};
    }
    for (double d : options.deltas) {
        if (!(d >= 0.0 && d < 1.0))
            return ParseError{"--delta: confidence parameter must lie in [0, 1)"};
        if (d >= 1.0 / 3.0 && !options.allow_out_of_range)
            return ParseError{
                "--delta: values at or above 1/3 are outside the analysis validity "
                "window (pass --allow-out-of-range to override)"};
    }
    if (options.trials == 0) return ParseError{"--trials: must be >= 1"};
    if (!(options.protocol.rho_hat > 0.0))
        return ParseError{"--rho: load factor estimate must be positive"};
    if (!timing_valid(options.timing))
        return ParseError{"timing model: all durations and rates must be positive"};

    if (options.command == Command::run) {
        if (options.ns.size() > 1 || options.alphas.size() > 1 ||
            options.epsilons.size() > 1 || options.deltas.size() > 1)
            return ParseError{
                "run takes single values for --n/--alpha/--epsilon/--delta; "
                "use the sweep command for comma lists"};
    }
    return std::nullopt;
}

namespace {

void fill_defaults(CliOptions& opt) {
    if (opt.algorithms.empty()) opt.algorithms = {Algorithm::cpt};
    if (opt.alphas.empty()) opt.alphas = {0.01};
    if (opt.epsilons.empty()) opt.epsilons = {0.01};
    if (opt.deltas.empty()) opt.deltas = {0.1};
}

void write_summary_pretty(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << std::left << std::setw(9) << "algo" << std::right << std::setw(8) << "n"
        << std::setw(8) << "alpha" << std::setw(9) << "epsilon" << std::setw(7)
        << "delta" << std::setw(7) << "trials" << std::setw(13) << "mean_time_s"
        << std::setw(9) << "success" << std::setw(5) << "ok" << '\n';
    for (const CellSummary& c : cells) {
        out << std::left << std::setw(9) << algorithm_name(c.spec.algorithm)
            << std::right << std::setw(8) << c.spec.n << std::setw(8)
            << format_double(c.spec.alpha) << std::setw(9)
            << format_double(c.spec.requirement.epsilon) << std::setw(7)
            << format_double(c.spec.requirement.delta) << std::setw(7) << c.spec.trials
            << std::setw(13) << format_double(c.mean_time_s) << std::setw(9)
            << format_double(c.success_fraction) << std::setw(5)
            << (c.requirement_ok ? "yes" : "NO") << '\n';
    }
}

struct BoundsRow {
    uint64_t n;
    double alpha, epsilon, delta;
    double lower_bound_s = std::numeric_limits<double>::quiet_NaN();
    bool in_range = false;
    double curves[7] = {};
};

constexpr RefAlgorithm ref_order[7] = {
    RefAlgorithm::iip_thp, RefAlgorithm::p_mti,  RefAlgorithm::mmti,
    RefAlgorithm::sfmti,   RefAlgorithm::protar, RefAlgorithm::pcmti,
    RefAlgorithm::cpt,
};
constexpr const char* ref_names[7] = {"iip_thp", "p_mti",  "mmti", "sfmti",
                                      "protar",  "pcmti", "cpt"};

std::vector<BoundsRow> compute_bounds(const CliOptions& opt) {
    std::vector<BoundsRow> rows;
    for (double epsilon : opt.epsilons)
        for (double delta : opt.deltas)
            for (double alpha : opt.alphas)
                for (uint64_t n : opt.ns) {
                    BoundsRow row;
                    row.n = n;
                    row.alpha = alpha;
                    row.epsilon = epsilon;
                    row.delta = delta;
                    try {
                        BoundValue bv = lower_bound_reference(n, epsilon, delta, alpha);
                        row.lower_bound_s = bv.value;
                        row.in_range = bv.in_range;
                    } catch (const std::invalid_argument&) {
                        row.in_range = false;
                    }
                    for (int i = 0; i < 7; ++i) {
                        try {
                            row.curves[i] = expected_time_reference(ref_order[i], n,
                                                                    epsilon, delta,
                                                                    alpha);
                        } catch (const std::invalid_argument&) {
                            row.curves[i] = std::numeric_limits<double>::quiet_NaN();
                        }
                    }
                    rows.push_back(row);
                }
    return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundsRow>& rows) {
    out << "n,alpha,epsilon,delta,lower_bound_slots,in_range";
    for (const char* name : ref_names) out << ',' << name << "_slots";
    out << '\n';
    for (const BoundsRow& r : rows) {
        out << r.n << ',' << format_double(r.alpha) << ',' << format_double(r.epsilon)
            << ',' << format_double(r.delta) << ',' << format_double(r.lower_bound_s)
            << ',' << (r.in_range ? "true" : "false");
        for (double c : r.curves) out << ',' << format_double(c);
        out << '\n';
    }
}

void write_bounds_pretty(std::ostream& out, const std::vector<BoundsRow>& rows) {
    out << std::right << std::setw(8) << "n" << std::setw(8) << "alpha" << std::setw(9)
        << "epsilon" << std::setw(7) << "delta" << std::setw(14) << "lower_bound"
        << std::setw(7) << "valid";
    for (const char* name : ref_names) out << std::setw(12) << name;
    out << '\n';
    for (const BoundsRow& r : rows) {
        out << std::right << std::setw(8) << r.n << std::setw(8)
            << format_double(r.alpha) << std::setw(9) << format_double(r.epsilon)
            << std::setw(7) << format_double(r.delta) << std::setw(14)
            << format_double(r.lower_bound_s) << std::setw(7)
            << (r.in_range ? "yes" : "no");
        for (double c : r.curves) out << std::setw(12) << format_double(c);
        out << '\n';
    }
}

int with_output(const CliOptions& opt, std::ostream& out, std::ostream& err,
                const std::function<void(std::ostream&)>& writer) {
    if (opt.output_path.empty()) {
        writer(out);
        return 0;
    }
    std::ofstream file(opt.output_path);
    if (!file) {
        err << "error: cannot open output file: " << opt.output_path << '\n';
        return 1;
    }
    writer(file);
    if (!file) {
        err << "error: failed writing output file: " << opt.output_path << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int run_cli(const CliOptions& parsed, std::ostream& out, std::ostream& err) {
    CliOptions opt = parsed;
    if (opt.show_help || opt.command == Command::help) {
        out << usage_text();
        return 0;
    }
    if (opt.command == Command::selftest) {
        return run_selftests(out) ? 0 : 1;
    }

    fill_defaults(opt);
    bool soft_range_violation = false;
    for (double e : opt.epsilons) soft_range_violation |= e > 0.5;
    for (double d : opt.deltas) soft_range_violation |= d >= 1.0 / 3.0;
    if (soft_range_violation)
        err << "note: accuracy parameters lie outside the analysis validity window; "
               "reference bounds may not apply\n";

    try {
        if (opt.command == Command::bounds) {
            std::vector<BoundsRow> rows = compute_bounds(opt);
            return with_output(opt, out, err, [&](std::ostream& sink) {
                if (opt.format == OutputFormat::csv)
                    write_bounds_csv(sink, rows);
                else
                    write_bounds_pretty(sink, rows);
            });
        }

        SweepSpec sweep;
        sweep.algorithms = opt.algorithms;
        sweep.ns = opt.ns;
        sweep.alphas = opt.alphas;
        sweep.epsilons = opt.epsilons;
        sweep.deltas = opt.deltas;
        sweep.trials = opt.trials;
        sweep.base_seed = opt.seed.value_or(0);
        std::vector<CellSummary> cells = run_sweep(sweep, opt.timing, opt.protocol);

        if (opt.command == Command::run) {
            std::vector<TrialRecord> trials;
            for (const CellSummary& c : cells)
                trials.insert(trials.end(), c.trials.begin(), c.trials.end());
            return with_output(opt, out, err, [&](std::ostream& sink) {
                if (opt.format == OutputFormat::csv) {
                    write_trials_csv(sink, trials);
                } else {
                    write_trials_csv(sink, trials);
                    sink << '\n';
                    write_summary_pretty(sink, cells);
                }
            });
        }

        // sweep: per-cell summaries are the plot-ready output
        return with_output(opt, out, err, [&](std::ostream& sink) {
            if (opt.format == OutputFormat::csv)
                write_summary_csv(sink, cells);
            else
                write_summary_pretty(sink, cells);
        });
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
}

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    if (args.empty()) {
        err << usage_text();
        return 2;
    }

    ParseResult first = parse_args(args);
    if (!first.ok()) {
        err << "error: " << first.error->message << '\n';
        err << "run with --help for usage\n";
        return 2;
    }

    CliOptions options = first.options;
    if (!first.options.config_path.empty() && !first.options.show_help) {
        ConfigFile file = load_config_file(first.options.config_path);
        ConfigTokens tokens = config_to_args(file);
        if (tokens.error) {
            err << "error: " << tokens.error->message << '\n';
            return 2;
        }
        // Re-parse with file tokens ahead of the explicit flags: last wins,
        // so command-line flags override file values.
        std::vector<std::string> merged;
        merged.push_back(command_name(first.options.command));
        merged.insert(merged.end(), tokens.tokens.begin(), tokens.tokens.end());
        merged.insert(merged.end(), args.begin() + 1, args.end());
        ParseResult second = parse_args(merged);
        if (!second.ok()) {
            err << "error: " << second.error->message << '\n';
            return 2;
        }
        options = second.options;
    }

    if (auto envErr = apply_env_seed(options)) {
        err << "error: " << envErr->message << '\n';
        return 2;
    }
    if (options.show_help || options.command == Command::help) {
        out << usage_text();
        return 0;
    }
    if (auto rangeErr = validate_options(options)) {
        err << "error: " << rangeErr->message << '\n';
        return 2;
    }
    return run_cli(options, out, err);
}

std::string usage_text() {
    return
        "mti - missing-tag identification simulator\n"
        "\n"
        "usage: mti <command> [flags]\n"
        "\n"
        "commands:\n"
        "  run       simulate one parameter cell; prints per-trial CSV records\n"
        "  sweep     simulate a parameter grid; prints per-cell summary CSV\n"
        "  bounds    print analytic lower-bound and per-protocol reference curves\n"
        "  selftest  run built-in consistency checks (exit 0 iff all pass)\n"
        "  help      show this text\n"
        "\n"
        "flags:\n"
        "  --algorithm LIST  cpt, polling, pcmti, mmti, sfmti, or all (default cpt)\n"
        "  --n LIST          tagged population size(s), required for run/sweep/bounds\n"
        "  --alpha LIST      missing fraction(s) in [0,1] (default 0.01)\n"
        "  --epsilon LIST    identification tolerance(s) (default 0.01; 0 = exhaustive)\n"
        "  --delta LIST      failure probability bound(s) (default 0.1)\n"
        "  --trials K        trials per cell (default 1)\n"
        "  --seed S          base seed; falls back to MTI_SEED, then 0\n"
        "  --rho R           frame load factor estimate (default 1.0)\n"
        "  --out PATH        write output to PATH instead of standard output\n"
        "  --config PATH     flat 'key = value' file mirroring flag names; flags win\n"
        "  --format F        csv or pretty (default pretty)\n"
        "  --allow-out-of-range  accept epsilon > 0.5 or delta >= 1/3\n"
        "  -h, --help        show this text\n"
        "\n"
        "Comma lists (e.g. --epsilon 0.01,0.02,0.05) define sweep grids; the run\n"
        "command takes single values only. With --format csv nothing but CSV is\n"
        "written to standard output. Exit codes: 0 success, 1 runtime or selftest\n"
        "failure, 2 usage error.\n";
}

}  // namespace mti
