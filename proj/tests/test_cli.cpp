#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mti/cli.hpp"

using namespace mti;

namespace {

ParseResult parse(std::initializer_list<const char*> tokens) {
    std::vector<std::string> args;
    for (const char* t : tokens) args.emplace_back(t);
    return parse_args(args);
}

int main_with(std::initializer_list<const char*> tokens, std::string* out_text = nullptr,
              std::string* err_text = nullptr) {
    std::vector<const char*> argv{"mti"};
    for (const char* t : tokens) argv.push_back(t);
    std::ostringstream out, err;
    int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("the canonical run invocation parses completely") {
    ParseResult r = parse({"run", "--algorithm", "cpt", "--n", "50000", "--alpha",
                           "0.01", "--epsilon", "0.01", "--delta", "0.1", "--trials",
                           "100", "--seed", "42"});
    REQUIRE(r.ok());
    CHECK(r.options.command == Command::run);
    REQUIRE(r.options.algorithms.size() == 1);
    CHECK(r.options.algorithms[0] == Algorithm::cpt);
    CHECK(r.options.ns == std::vector<uint64_t>{50000});
    CHECK(r.options.alphas == std::vector<double>{0.01});
    CHECK(r.options.epsilons == std::vector<double>{0.01});
    CHECK(r.options.deltas == std::vector<double>{0.1});
    CHECK(r.options.trials == 100);
    CHECK(r.options.seed == 42);
    CHECK_FALSE(validate_options(r.options).has_value());
}

TEST_CASE("comma lists become sweep grids") {
    ParseResult r = parse({"sweep", "--n", "100,200,400", "--epsilon",
                           "0.01,0.02,0.05", "--algorithm", "cpt,pcmti"});
    REQUIRE(r.ok());
    CHECK(r.options.ns == std::vector<uint64_t>{100, 200, 400});
    CHECK(r.options.epsilons == std::vector<double>{0.01, 0.02, 0.05});
    CHECK(r.options.algorithms ==
          std::vector<Algorithm>{Algorithm::cpt, Algorithm::pcmti});
}

TEST_CASE("algorithm shorthand all expands to every protocol") {
    ParseResult r = parse({"run", "--n", "10", "--algorithm", "all"});
    REQUIRE(r.ok());
    CHECK(r.options.algorithms.size() == 5);
}

TEST_CASE("unknown flags and commands are parse errors") {
    CHECK_FALSE(parse({"run", "--bogus", "1"}).ok());
    CHECK_FALSE(parse({"fly", "--n", "10"}).ok());
    CHECK_FALSE(parse({"--n", "10"}).ok());  // flag before command
    CHECK_FALSE(parse({"run", "extra"}).ok());
    CHECK_FALSE(parse({"run", "--n"}).ok());  // missing value
    CHECK_FALSE(parse({"run", "--n", "ten"}).ok());
    CHECK_FALSE(parse({"run", "--format", "xml"}).ok());
    CHECK_FALSE(parse({"run", "--algorithm", "cpt,warp"}).ok());
}

TEST_CASE("repeated flags follow last-wins") {
    ParseResult r = parse({"run", "--n", "10", "--n", "20"});
    REQUIRE(r.ok());
    CHECK(r.options.ns == std::vector<uint64_t>{20});
}

TEST_CASE("confidence parameter outside the analysis window needs an override") {
    ParseResult r = parse({"run", "--n", "100", "--delta", "0.5"});
    REQUIRE(r.ok());
    CHECK(validate_options(r.options).has_value());

    ParseResult forced =
        parse({"run", "--n", "100", "--delta", "0.5", "--allow-out-of-range"});
    REQUIRE(forced.ok());
    CHECK_FALSE(validate_options(forced.options).has_value());

    // delta = 1 is invalid outright
    ParseResult hard =
        parse({"run", "--n", "100", "--delta", "1.0", "--allow-out-of-range"});
    REQUIRE(hard.ok());
    CHECK(validate_options(hard.options).has_value());
}

TEST_CASE("validation rejects degenerate counts and rates") {
    CHECK(validate_options(parse({"run", "--n", "0"}).options).has_value());
    CHECK(validate_options(parse({"sweep", "--n", "10", "--trials", "0"}).options)
              .has_value());
    CHECK(validate_options(parse({"run", "--n", "10", "--rho", "0"}).options)
              .has_value());
    CHECK(validate_options(parse({"run", "--n", "10", "--alpha", "1.5"}).options)
              .has_value());
    // run takes scalars only
    CHECK(validate_options(parse({"run", "--n", "10,20"}).options).has_value());
    // sweep welcomes the same list
    CHECK_FALSE(validate_options(parse({"sweep", "--n", "10,20"}).options).has_value());
    // a grid needs a population
    CHECK(validate_options(parse({"run"}).options).has_value());
}

TEST_CASE("config text parses flat key-value lines") {
    ConfigFile file = parse_config_text(
        "# defaults for desk experiments\n"
        "n = 500\n"
        "epsilon = 0.02\n"
        "format = csv   # trailing comment\n"
        "\n");
    REQUIRE_FALSE(file.error.has_value());
    CHECK(file.values.at("n") == "500");
    CHECK(file.values.at("epsilon") == "0.02");
    CHECK(file.values.at("format") == "csv");

    CHECK(parse_config_text("just words\n").error.has_value());
    CHECK(parse_config_text("key =\n").error.has_value());
}

TEST_CASE("config tokens mirror flags and reject unknown or cyclic keys") {
    ConfigFile file = parse_config_text("n = 500\nallow-out-of-range = true\n");
    ConfigTokens tokens = config_to_args(file);
    REQUIRE_FALSE(tokens.error.has_value());
    CHECK(tokens.tokens ==
          std::vector<std::string>{"--allow-out-of-range", "--n", "500"});

    CHECK(config_to_args(parse_config_text("config = other.cfg\n")).error.has_value());
    CHECK(config_to_args(parse_config_text("frobnicate = 9\n")).error.has_value());
    CHECK(config_to_args(parse_config_text("allow-out-of-range = maybe\n"))
              .error.has_value());
}

TEST_CASE("command-line flags override config file values") {
    const char* path = "/tmp/mti_test_config.txt";
    {
        std::ofstream f(path);
        f << "n = 500\ntrials = 2\nseed = 9\nformat = csv\n";
    }
    std::string out;
    int code = main_with({"run", "--algorithm", "polling", "--config", path, "--n",
                          "50"},
                         &out);
    CHECK(code == 0);
    // the flag population (50) wins over the file value (500); the file's
    // trial count (2) and format (csv) survive
    CHECK(out.find("polling,50,") != std::string::npos);
    CHECK(out.find("polling,500,") == std::string::npos);
    CHECK(out.rfind("algorithm,", 0) == 0);  // pure CSV on stdout
    std::remove(path);
}

TEST_CASE("missing config files are usage errors") {
    std::string err;
    int code = main_with({"run", "--n", "10", "--config", "/tmp/definitely-absent.cfg"},
                         nullptr, &err);
    CHECK(code == 2);
    CHECK(err.find("config") != std::string::npos);
}

TEST_CASE("environment seed fills in when no flag is given") {
    setenv("MTI_SEED", "777", 1);
    CliOptions opt;
    CHECK_FALSE(apply_env_seed(opt).has_value());
    CHECK(opt.seed == 777);

    CliOptions with_flag;
    with_flag.seed = 5;
    CHECK_FALSE(apply_env_seed(with_flag).has_value());
    CHECK(with_flag.seed == 5);

    setenv("MTI_SEED", "not-a-number", 1);
    CliOptions bad;
    CHECK(apply_env_seed(bad).has_value());
    unsetenv("MTI_SEED");
}

TEST_CASE("cli_main end to end: run emits per-trial CSV") {
    std::string out;
    int code = main_with({"run", "--algorithm", "polling", "--n", "40", "--alpha",
                          "0.1", "--trials", "3", "--seed", "1", "--format", "csv"},
                         &out);
    CHECK(code == 0);
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("algorithm,n,alpha", 0) == 0);
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("cli_main end to end: sweep emits per-cell summary CSV") {
    std::string out;
    int code = main_with({"sweep", "--algorithm", "polling,cpt", "--n", "30,60",
                          "--trials", "2", "--seed", "1", "--format", "csv"},
                         &out);
    CHECK(code == 0);
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("algorithm,n,alpha,epsilon,delta,trials,", 0) == 0);
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("cli_main end to end: bounds renders reference curves") {
    std::string out;
    int code = main_with({"bounds", "--n", "1024", "--alpha", "0", "--epsilon", "0.1",
                          "--delta", "0", "--format", "csv"},
                         &out);
    CHECK(code == 0);
    CHECK(out.find("lower_bound") != std::string::npos);
    CHECK(out.find("132.503") != std::string::npos);
}

TEST_CASE("cli_main usage and error paths") {
    std::string out, err;
    CHECK(main_with({}, &out, &err) == 2);
    CHECK(err.find("usage") != std::string::npos);

    CHECK(main_with({"--help"}, &out, &err) == 0);
    CHECK(out.find("usage") != std::string::npos);

    CHECK(main_with({"help"}, &out) == 0);

    CHECK(main_with({"run", "--n", "10", "--delta", "0.5"}, &out, &err) == 2);
    CHECK(main_with({"warp", "--n", "10"}, &out, &err) == 2);

    // selftest succeeds on the shipped build
    CHECK(main_with({"selftest"}, &out) == 0);
    CHECK(out.find("ok ") != std::string::npos);
}

TEST_CASE("run rejects unwritable output paths at runtime") {
    std::string err;
    int code = main_with({"run", "--algorithm", "polling", "--n", "10", "--out",
                          "/nonexistent-dir/x.csv"},
                         nullptr, &err);
    CHECK(code == 1);
    CHECK(err.find("output") != std::string::npos);
}
