#include "ncstein/runner.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of noncommutative Stein-type inequalities"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string seed_text;
  app.add_option("command", command, "axioms | check | search | table")->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_path, "report path (default: config \"output\", else stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--seed", seed_text, "seed override (takes precedence over NCSTEIN_SEED)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read config '" + config_path + "'");
    std::stringstream text;
    text << f.rdbuf();
    ncstein::RunConfig cfg = ncstein::parse_config(text.str(), ncstein::parse_command(command));
    std::optional<std::uint64_t> flag_seed;
    if (!seed_text.empty()) flag_seed = ncstein::parse_seed(seed_text);
    cfg.seed = ncstein::resolve_seed(cfg.seed, flag_seed, std::getenv(ncstein::kSeedEnvironment));
    if (!out_path.empty()) cfg.output = out_path;
    if (!format.empty()) cfg.format = ncstein::parse_report_format(format);
    return ncstein::run_command(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
