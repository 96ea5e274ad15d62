// Command line front end: `rhtail run <config.json> [--out DIR] [--seed S]`
// runs one experiment and writes report.json plus per-ball CSV tables;
// `rhtail schema` prints the accepted config layout.
//
// Exit codes: 0 all assertions pass, 1 numerical assertion failure,
// 2 config/schema violation.

#include <fstream>
#include <iostream>
#include <string>

#include "json.hpp"
#include "rhtail/experiment.hpp"

namespace {

void usage(std::ostream& os) {
  os << "usage:\n"
     << "  rhtail run <config.json> [--out DIR] [--seed S]\n"
     << "  rhtail schema\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage(std::cerr);
    return 2;
  }
  std::string cmd = argv[1];
  if (cmd == "schema") {
    std::cout << rhtail::config_schema_text() << "\n";
    return 0;
  }
  if (cmd != "run" || argc < 3) {
    usage(std::cerr);
    return 2;
  }

  std::string config_path = argv[2];
  std::string out_dir = "out";
  std::string seed_override;
  for (int i = 3; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      seed_override = argv[++i];
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      usage(std::cerr);
      return 2;
    }
  }

  nlohmann::json config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << config_path << ": cannot open\n";
      return 2;
    }
    config = nlohmann::json::parse(in);  // parse errors carry line/column
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  }
  if (!seed_override.empty()) config["seed"] = std::stoull(seed_override);

  try {
    rhtail::validate_config(config, config_path);
  } catch (const rhtail::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    nlohmann::json report = rhtail::run_experiment(config, out_dir);
    bool pass = report.at("pass").get<bool>();
    for (const auto& a : report.at("assertions"))
      std::cout << (a.at("pass").get<bool>() ? "[pass] " : "[FAIL] ")
                << a.at("name").get<std::string>() << " value=" << a.at("value").dump()
                << " threshold=" << a.at("threshold").dump() << "\n";
    std::cout << (pass ? "PASS" : "FAIL") << " report: " << out_dir << "/report.json\n";
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
