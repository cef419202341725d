#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "starnet/cli.hpp"
#include "starnet/config.hpp"
#include "starnet/qops.hpp"

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

const char* summary_of(const std::string& command) {
  static const std::map<std::string, const char*> text = {
      {"spectrum", "analytic star spectrum (j, m, E) with a numeric cross-check"},
      {"wstate", "central-spin measurement on the star ground state"},
      {"evolve", "dephased chain evolution: site populations and register E_F"},
      {"scan", "E_F(tau) and its maximum E_m for one chain"},
      {"sweep", "E_m over chain lengths and dephasing times"},
      {"fit", "exponential fit of E_m over the (M, T2) grid"},
      {"disorder", "Monte Carlo over disordered chain spacings"},
      {"loss", "E_m over all one- and two-spin loss configurations"},
      {"gradient", "field-gradient sensing with distributed pairs"},
  };
  return text.at(command);
}

int config_error(const std::string& message) {
  std::cerr << nlohmann::json{{"error", "invalid_config"},
                              {"message", message},
                              {"exit_code", starnet::cli::kInvalidConfig}}
                   .dump()
            << '\n';
  return starnet::cli::kInvalidConfig;
}

struct Sub {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace starnet;
  CLI::App app{"starnet: entanglement distribution in NV star networks"};
  app.set_version_flag("--version", std::string(STARNET_VERSION));
  app.require_subcommand(1, 1);

  std::map<std::string, Sub> subs;
  for (const auto& command : config::kCommands) {
    Sub& sub = subs[command];
    sub.app = app.add_subcommand(command, summary_of(command));
    sub.app->add_option("--config", sub.config_file, "flat key = value config file; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& key : config::known_keys()) {
      sub.options[key.key] = sub.app->add_option(flag_name(key.key), sub.values[key.key], key.help)
                                 ->default_str(config::default_for(command, key.key));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_error(e.what());
  }

  for (auto& [command, sub] : subs) {
    if (!sub.app->parsed()) continue;
    try {
      std::map<std::string, std::string> file_values;
      if (!sub.config_file.empty()) {
        std::ifstream f(sub.config_file);
        std::stringstream ss;
        ss << f.rdbuf();
        file_values = config::parse_document(ss.str());
      }
      std::map<std::string, std::string> flag_values;
      for (const auto& [key, opt] : sub.options) {
        if (opt->count() > 0) flag_values[key] = sub.values[key];
      }
      const auto cfg = config::resolve(command, file_values, flag_values);
      return cli::run(cfg, std::cerr);
    } catch (const InvalidArgument& e) {
      return config_error(e.what());
    }
  }
  return config_error("no command given");
}
