// Copyright 2026 The parares Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "parares/version.hpp"

namespace {

using parares::cli::ConfigError;
using parares::cli::RunConfig;
using nlohmann::json;

constexpr const char* kWorkersEnv = "PARARES_WORKERS";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = parares::cli;
  CLI::App app{"Parametric resonance of trapped condensates: variational models, Floquet "
               "charts, sweeps and GPE runs."};
  app.set_version_flag("--version", std::string(parares::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool dump = false;
  app.add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--dump-config", dump, "Print the resolved configuration and exit");

  // One flag per configuration leaf; values are JSON (bare words are strings).
  std::map<std::string, std::string> overrides;
  for (const auto& key : cli::leaf_keys()) {
    app.add_option("--" + key, overrides[key], "Override " + key)->type_name("JSON");
  }

  cli::VerifyOptions verify;
  auto* sim = app.add_subcommand("simulate", "Integrate one trajectory");
  auto* swp = app.add_subcommand("sweep", "Resonance map, damping threshold or limit cycle");
  auto* flq = app.add_subcommand("floquet", "Trace instability wedge boundaries");
  auto* asy = app.add_subcommand("asymptote", "Asymptotic growth and band predictions");
  auto* gpe = app.add_subcommand("gpe", "Evolve the Gross-Pitaevskii equation");
  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  ver->add_flag("--full", verify.full, "Include the long PDE comparison");
  ver->add_option("--only", verify.only, "Criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kValidation;
  }

  std::string text;
  RunConfig config;
  try {
    json j = json::object();
    if (!config_path.empty()) {
      text = read_file(config_path);
      j = cli::parse_text(text);
    }
    if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
      const std::string value = env;
      if (value.find_first_not_of("0123456789") != std::string::npos || value.size() > 9) {
        throw ConfigError(kWorkersEnv, "expected a non-negative integer");
      }
      j["workers"] = std::stoul(value);
    }
    for (const auto& key : cli::leaf_keys()) {
      if (app.count("--" + key) > 0) cli::apply_override(j, key, overrides[key]);
    }
    config = cli::from_json(j);
    config.validate();
  } catch (const ConfigError& e) {
    int line = e.line;
    if (line == 0 && !text.empty() && !e.path().empty()) line = cli::locate(text, e.path());
    std::cerr << "parares: config error: " << e.what();
    if (line > 0) std::cerr << " (" << config_path << ":" << line << ")";
    std::cerr << '\n';
    return cli::kValidation;
  }

  if (dump) {
    std::cout << cli::to_json(config).dump(2) << '\n';
    return cli::kSuccess;
  }

  try {
    if (*sim) return cli::cmd_simulate(config);
    if (*swp) return cli::cmd_sweep(config);
    if (*flq) return cli::cmd_floquet(config);
    if (*asy) return cli::cmd_asymptote(config);
    if (*gpe) return cli::cmd_gpe(config);
    return cli::cmd_verify(config, verify);
  } catch (const ConfigError& e) {
    std::cerr << "parares: config error: " << e.what() << '\n';
    return cli::kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parares: invalid input: " << e.what() << '\n';
    return cli::kValidation;
  } catch (const std::exception& e) {
    std::cerr << "parares: computation failed: " << e.what() << '\n';
    return cli::kComputation;
  }
}
