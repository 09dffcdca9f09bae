// potrec <command> <config> [flags]
#include <iostream>
#include <algorithm>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "potrec/commands.hpp"

namespace {

void usage(std::ostream& os) {
  os << "usage: potrec <command> <config> [flags]\ncommands:";
  for (const std::string& c : potrec::command_names()) os << " " << c;
  os << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage(std::cerr);
    return potrec::kExitUnknownCommand;
  }
  const std::string command = argv[1];
  if (command == "-h" || command == "--help") {
    usage(std::cout);
    return potrec::kExitOk;
  }
  if (!potrec::is_command(command)) {
    std::cerr << "potrec: unknown command '" << command << "'\n";
    usage(std::cerr);
    return potrec::kExitUnknownCommand;
  }

  CLI::App app{"potrec " + command};
  app.name("potrec " + command);
  potrec::CommandRequest req;
  req.command = command;
  app.add_option("config", req.config_path, "experiment config file")->required();

  // Flags are shorthands for config keys; anything else belongs in the file.
  std::map<std::string, std::pair<std::string, std::string>> flag_keys;
  if (command == "herglotz") {
    flag_keys = {{"lambda", {"schedule", "lambdas"}},
                 {"eps", {"density", "eps"}},
                 {"direction", {"density", "direction"}},
                 {"grid", {"grid", "N"}}};
  } else if (command == "propagate") {
    flag_keys = {{"T", {"propagate", "T"}}, {"dt", {"propagate", "dt"}}, {"initial", {"propagate", "initial"}}};
  }
  std::map<std::string, std::string> values;
  for (const auto& [flag, key] : flag_keys)
    app.add_option("--" + flag, values[flag], "overrides [" + key.first + "] " + key.second);
  std::string potential;
  if (command == "propagate") app.add_option("--potential", potential, "preset name or SSFLD1 path for V");
  std::string only;
  if (command == "verify-estimates") app.add_option("--only", only, "comma-separated criterion ids");

  try {
    app.parse(argc - 1, argv + 1);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return potrec::kExitValidation;
  }

  for (const auto& [flag, key] : flag_keys)
    if (app.count("--" + flag)) req.overrides[key] = values[flag];
  if (!potential.empty()) {
    const bool preset = potential == "zero" || potential == "gaussian" || potential == "bump" || potential == "dyadic";
    req.overrides[{"potential.v1", "preset"}] = preset ? potential : "file";
    if (!preset) req.overrides[{"potential.v1", "path"}] = potential;
  }
  if (!only.empty()) {
    try {
      std::size_t pos = 0;
      while (pos < only.size()) {
        const std::size_t comma = std::min(only.find(',', pos), only.size());
        req.only.push_back(std::stoi(only.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    } catch (const std::exception&) {
      std::cerr << "potrec: --only expects comma-separated integers\n";
      return potrec::kExitValidation;
    }
    for (int id : req.only)
      if (id < 1 || id > 14) {
        std::cerr << "potrec: no criterion " << id << "\n";
        return potrec::kExitValidation;
      }
  }
  return potrec::run_command(req, std::cout, std::cerr);
}
