#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "solitonlab_tools/commands.hpp"
#include "solitonlab_tools/config.hpp"

int main(int argc, char** argv) {
  using namespace solitonlab::tools;
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string help;
    const auto config = parse_run_config(args, &help);
    if (!config) {
      std::cout << help;
      return exit_ok;
    }
    return run(*config, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return exit_invalid_config;
  }
}
