#include "waistlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return waistlab::cli::run_command(args);
}
