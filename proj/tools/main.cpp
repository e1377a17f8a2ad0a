#include <iostream>
#include <string>
#include <vector>

#include <mmjump/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmjump::run_cli(args, std::cout, std::cerr);
}
