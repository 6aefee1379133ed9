#include <iostream>

#include "powerlawst_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return powerlawst::cli::dispatch(args, std::cout, std::cerr);
}
