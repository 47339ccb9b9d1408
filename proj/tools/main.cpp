#include <iostream>

#include "fracbayes/app/commands.hpp"

int main(int argc, char** argv) {
  return fracbayes::app::run_cli(argc, argv, std::cout, std::cerr);
}
