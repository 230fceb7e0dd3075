#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  return carnot_cli::cli_main(argc, argv, std::cout, std::cerr);
}
