#include <iostream>

#include "tropmoduli/cli.hpp"

int main(int argc, char** argv) {
  return tropmoduli::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
