#include <iostream>
#include <string>
#include <vector>

#include "edgelbp/cli.hpp"

int main(int argc, char** argv) {
  return edgelbp::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
