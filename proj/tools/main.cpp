#include <string>
#include <vector>

#include "stfem/harness.hpp"

int main(int argc, char** argv) {
  return stfem::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
