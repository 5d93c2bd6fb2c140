#include <string>
#include <vector>

#include "orthant/cli.hpp"

int main(int argc, char** argv) {
  return orthant::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
