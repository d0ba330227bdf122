#include <string>
#include <vector>

#include "nirb/cli.hpp"

int main(int argc, char** argv) {
  return nirb::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
