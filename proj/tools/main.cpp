#include "cli_main.hpp"

int main(int argc, char** argv) {
  return autospec::cli_main(std::vector<std::string>(argv, argv + argc));
}
