#include <iostream>

#include "npc/cli.hpp"

int main(int argc, char** argv) {
  return npc::run(argc, argv, std::cout, std::cerr);
}
