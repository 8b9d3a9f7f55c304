#include "psml_app/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return psml::app::run(argc, argv, std::cout, std::cerr);
}
