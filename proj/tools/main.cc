#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  return stparse::cli::Run({argv + 1, argv + argc}, std::cout, std::cerr);
}
