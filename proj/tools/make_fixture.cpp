// Writes the synthetic demo data directory (default: data/).

#include <iostream>

#include <CLI11.hpp>

#include "quakesim/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic fixture data directory"};
  std::string out = QUAKESIM_DATA_DIR;
  app.add_option("--out", out, "target directory");
  CLI11_PARSE(app, argc, argv);
  try {
    quakesim::fixture::write(out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  std::cout << "wrote " << out << '\n';
  return 0;
}
