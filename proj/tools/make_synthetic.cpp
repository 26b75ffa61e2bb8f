// Writes the seeded synthetic benchmark dataset: make_synthetic <dir> [seed]

#include "cia/fixtures.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic <dir> [seed]\n";
    return 64;
  }
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 2024;
  try {
    const auto info = cia::fixtures::writeSyntheticDataset(argv[1], seed);
    std::cout << info.count << " structures, " << info.symmetricCount << " symmetric\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 70;
  }
  return 0;
}
