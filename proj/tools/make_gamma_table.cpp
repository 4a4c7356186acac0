// Regenerates data/lindblad_gamma_synthetic.txt.
#include <cstdio>
#include <string>

#include "qdos/noisemodel/channels.hpp"

int main(int argc, char** argv) {
  using namespace qdos::noisemodel;
  const std::string path = argc > 1 ? argv[1] : bundled_gamma_path();
  char comment[160];
  std::snprintf(comment, sizeof comment,
                "Synthetic rates: synthetic_gamma_table(%zu, %llu). Not measured on hardware.",
                kBundledGammaSets, static_cast<unsigned long long>(kBundledGammaSeed));
  write_gamma_table(path, synthetic_gamma_table(kBundledGammaSets, kBundledGammaSeed), comment);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}
