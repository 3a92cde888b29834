// Writes the synthetic test images (gaussian, piecewise, sinusoid, noise) as
// P5 PGM files.
#include <CLI11.hpp>

#include <iostream>

#include "hbw/error.hpp"
#include "hbw/image_io.hpp"
#include "hbw/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic grayscale test images"};
  std::string kind;
  std::string out;
  int rows = 64;
  int cols = 64;
  std::uint64_t seed = 1;
  app.add_option("kind", kind, "gaussian | piecewise | sinusoid | noise")
      ->required()
      ->check(CLI::IsMember({"gaussian", "piecewise", "sinusoid", "noise"}));
  app.add_option("--out", out, "Output PGM path")->required();
  app.add_option("--rows", rows)->check(CLI::PositiveNumber);
  app.add_option("--cols", cols)->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Noise seed");
  CLI11_PARSE(app, argc, argv);

  hbw::IntensityImage img;
  if (kind == "gaussian") {
    img = hbw::synthetic::gaussian(rows, cols);
  } else if (kind == "piecewise") {
    img = hbw::synthetic::piecewise_constant(rows, cols);
  } else if (kind == "sinusoid") {
    img = hbw::synthetic::sinusoid_mix(rows, cols);
  } else {
    img = hbw::synthetic::noise(rows, cols, seed);
  }
  try {
    hbw::save_image(img, out);
  } catch (const hbw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
