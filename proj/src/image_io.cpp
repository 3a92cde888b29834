#include "hbw/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "hbw/error.hpp"

namespace hbw {
namespace {

constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// Skips whitespace and '#' comments between PGM header tokens.
void skip_header_space(std::istream& in) {
  while (in) {
    int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (c != std::char_traits<char>::eof() && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
}

long read_header_int(std::istream& in, const std::filesystem::path& path) {
  skip_header_space(in);
  long value = -1;
  if (!(in >> value) || value < 0) {
    throw Error(ErrorCode::corrupt_header, "malformed PGM header in " + path.string());
  }
  return value;
}

IntensityImage load_pgm(std::ifstream& in, const std::filesystem::path& path) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P') {
    throw Error(ErrorCode::unsupported_format, "not a PGM file: " + path.string());
  }
  if (magic[1] != '5') {
    throw Error(ErrorCode::unsupported_format,
                std::string("only binary P5 PGM is accepted, got P") + magic[1] + " in " + path.string());
  }
  const long cols = read_header_int(in, path);
  const long rows = read_header_int(in, path);
  const long maxval = read_header_int(in, path);
  if (cols < 1 || rows < 1) {
    throw Error(ErrorCode::corrupt_header, "PGM dimensions must be positive in " + path.string());
  }
  if (maxval != 255) {
    throw Error(ErrorCode::unsupported_format,
                "only 8-bit PGM (maxval 255) is accepted, got maxval " + std::to_string(maxval));
  }
  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == std::char_traits<char>::eof() || !std::isspace(sep)) {
    throw Error(ErrorCode::corrupt_header, "missing raster separator in " + path.string());
  }

  std::vector<unsigned char> raster(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw Error(ErrorCode::corrupt_header, "truncated PGM raster in " + path.string());
  }

  MatrixXd pixels(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) pixels(r, c) = raster[static_cast<std::size_t>(r * cols + c)];
  return IntensityImage(std::move(pixels), 255.0);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

IntensityImage load_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::file_not_found, path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::corrupt_header, "cannot allocate PNG reader");
  }

  // libpng reports errors via longjmp; nothing with a destructor may be live
  // between setjmp and the last libpng call below.
  std::vector<unsigned char> raster;
  std::vector<png_bytep> row_ptrs;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  volatile bool bad_format = false;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::corrupt_header, "corrupt PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 8) {
    bad_format = true;
  } else {
    raster.resize(static_cast<std::size_t>(width) * height);
    row_ptrs.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = raster.data() + static_cast<std::size_t>(r) * width;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (bad_format) {
    throw Error(ErrorCode::unsupported_format,
                "only 8-bit grayscale PNG is accepted (color type " + std::to_string(color_type) +
                    ", bit depth " + std::to_string(bit_depth) + ") in " + path.string());
  }

  MatrixXd pixels(height, width);
  for (png_uint_32 r = 0; r < height; ++r)
    for (png_uint_32 c = 0; c < width; ++c) pixels(r, c) = raster[static_cast<std::size_t>(r) * width + c];
  return IntensityImage(std::move(pixels), 255.0);
}

}  // namespace

IntensityImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::file_not_found, path.string());

  std::array<unsigned char, 8> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  const auto got = in.gcount();
  in.clear();
  in.seekg(0);

  if (got == 8 && head == kPngMagic) {
    in.close();
    return load_png(path);
  }
  if (got < 2) throw Error(ErrorCode::corrupt_header, "file too short: " + path.string());
  return load_pgm(in, path);
}

void save_image(const IntensityImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::write_failure, "cannot open " + path.string());

  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(img.pixel_count()));
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < img.rows(); ++r) {
    for (Eigen::Index c = 0; c < img.cols(); ++c) {
      const double v = std::clamp(img.pixels(r, c), 0.0, img.peak);
      raster[i++] = static_cast<unsigned char>(std::min(255.0, std::round(v)));
    }
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::write_failure, "write failed for " + path.string());
}

}  // namespace hbw
