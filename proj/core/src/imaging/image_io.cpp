#include "ivusim/imaging/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace ivusim {
namespace {

namespace fs = std::filesystem;

bool is_png(const fs::path& p) {
  auto ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(ch));
  return ext == ".png";
}

std::string pgm_token(std::istream& in) {
  std::string tok;
  while (in) {
    int ch = in.get();
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    if (ch == EOF) break;
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

Grid<unsigned char> read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw Error(path.string() + ": not a binary PGM");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(pgm_token(in));
    h = std::stoul(pgm_token(in));
    maxval = std::stoul(pgm_token(in));
  } catch (const std::exception&) {
    throw Error(path.string() + ": malformed PGM header");
  }
  if (maxval == 0 || maxval > 255 || w == 0 || h == 0) {
    throw Error(path.string() + ": unsupported PGM (need 8-bit, non-empty)");
  }
  std::vector<unsigned char> buf(w * h);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw Error(path.string() + ": truncated PGM payload");
  }
  if (maxval != 255) {
    for (auto& v : buf) v = static_cast<unsigned char>(std::lround(v * 255.0 / maxval));
  }
  return Grid<unsigned char>(h, w, std::move(buf));
}

void write_pgm(const fs::path& path, const Grid<unsigned char>& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << g.cols() << ' ' << g.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(g.values().data()),
            static_cast<std::streamsize>(g.size()));
  if (!out) throw Error("write failed: " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Grid<unsigned char> read_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(path.string() + ": corrupt PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);
  const std::size_t w = png_get_image_width(png, info);
  const std::size_t h = png_get_image_height(png, info);
  Grid<unsigned char> g(h, w);
  std::vector<png_bytep> rows(h);
  for (std::size_t r = 0; r < h; ++r) rows[r] = g.row(r).data();
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return g;
}

void write_png(const fs::path& path, const Grid<unsigned char>& g) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(g.cols()),
               static_cast<png_uint_32>(g.rows()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    png_write_row(png, const_cast<png_bytep>(g.row(r).data()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Grid<unsigned char> read_u8(const fs::path& path) {
  return is_png(path) ? read_png(path) : read_pgm(path);
}

void write_u8(const fs::path& path, const Grid<unsigned char>& g) {
  if (g.empty()) throw ValidationError("refusing to write empty raster " + path.string());
  if (is_png(path)) {
    write_png(path, g);
  } else {
    write_pgm(path, g);
  }
}

Grid<double> read_gray8(const fs::path& path) {
  auto raw = read_u8(path);
  Grid<double> out(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.size(); ++i) out.values()[i] = raw.values()[i] / 255.0;
  return out;
}

void write_gray8(const fs::path& path, const Grid<double>& g) {
  Grid<unsigned char> raw(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = g.values()[i];
    if (!std::isfinite(v)) throw ValidationError("write_gray8: non-finite pixel in " + path.string());
    raw.values()[i] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  write_u8(path, raw);
}

std::optional<Domain> domain_from_filename(const fs::path& path) {
  const auto name = path.filename().string();
  if (name.find(".polar.") != std::string::npos) return Domain::kPolar;
  if (name.find(".cart.") != std::string::npos) return Domain::kCartesian;
  return std::nullopt;
}

}  // namespace ivusim
