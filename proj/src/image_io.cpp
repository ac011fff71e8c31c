#include "lensless/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "lensless/binary.hpp"

namespace lensless {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw std::runtime_error("truncated PGM header");
  return tok;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const RasterImage& image) {
  auto out = open_out(path);
  const auto& g = image.grid();
  out << "P5\n" << g.width() << ' ' << g.height() << "\n65535\n";
  const auto [lo, hi] = std::minmax_element(image.values().begin(), image.values().end());
  const double span = *hi - *lo;
  for (double v : image.values()) {
    const double t = span > 0.0 ? (v - *lo) / span : 0.0;
    const auto s = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    out.put(static_cast<char>(s >> 8));  // PGM samples are big-endian
    out.put(static_cast<char>(s & 0xFF));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RasterImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto magic = header_token(in);
  if (magic != "P5" && magic != "P2") throw std::runtime_error(path.string() + ": not a PGM file");
  const auto width = std::stoul(header_token(in));
  const auto height = std::stoul(header_token(in));
  const auto maxval = std::stoul(header_token(in));
  if (maxval == 0 || maxval > 65535) throw std::runtime_error(path.string() + ": bad maxval");
  RasterImage img(ImageGrid(width, height));
  for (std::size_t i = 0; i < img.size(); ++i) {
    unsigned long sample;
    if (magic == "P2") {
      sample = std::stoul(header_token(in));
    } else if (maxval < 256) {
      const int b = in.get();
      if (b == EOF) throw std::runtime_error(path.string() + ": truncated pixel data");
      sample = static_cast<unsigned long>(b);
    } else {
      const int hi = in.get();
      const int lo = in.get();
      if (lo == EOF) throw std::runtime_error(path.string() + ": truncated pixel data");
      sample = (static_cast<unsigned long>(hi) << 8) | static_cast<unsigned long>(lo);
    }
    img[i] = static_cast<double>(sample) / static_cast<double>(maxval);
  }
  return img;
}

void write_kernel_raw(const std::filesystem::path& path, const Kernel& kernel) {
  auto out = open_out(path);
  const auto& g = kernel.grid();
  binary::put_i32(out, static_cast<std::int32_t>(g.width()));
  binary::put_i32(out, static_cast<std::int32_t>(g.height()));
  binary::put_i32(out, static_cast<std::int32_t>(kernel.kind()));
  for (double v : kernel.image().values()) binary::put_f64(out, v);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Kernel read_kernel_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto w = binary::get_i32(in);
  const auto h = binary::get_i32(in);
  const auto kind = binary::get_i32(in);
  if (w <= 0 || h <= 0 || (kind != 0 && kind != 1)) throw std::runtime_error(path.string() + ": bad kernel header");
  RasterImage img(ImageGrid(static_cast<std::size_t>(w), static_cast<std::size_t>(h)));
  for (double& v : img.values()) v = binary::get_f64(in);
  return Kernel(std::move(img), static_cast<KernelKind>(kind));
}

}  // namespace lensless
