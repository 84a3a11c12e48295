#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "qbaker/brqmi.hpp"
#include "qbaker/errors.hpp"

namespace fs = std::filesystem;

namespace qbaker {

namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  if (token.empty()) throw FormatError(path.string() + ": truncated PGM header");
  return token;
}

std::size_t parse_header_number(const std::string& token, const fs::path& path) {
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != token.size()) throw FormatError(path.string() + ": bad PGM header field '" + token + "'");
  return value;
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  if (next_token(in, path) != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = parse_header_number(next_token(in, path), path);
  img.height = parse_header_number(next_token(in, path), path);
  const std::size_t maxval = parse_header_number(next_token(in, path), path);
  if (maxval == 0 || maxval > 65535) throw FormatError(path.string() + ": PGM maxval out of range");
  img.max_value = static_cast<std::uint32_t>(maxval);
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const std::size_t count = img.width * img.height;
  std::string raw(count * bytes_per_sample, '\0');
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError(path.string() + ": truncated PGM data");
  img.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t v;
    if (bytes_per_sample == 1) {
      v = static_cast<unsigned char>(raw[i]);
    } else {
      v = (std::uint32_t{static_cast<unsigned char>(raw[2 * i])} << 8) | static_cast<unsigned char>(raw[2 * i + 1]);
    }
    if (v > img.max_value) throw FormatError(path.string() + ": sample exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& img) {
  if (img.max_value == 0 || img.max_value > 65535) throw FormatError("PGM maxval must be in [1, 65535]");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << '\n' << img.max_value << '\n';
  std::string raw;
  const bool wide = img.max_value > 255;
  raw.reserve(img.pixels.size() * (wide ? 2 : 1));
  for (std::uint32_t v : img.pixels) {
    if (wide) raw.push_back(static_cast<char>((v >> 8) & 0xFF));
    raw.push_back(static_cast<char>(v & 0xFF));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<fs::path> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw FormatError("cannot open manifest " + manifest.string());
  std::vector<fs::path> paths;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    fs::path entry = line.substr(first, last - first + 1);
    paths.push_back(entry.is_absolute() ? entry : manifest.parent_path() / entry);
  }
  if (paths.empty()) throw FormatError("manifest " + manifest.string() + " lists no images");
  return paths;
}

MultiImage load_multi(const fs::path& manifest) {
  MultiImage img;
  for (const auto& path : read_manifest(manifest)) {
    GrayImage gray = read_pgm(path);
    if (gray.width != gray.height) throw FormatError(path.string() + ": image is not square");
    if (!std::has_single_bit(gray.width)) throw FormatError(path.string() + ": side is not a power of two");
    if (!std::has_single_bit(std::size_t{gray.max_value} + 1)) {
      throw FormatError(path.string() + ": maxval is not 2^L - 1");
    }
    const int n = std::countr_zero(gray.width);
    const int depth = std::countr_zero(std::size_t{gray.max_value} + 1);
    if (img.images.empty()) {
      img.n = n;
      img.bit_depth = depth;
    } else if (n != img.n) {
      throw FormatError(path.string() + ": size differs from the first image");
    } else if (depth != img.bit_depth) {
      throw FormatError(path.string() + ": maxval differs from the first image");
    }
    img.images.push_back(std::move(gray.pixels));
  }
  try {
    img.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
  return img;
}

void save_multi(const MultiImage& img, const fs::path& manifest) {
  img.validate();
  if (img.bit_depth > 16) throw FormatError("PGM output supports at most 16-bit pixels");
  const fs::path dir = manifest.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = manifest.stem().string();
  std::ofstream list(manifest);
  if (!list) throw FormatError("cannot write manifest " + manifest.string());
  list << "# " << img.images.size() << " images, " << img.side() << "x" << img.side() << ", " << img.bit_depth
       << "-bit\n";
  for (std::size_t m = 0; m < img.images.size(); ++m) {
    std::ostringstream name;
    name << stem << '_';
    name.width(3);
    name.fill('0');
    name << m << ".pgm";
    GrayImage gray{img.side(), img.side(), img.max_value(), img.images[m]};
    write_pgm(dir / name.str(), gray);
    list << name.str() << '\n';
  }
  if (!list) throw FormatError("failed writing manifest " + manifest.string());
}

}  // namespace qbaker
