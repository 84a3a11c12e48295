#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qbaker/cipher.hpp"
#include "qbaker/errors.hpp"

namespace qbaker {

void SecretKey::validate() const {
  if (bit_depth < 1 || bit_depth > kMaxBitDepth) throw std::invalid_argument("key bit depth out of range");
  if (images.empty() || images.size() > static_cast<std::size_t>(kMaxImages)) {
    throw std::invalid_argument("key image count out of range [1, " + std::to_string(kMaxImages) + "]");
  }
  for (const auto& img : images) {
    img.params.validate();
    if (img.q < 4 || img.q > 18) throw std::invalid_argument("key exponent q must lie in [4, 18]");
  }
  for (const auto* stage : {&stage_a, &stage_b}) {
    stage->params.validate();
    if (!std::isfinite(stage->seed.x) || !std::isfinite(stage->seed.y)) {
      throw std::invalid_argument("schedule seed must be finite");
    }
  }
  if (n && (*n < 0 || *n > kMaxSideExponent)) throw std::invalid_argument("key side exponent out of range");
  if ((r_max1 && *r_max1 == 0) || (r_max2 && *r_max2 == 0)) throw std::invalid_argument("r_max must be at least 1");
  if (intensity_sum.has_value() != bit_count.has_value()) {
    throw std::invalid_argument("intensity_sum and bit_count must be set together");
  }
}

namespace {

std::string hex_double(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

void put_params(std::ostringstream& out, const std::string& prefix, const HenonSineParams& p) {
  out << prefix << ".lambda1 = " << hex_double(p.lambda1) << '\n';
  out << prefix << ".lambda2 = " << hex_double(p.lambda2) << '\n';
}

class Fields {
 public:
  explicit Fields(std::string_view text) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string line(text.substr(pos, eol - pos));
      pos = eol + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
      };
      if (eq == std::string::npos) {
        if (!trim(line).empty()) throw FormatError("key line " + std::to_string(line_no) + ": expected 'field = value'");
        continue;
      }
      std::string name = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (name.empty() || value.empty()) throw FormatError("key line " + std::to_string(line_no) + ": empty field");
      if (!values_.emplace(name, value).second) throw FormatError("duplicate key field '" + name + "'");
    }
  }

  bool has(const std::string& name) const { return values_.count(name) != 0; }

  std::string take(const std::string& name) {
    auto it = values_.find(name);
    if (it == values_.end()) throw FormatError("key file lacks field '" + name + "'");
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  template <typename Int>
  Int take_int(const std::string& name) {
    const std::string v = take(name);
    Int out{};
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) throw FormatError("field '" + name + "' is not an integer");
    return out;
  }

  double take_real(const std::string& name) {
    const std::string v = take(name);
    std::uint64_t bits = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), bits, 16);
    if (v.size() != 16 || ec != std::errc{} || end != v.data() + v.size()) {
      throw FormatError("field '" + name + "' is not a 16-hex-digit binary64");
    }
    return std::bit_cast<double>(bits);
  }

  void expect_empty() const {
    if (!values_.empty()) throw FormatError("unknown key field '" + values_.begin()->first + "'");
  }

 private:
  std::map<std::string, std::string> values_;
};

HenonSineParams take_params(Fields& f, const std::string& prefix) {
  HenonSineParams p;
  p.lambda1 = f.take_real(prefix + ".lambda1");
  p.lambda2 = f.take_real(prefix + ".lambda2");
  return p;
}

}  // namespace

std::string serialize_key(const SecretKey& key) {
  key.validate();
  std::ostringstream out;
  out << "# qbaker secret key; reals are IEEE-754 binary64 bit patterns\n";
  out << "version = " << SecretKey::kVersion << '\n';
  out << "images = " << key.image_count() << '\n';
  out << "bit_depth = " << key.bit_depth << '\n';
  out << "k = " << key.k() << '\n';
  if (key.n) out << "n = " << *key.n << '\n';
  for (std::size_t m = 0; m < key.images.size(); ++m) {
    const std::string prefix = "image." + std::to_string(m);
    put_params(out, prefix, key.images[m].params);
    out << prefix << ".q = " << key.images[m].q << '\n';
  }
  for (const auto& [name, stage] : {std::pair{"stage_a", &key.stage_a}, std::pair{"stage_b", &key.stage_b}}) {
    put_params(out, name, stage->params);
    out << name << ".x0 = " << hex_double(stage->seed.x) << '\n';
    out << name << ".y0 = " << hex_double(stage->seed.y) << '\n';
  }
  if (key.r_max1) out << "r_max1 = " << *key.r_max1 << '\n';
  if (key.r_max2) out << "r_max2 = " << *key.r_max2 << '\n';
  if (key.intensity_sum) out << "intensity_sum = " << *key.intensity_sum << '\n';
  if (key.bit_count) out << "bit_count = " << *key.bit_count << '\n';
  return out.str();
}

SecretKey parse_key(std::string_view text) {
  Fields f(text);
  if (f.take_int<int>("version") != SecretKey::kVersion) throw FormatError("unsupported key file version");
  SecretKey key;
  const int images = f.take_int<int>("images");
  if (images < 1 || images > kMaxImages) throw FormatError("key image count out of range");
  key.bit_depth = f.take_int<int>("bit_depth");
  const int k = f.take_int<int>("k");
  if (f.has("n")) key.n = f.take_int<int>("n");
  for (int m = 0; m < images; ++m) {
    const std::string prefix = "image." + std::to_string(m);
    ImageKey img;
    img.params = take_params(f, prefix);
    img.q = f.take_int<int>(prefix + ".q");
    key.images.push_back(img);
  }
  for (auto [name, stage] : {std::pair{"stage_a", &key.stage_a}, std::pair{"stage_b", &key.stage_b}}) {
    stage->params = take_params(f, name);
    stage->seed.x = f.take_real(std::string(name) + ".x0");
    stage->seed.y = f.take_real(std::string(name) + ".y0");
  }
  if (f.has("r_max1")) key.r_max1 = f.take_int<std::uint32_t>("r_max1");
  if (f.has("r_max2")) key.r_max2 = f.take_int<std::uint32_t>("r_max2");
  if (f.has("intensity_sum")) key.intensity_sum = f.take_int<std::uint64_t>("intensity_sum");
  if (f.has("bit_count")) key.bit_count = f.take_int<std::uint64_t>("bit_count");
  f.expect_empty();
  try {
    key.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid key: ") + e.what());
  }
  if (k != key.k()) throw FormatError("key field k disagrees with images and bit_depth");
  return key;
}

SecretKey load_key(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open key file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key(buf.str());
}

void save_key(const SecretKey& key, const std::filesystem::path& path) {
  const std::string text = serialize_key(key);
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write key file " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing key file " + path.string());
}

}  // namespace qbaker
