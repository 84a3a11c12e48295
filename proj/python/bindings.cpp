#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbaker/baker.hpp"
#include "qbaker/chaos.hpp"
#include "qbaker/cipher.hpp"
#include "qbaker/errors.hpp"
#include "qbaker/qcircuit.hpp"

namespace py = pybind11;
using namespace qbaker;

namespace {

// Python ints cross the boundary as decimal strings.
BigInt to_big(const py::int_& v) {
  const auto text = py::str(v).cast<std::string>();
  if (text.empty() || text[0] == '-') throw py::value_error("index must be nonnegative");
  return BigInt(text);
}

py::int_ from_big(const BigInt& v) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

MultiImage to_multi(int n, int bit_depth, std::vector<std::vector<std::uint32_t>> images) {
  MultiImage img{n, bit_depth, std::move(images)};
  img.validate();
  return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Baker-map multi-image cipher core";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);

  m.def("count_partitions", [](int n) { return from_big(count_partitions(n)); }, py::arg("n"),
        "Number of admissible partitions of 2^n");
  m.def("unrank", [](int n, const py::int_& index) { return unrank(n, to_big(index)).widths(); }, py::arg("n"),
        py::arg("index"), "Block widths of the partition with the given index");
  m.def("rank", [](const std::vector<std::uint64_t>& widths) { return from_big(rank(BakerPartition::from_widths(widths))); },
        py::arg("widths"));
  m.def("is_admissible", [](const std::vector<std::uint64_t>& widths) {
    return BakerPartition::from_widths(widths).admissible();
  });
  m.def("apply", [](const std::vector<std::uint64_t>& widths, std::uint32_t x, std::uint32_t y) {
    const Point p = apply(BakerPartition::from_widths(widths), {x, y});
    return py::make_tuple(p.x, p.y);
  }, py::arg("widths"), py::arg("x"), py::arg("y"));
  m.def("apply_inverse", [](const std::vector<std::uint64_t>& widths, std::uint32_t x, std::uint32_t y) {
    const Point p = apply_inverse(BakerPartition::from_widths(widths), {x, y});
    return py::make_tuple(p.x, p.y);
  }, py::arg("widths"), py::arg("x"), py::arg("y"));

  m.def("synthesize", [](const std::vector<std::uint64_t>& widths) {
    return emit_text(synthesize(BakerPartition::from_widths(widths)));
  }, py::arg("widths"), "Gate-list text for the partition's baker map");
  m.def("verify", [](const std::string& text, const std::vector<std::uint64_t>& widths) {
    return verify(parse_text(text), BakerPartition::from_widths(widths));
  }, py::arg("circuit"), py::arg("widths"));

  m.def("chebyshev", &chebyshev, py::arg("k"), py::arg("x"));
  m.def("henon_sine_step", [](double x, double y, double lambda1, double lambda2) {
    const ChaosState s = henon_sine_step({x, y}, {lambda1, lambda2});
    return py::make_tuple(s.x, s.y);
  });

  m.def("encrypt", [](int n, int bit_depth, std::vector<std::vector<std::uint32_t>> images, const std::string& key) {
    EncryptResult r;
    {
      const MultiImage plain = to_multi(n, bit_depth, std::move(images));
      const SecretKey k = parse_key(key);
      py::gil_scoped_release release;
      r = encrypt(plain, k);
    }
    return py::make_tuple(r.cipher.images, r.cipher.bit_depth, serialize_key(r.key));
  }, py::arg("n"), py::arg("bit_depth"), py::arg("images"), py::arg("key"),
     "Returns (cipher images, cipher bit depth, completed key text)");
  m.def("decrypt", [](int n, int bit_depth, std::vector<std::vector<std::uint32_t>> images, const std::string& key) {
    DecryptResult r;
    {
      const MultiImage cipher = to_multi(n, bit_depth, std::move(images));
      const SecretKey k = parse_key(key);
      py::gil_scoped_release release;
      r = decrypt(cipher, k);
    }
    return py::make_tuple(r.plain.images, r.padding_clean);
  }, py::arg("n"), py::arg("bit_depth"), py::arg("images"), py::arg("key"));
}
