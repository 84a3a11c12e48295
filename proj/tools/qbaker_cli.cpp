// qbaker command-line tool.
//
// Exit codes: 0 success, 1 usage, 2 data/format error, 3 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qbaker/analysis.hpp"
#include "qbaker/baker.hpp"
#include "qbaker/chaos.hpp"
#include "qbaker/cipher.hpp"
#include "qbaker/errors.hpp"
#include "qbaker/parallel.hpp"
#include "qbaker/qcircuit.hpp"

namespace fs = std::filesystem;
using namespace qbaker;

namespace {

constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct Options {
  unsigned threads = 0;
  bool verbose = false;

  // keygen
  int images = 1;
  int bits = 8;
  int n = -1;
  int qm = kDefaultKeyExponent;
  std::uint32_t rmax1 = 0;
  std::uint32_t rmax2 = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::vector<double> lambda1, lambda2;

  // file plumbing
  std::string in, out, key, key_out, ref, plain, csv;
  std::string block;
  double density = -1.0;
  std::size_t samples = 5000;

  // partitions / circuit / appendix
  int part_n = 0;
  std::string part_index;
  std::string widths;
  std::string circuit_file;
  double x0 = 0.1, y0 = 0.1;
  double henon_l1 = 2.0, henon_l2 = 2.0;
  std::size_t count = 1000;
  std::uint64_t kmax = 8;
  std::size_t points = 201;
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw FormatError("cannot write " + path);
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::mt19937_64 make_rng(const Options& o) {
  if (o.have_seed) return std::mt19937_64(o.seed);
  std::random_device dev;
  std::seed_seq seq{dev(), dev(), dev(), dev()};
  return std::mt19937_64(seq);
}

int run_keygen(const Options& o) {
  if (o.out.empty()) throw CLI::ValidationError("--out", "keygen needs an output path");
  auto rng = make_rng(o);
  std::uniform_real_distribution<double> lambda(2.0, 64.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  SecretKey key;
  key.bit_depth = o.bits;
  const auto pick = [&](const std::vector<double>& given, int m) { return given.empty() ? lambda(rng) : given[m]; };
  if ((!o.lambda1.empty() && o.lambda1.size() != static_cast<std::size_t>(o.images)) ||
      (!o.lambda2.empty() && o.lambda2.size() != static_cast<std::size_t>(o.images))) {
    throw CLI::ValidationError("--lambda1/--lambda2", "need one value per image");
  }
  for (int m = 0; m < o.images; ++m) {
    ImageKey ik;
    ik.params.lambda1 = pick(o.lambda1, m);
    ik.params.lambda2 = pick(o.lambda2, m);
    ik.q = o.qm;
    key.images.push_back(ik);
  }
  for (auto* stage : {&key.stage_a, &key.stage_b}) {
    stage->params = {lambda(rng), lambda(rng)};
    stage->seed = {unit(rng), unit(rng)};
  }
  if (o.n >= 0) key.n = o.n;
  if (o.rmax1) key.r_max1 = o.rmax1;
  if (o.rmax2) key.r_max2 = o.rmax2;
  try {
    key.validate();
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("keygen", e.what());
  }
  save_key(key, o.out);
  if (o.verbose) std::cerr << "wrote key for " << o.images << " images to " << o.out << '\n';
  return 0;
}

int run_encrypt(const Options& o) {
  const MultiImage plain = load_multi(o.in);
  SecretKey key = load_key(o.key);
  if (o.rmax1) key.r_max1 = o.rmax1;
  if (o.rmax2) key.r_max2 = o.rmax2;
  const EncryptResult result = encrypt(plain, key);
  save_multi(result.cipher, o.out);
  save_key(result.key, o.key_out.empty() ? o.key : o.key_out);
  if (o.verbose) {
    std::cerr << "encrypted " << plain.image_count() << " images into " << result.cipher.image_count()
              << " ciphertext slots\n";
  }
  return 0;
}

int run_decrypt(const Options& o) {
  const MultiImage cipher = load_multi(o.in);
  const SecretKey key = load_key(o.key);
  const DecryptResult result = decrypt(cipher, key);
  save_multi(result.plain, o.out);
  if (!result.padding_clean) {
    std::cerr << "warning: padding bits are nonzero after decryption (wrong key or damaged ciphertext)\n";
  }
  return 0;
}

Block parse_block(const std::string& text) {
  Block b;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> b.row >> c1 >> b.col >> c2 >> b.height >> c3 >> b.width) || c1 != ',' || c2 != ',' || c3 != ',') {
    throw CLI::ValidationError("--block", "expected row,col,height,width");
  }
  return b;
}

int run_analyze(const Options& o) {
  const MultiImage cipher = load_multi(o.in);
  MetricsReport report = analyze_images(cipher, o.samples, o.have_seed ? o.seed : 1);
  if (!o.ref.empty()) {
    const MultiImage other = load_multi(o.ref);
    report.differential = npcr_uaci(cipher, other);
    report.avalanche = bit_difference_rate(cipher, other);
  }
  if (!o.block.empty() || o.density >= 0.0) {
    if (o.key.empty() || o.plain.empty()) {
      throw CLI::ValidationError("--block/--density", "robustness tests need --key and --plain");
    }
    const SecretKey key = load_key(o.key);
    const MultiImage plain = load_multi(o.plain);
    if (!o.block.empty()) report.occlusion_psnr = occlusion_test(cipher, key, plain, parse_block(o.block));
    if (o.density >= 0.0) report.noise_psnr = noise_test(cipher, key, plain, o.density, o.have_seed ? o.seed : 1);
  }
  std::ofstream file;
  write_report(open_output(o.out, file), report);
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) throw FormatError("cannot write " + o.csv);
    write_report_csv(csv, report);
  }
  return 0;
}

BigInt parse_bigint(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw CLI::ValidationError("index", "expected a nonnegative decimal integer");
  }
  return BigInt(text);
}

int run_partition_count(const Options& o) {
  std::cout << count_partitions(o.part_n) << '\n';
  return 0;
}

int run_partition_unrank(const Options& o) {
  std::cout << unrank(o.part_n, parse_bigint(o.part_index)).to_string() << '\n';
  return 0;
}

int run_partition_check(const Options& o) {
  const auto part = BakerPartition::parse(o.widths);
  std::cout << part.to_string() << (part.admissible() ? " admissible" : " inadmissible") << '\n';
  return part.admissible() ? 0 : kExitVerify;
}

int run_partition_list(const Options& o) {
  if (o.part_n > 3) throw CLI::ValidationError("list", "listing is limited to n <= 3");
  const BigInt total = count_partitions(o.part_n);
  for (BigInt i = 0; i < total; ++i) std::cout << i << ' ' << unrank(o.part_n, i).to_string() << '\n';
  return 0;
}

int run_circuit_synth(const Options& o) {
  const auto part = BakerPartition::parse(o.widths);
  const Circuit c = synthesize(part);
  std::ofstream file;
  open_output(o.out, file) << emit_text(c);
  if (o.verbose) {
    const auto s = stats(c);
    std::cerr << "gates=" << s.gates << " controlled=" << s.controlled << " max_controls=" << s.max_controls << '\n';
  }
  return 0;
}

int run_circuit_verify(const Options& o) {
  const Circuit c = parse_text(read_file(o.circuit_file));
  const auto part = BakerPartition::parse(o.widths);
  const bool ok = verify(c, part);
  std::cout << (ok ? "pass" : "FAIL") << ": circuit vs baker map " << part.to_string() << " over "
            << (std::uint64_t{1} << (2 * part.n())) << " basis states\n";
  return ok ? 0 : kExitVerify;
}

int run_circuit_stats(const Options& o) {
  const auto s = stats(parse_text(read_file(o.circuit_file)));
  std::cout << "gates = " << s.gates << "\ncontrolled = " << s.controlled << "\nmax_controls = " << s.max_controls
            << '\n';
  return 0;
}

int run_appendix_henon(const Options& o) {
  std::ofstream file;
  write_trajectory_csv(open_output(o.out, file), {o.henon_l1, o.henon_l2}, {o.x0, o.y0}, o.count);
  return 0;
}

int run_appendix_chebyshev(const Options& o) {
  if (o.points < 2) throw CLI::ValidationError("--points", "need at least two grid points");
  std::vector<double> grid(o.points);
  for (std::size_t i = 0; i < o.points; ++i) {
    grid[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(o.points - 1);
  }
  std::ofstream file;
  write_chebyshev_csv(open_output(o.out, file), o.kmax, grid);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-image baker-map cipher with chaotic diffusion"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file");
  Options o;
  app.add_option("--threads", o.threads, "Cap on worker threads (0 = all cores)");
  app.add_flag("-v,--verbose", o.verbose);

  std::function<int()> action;
  const auto bind = [&](CLI::App* sub, int (*fn)(const Options&)) {
    sub->callback([&action, &o, fn] { action = [&o, fn] { return fn(o); }; });
  };
  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t s) { o.seed = s; o.have_seed = true; }, "Deterministic RNG seed");
  };

  auto* keygen = app.add_subcommand("keygen", "Write a fresh secret key (seed sums are filled in by encrypt)");
  keygen->add_option("--out", o.out, "Key file to write")->required();
  keygen->add_option("--images", o.images, "Number of plaintext images M'")->check(CLI::Range(1, kMaxImages));
  keygen->add_option("--bits", o.bits, "Bits per pixel L")->check(CLI::Range(1, kMaxBitDepth));
  keygen->add_option("--n", o.n, "Side exponent (images are 2^n x 2^n)")->check(CLI::Range(0, kMaxSideExponent));
  keygen->add_option("--qm", o.qm, "Decimal exponent q_m of the key product")->check(CLI::Range(4, 18));
  keygen->add_option("--rmax1", o.rmax1, "Upper bound of per-pixel baker iterations")->check(CLI::PositiveNumber);
  keygen->add_option("--rmax2", o.rmax2, "Upper bound of per-slice baker iterations")->check(CLI::PositiveNumber);
  keygen->add_option("--lambda1", o.lambda1, "Per-image lambda1 values (> 1)")->delimiter(',');
  keygen->add_option("--lambda2", o.lambda2, "Per-image lambda2 values (> 1)")->delimiter(',');
  add_seed(keygen);
  bind(keygen, run_keygen);

  auto* enc = app.add_subcommand("encrypt", "Encrypt a PGM manifest");
  enc->add_option("--in", o.in, "Plaintext manifest")->required()->check(CLI::ExistingFile);
  enc->add_option("--key", o.key, "Key file")->required()->check(CLI::ExistingFile);
  enc->add_option("--out", o.out, "Ciphertext manifest to write")->required();
  enc->add_option("--key-out", o.key_out, "Where to write the completed key (default: overwrite --key)");
  enc->add_option("--rmax1", o.rmax1)->check(CLI::PositiveNumber);
  enc->add_option("--rmax2", o.rmax2)->check(CLI::PositiveNumber);
  bind(enc, run_encrypt);

  auto* dec = app.add_subcommand("decrypt", "Decrypt a ciphertext manifest");
  dec->add_option("--in", o.in, "Ciphertext manifest")->required()->check(CLI::ExistingFile);
  dec->add_option("--key", o.key, "Key file written by encrypt")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", o.out, "Plaintext manifest to write")->required();
  bind(dec, run_decrypt);

  auto* ana = app.add_subcommand("analyze", "Security metrics for a ciphertext set");
  ana->add_option("--in", o.in, "Ciphertext manifest")->required()->check(CLI::ExistingFile);
  ana->add_option("--ref", o.ref, "Second ciphertext manifest for NPCR/UACI")->check(CLI::ExistingFile);
  ana->add_option("--key", o.key, "Key file (robustness tests)")->check(CLI::ExistingFile);
  ana->add_option("--plain", o.plain, "Plaintext manifest (robustness tests)")->check(CLI::ExistingFile);
  ana->add_option("--block", o.block, "Occlusion block row,col,height,width");
  ana->add_option("--density", o.density, "Salt-and-pepper noise density")->check(CLI::Range(0.0, 1.0));
  ana->add_option("--samples", o.samples, "Pixel pairs per correlation estimate");
  ana->add_option("--out", o.out, "Report file (default stdout)");
  ana->add_option("--csv", o.csv, "Per-image CSV table");
  add_seed(ana);
  bind(ana, run_analyze);

  auto* parts = app.add_subcommand("partitions", "Admissible baker partitions");
  parts->require_subcommand(1);
  auto* pcount = parts->add_subcommand("count", "Print P_n");
  pcount->add_option("n", o.part_n)->required()->check(CLI::Range(0, kMaxBakerExponent));
  bind(pcount, run_partition_count);
  auto* punrank = parts->add_subcommand("unrank", "Partition with the given index");
  punrank->add_option("n", o.part_n)->required()->check(CLI::Range(0, kMaxBakerExponent));
  punrank->add_option("index", o.part_index)->required();
  bind(punrank, run_partition_unrank);
  auto* pcheck = parts->add_subcommand("check", "Test a width list for admissibility");
  pcheck->add_option("widths", o.widths)->required();
  bind(pcheck, run_partition_check);
  auto* plist = parts->add_subcommand("list", "List all admissible partitions (n <= 3)");
  plist->add_option("n", o.part_n)->required()->check(CLI::Range(0, 3));
  bind(plist, run_partition_list);

  auto* circ = app.add_subcommand("circuit", "SWAP/CSWAP circuits for baker maps");
  circ->require_subcommand(1);
  auto* synth = circ->add_subcommand("synth", "Emit the gate list for a partition");
  synth->add_option("widths", o.widths)->required();
  synth->add_option("--out", o.out, "Gate-list file (default stdout)");
  bind(synth, run_circuit_synth);
  auto* ver = circ->add_subcommand("verify", "Simulate a gate list against a partition");
  ver->add_option("file", o.circuit_file)->required()->check(CLI::ExistingFile);
  ver->add_option("widths", o.widths)->required();
  bind(ver, run_circuit_verify);
  auto* cst = circ->add_subcommand("stats", "Gate counts of a gate list");
  cst->add_option("file", o.circuit_file)->required()->check(CLI::ExistingFile);
  bind(cst, run_circuit_stats);

  auto* appx = app.add_subcommand("appendix", "Figure data for the chaotic maps");
  appx->require_subcommand(1);
  auto* henon = appx->add_subcommand("henon", "Henon-sine trajectory CSV");
  henon->add_option("--lambda1", o.henon_l1);
  henon->add_option("--lambda2", o.henon_l2);
  henon->add_option("--x0", o.x0);
  henon->add_option("--y0", o.y0);
  henon->add_option("--count", o.count, "Rows to emit");
  henon->add_option("--out", o.out);
  bind(henon, run_appendix_henon);
  auto* cheb = appx->add_subcommand("chebyshev", "Chebyshev polynomial table CSV");
  cheb->add_option("--kmax", o.kmax);
  cheb->add_option("--points", o.points, "Uniform grid points on [-1, 1]");
  cheb->add_option("--out", o.out);
  bind(cheb, run_appendix_chebyshev);

  try {
    app.parse(argc, argv);
    set_thread_limit(o.threads);
    return action ? action() : 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
