#include <doctest.h>

#include <filesystem>
#include <random>

#include "support.hpp"
#include "relubits/io.hpp"
#include "relubits/pipeline.hpp"

using namespace relubits;
using namespace relubits::pipeline;
using support::slurp;
using support::status_of;

namespace {

net::MlpNetwork identity_net() {
  net::MlpNetwork n;
  n.layer_dims = {2, 2, 2, 2};
  n.weights = {Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)};
  n.biases = {{0, 0}, {0, 0}, {0, 0}};
  return n;
}

// Rows that are copies of one of two prototypes, labelled by prototype. The
// prototypes differ in their first five bits only.
std::pair<bitvec::BitMatrix, std::vector<int>> prototypes(std::size_t per_class,
                                                          std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const auto a = oracle::random_bits(g, 40);
  auto b = a;
  for (std::size_t j = 0; j < 5; ++j) b[j] = 1 - b[j];
  std::vector<oracle::Bits> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    rows.push_back(i % 2 ? b : a);
    labels.push_back(static_cast<int>(i % 2));
  }
  return {support::to_bits(rows), labels};
}

Dataset small_blobs(std::uint64_t seed, std::size_t per_class, double sigma) {
  BlobsConfig bc;
  bc.seed = seed;
  bc.samples_per_class = per_class;
  bc.sigma = sigma;
  return make_blobs(bc);
}

}  // namespace

TEST_CASE("extract_bits") {
  const auto bits = extract_bits(identity_net(), Matrix(1, 2, {1.0, -1.0}), 1);
  CHECK(bits.bits() == 2);
  CHECK(bits.get(0, 0));
  CHECK(!bits.get(0, 1));
  CHECK(status_of([] { extract_bits(identity_net(), Matrix(1, 2, 0.0), 0); }) == Status::parameter);
  CHECK(status_of([] { extract_bits(identity_net(), Matrix(1, 2, 0.0), 3); }) == Status::parameter);

  const auto dir = support::scratch_dir("extract");
  Dataset d{Matrix(2, 2, {1, -1, -1, 1}), {0, 1}};
  const auto paths = run_extract_bits(identity_net(), d, "all", dir);
  CHECK(paths.size() == 2);
  CHECK(std::filesystem::exists(dir / "layer1.bvm"));
  CHECK(std::filesystem::exists(dir / "layer2.bvm"));
  CHECK(io::read_bits(dir / "layer2.bvm") == extract_bits(identity_net(), d.features, 2));
  CHECK(resolve_layers(identity_net(), "last") == std::vector<std::size_t>{2});
  CHECK(status_of([] { resolve_layers(identity_net(), "x"); }) == Status::parameter);
}

TEST_CASE("effective_k") {
  CHECK(effective_k(64, 128, false) == 64);
  CHECK(effective_k(64, 32, true) == 32);
  CHECK(status_of([] { effective_k(64, 32, false); }) == Status::parameter);
  CHECK(status_of([] { effective_k(0, 32, true); }) == Status::parameter);
}

TEST_CASE("run_train writes deterministic artifacts") {
  const auto data = small_blobs(7, 100, 1.0);
  const std::vector<std::size_t> dims{16, 64, 64, 32, 2};
  net::SgdConfig cfg;
  cfg.seed = 7;
  const auto a = support::scratch_dir("train_a");
  const auto b = support::scratch_dir("train_b");
  const auto sa = run_train(data, dims, cfg, a);
  run_train(data, dims, cfg, b);
  CHECK(sa.train_accuracy >= 0.99);
  CHECK(slurp(a / "weights.mlp") == slurp(b / "weights.mlp"));
  CHECK(slurp(a / "train_log.csv") == slurp(b / "train_log.csv"));
  CHECK(io::read_network(a / "weights.mlp") == sa.network);

  cfg.epochs = 0;
  const auto z = support::scratch_dir("train_zero");
  run_train(data, dims, cfg, z);
  CHECK(io::read_network(z / "weights.mlp") == io::round_to_f32(net::initialize(dims, 7)));
}

TEST_CASE("Fiedler stage") {
  SUBCASE("duplicated prototypes separate perfectly on both splits") {
    const auto [train, ytrain] = prototypes(10, 1);
    const auto [eval, yeval] = prototypes(5, 1);
    FiedlerOptions o;
    o.k = 16;
    const auto r = run_fiedler(train, ytrain, eval, yeval, o);
    CHECK(r.train.accuracy.overall == 1.0);
    CHECK(r.eval.accuracy.overall == 1.0);
    CHECK(r.selected.size() == 16);
  }
  SUBCASE("k above the bit count") {
    const auto [train, y] = prototypes(4, 2);
    FiedlerOptions o;
    o.k = 41;
    CHECK(status_of([&] { run_fiedler(train, y, train, y, o); }) == Status::parameter);
    o.clamp_k = true;
    CHECK(run_fiedler(train, y, train, y, o).k_effective == 40);
  }
  SUBCASE("a disconnected similarity graph names the layer") {
    // Complementary rows: cross-class similarity 0, so two components.
    auto rows = std::vector<oracle::Bits>{{1, 1, 1, 1}, {0, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}};
    const auto bits = support::to_bits(rows);
    const std::vector<int> y{0, 1, 0, 1};
    FiedlerOptions o;
    o.k = 4;
    try {
      run_fiedler(bits, y, bits, y, o, 3);
      FAIL("expected a multiplicity error");
    } catch (const Error& e) {
      CHECK(e.status() == Status::multiplicity);
      CHECK(std::string(e.what()).find("layer 3") != std::string::npos);
    }
  }
  SUBCASE("evaluation labels do not influence selection or partition") {
    const auto [train, ytrain] = prototypes(10, 3);
    std::mt19937_64 g(3);
    std::vector<oracle::Bits> rows;
    for (int i = 0; i < 12; ++i) rows.push_back(oracle::random_bits(g, 40));
    const auto eval = support::to_bits(rows);
    std::vector<int> yeval(12), corrupted(12);
    for (int i = 0; i < 12; ++i) {
      yeval[i] = i % 2;
      corrupted[i] = (i / 3) % 2;
    }
    FiedlerOptions o;
    o.k = 10;
    const auto a = run_fiedler(train, ytrain, eval, yeval, o);
    const auto b = run_fiedler(train, ytrain, eval, corrupted, o);
    CHECK(a.selected == b.selected);
    CHECK(a.eval.partition.assignment == b.eval.partition.assignment);
  }
}

TEST_CASE("Fiedler artifacts") {
  const auto [train, ytrain] = prototypes(6, 4);
  const auto dir = support::scratch_dir("fiedler_files");
  FiedlerOptions o;
  o.k = 8;
  o.out_dir = dir;
  o.prefix = "layer2";
  const auto r = run_fiedler(train, ytrain, train, ytrain, o, 2);
  for (const char* f : {"layer2_selected.txt", "layer2_scores.csv", "layer2_train_rdm.dmx",
                        "layer2_train_rdm.pgm", "layer2_train_partition.csv", "layer2_eval_rdm.dmx",
                        "layer2_eval_rdm.pgm", "layer2_eval_partition.csv"})
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  CHECK(io::read_indices(dir / "layer2_selected.txt") == r.selected);
  const auto rdm = io::read_dmx(dir / "layer2_train_rdm.dmx");
  io::write_dmx(dir / "again.dmx", rdm);
  CHECK(slurp(dir / "again.dmx") == slurp(dir / "layer2_train_rdm.dmx"));
  write_fiedler_report(dir / "report.txt", std::span(&r, 1));
  CHECK(slurp(dir / "report.txt").find("layer2.eval.accuracy: 1") != std::string::npos);
}

TEST_CASE("adversarial stage") {
  const auto data = small_blobs(11, 150, 0.05);
  net::SgdConfig cfg;
  cfg.seed = 11;
  cfg.learning_rate = 0.2;
  const std::vector<std::size_t> dims{16, 64, 64, 32, 2};
  const auto net = net::train_sgd(data, dims, cfg);

  AdversarialOptions o;
  o.k = 64;
  o.clamp_k = true;
  o.seed = 11;
  o.attack.epsilon = 0.5;

  SUBCASE("epsilon 0 leaves the detector at chance") {
    o.attack.epsilon = 0.0;
    const auto r = run_adversarial(net, data, o);
    CHECK(r.max_linf == 0.0);
    CHECK(r.auroc >= 0.35);
    CHECK(r.auroc <= 0.65);
  }
  SUBCASE("FGSM at epsilon 0.5 is detected") {
    const auto r = run_adversarial(net, data, o);
    CHECK(r.k_effective == 32);
    CHECK(r.selected_original.size() == 32);
    CHECK(r.model.w.size() == 64);
    CHECK(r.max_linf <= 0.5 + 1e-12);
    CHECK(r.n_train + r.n_test == data.size());
    MESSAGE("accuracy " << r.accuracy << " auroc " << r.auroc);
  }
  SUBCASE("latent comparison and artifacts are reproducible") {
    o.latent = true;
    const auto a = support::scratch_dir("adv_a");
    const auto b = support::scratch_dir("adv_b");
    o.out_dir = a;
    const auto ra = run_adversarial(net, data, o);
    o.out_dir = b;
    const auto rb = run_adversarial(net, data, o);
    REQUIRE(ra.rdm_pearson.has_value());
    CHECK(std::isfinite(*ra.rdm_pearson));
    CHECK(*ra.rdm_pearson == *rb.rdm_pearson);
    for (const auto& e : std::filesystem::directory_iterator(a))
      CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename());
  }
  SUBCASE("k without clamping") {
    o.clamp_k = false;
    CHECK(status_of([&] { run_adversarial(net, data, o); }) == Status::parameter);
  }
}
