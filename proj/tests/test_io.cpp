#include <doctest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "support.hpp"
#include "relubits/io.hpp"

using namespace relubits;
using support::slurp;
using support::status_of;

namespace {

void write_raw(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

template <class T>
T read_le(const std::string& s, std::size_t offset) {
  T v;
  std::memcpy(&v, s.data() + offset, sizeof v);
  return v;
}

}  // namespace

TEST_CASE("MLP1 layout and round trip") {
  const auto dir = support::scratch_dir("mlp");
  const auto net = net::initialize(std::vector<std::size_t>{3, 4, 2}, 8);
  io::write_network(dir / "a.mlp", net);
  const auto bytes = slurp(dir / "a.mlp");
  CHECK(bytes.substr(0, 4) == "MLP1");
  CHECK(read_le<std::uint32_t>(bytes, 4) == 2);
  CHECK(read_le<std::uint32_t>(bytes, 8) == 3);
  CHECK(read_le<std::uint32_t>(bytes, 12) == 4);
  CHECK(read_le<float>(bytes, 16) == static_cast<float>(net.weights[0](0, 0)));
  CHECK(bytes.size() == 8 + (8 + 4 * (12 + 4)) + (8 + 4 * (8 + 2)));

  const auto back = io::read_network(dir / "a.mlp");
  CHECK(back == io::round_to_f32(net));
  io::write_network(dir / "b.mlp", back);
  CHECK(slurp(dir / "b.mlp") == bytes);
}

TEST_CASE("BVM1 layout and round trip") {
  const auto dir = support::scratch_dir("bvm");
  std::mt19937_64 g(1);
  std::vector<oracle::Bits> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(oracle::random_bits(g, 70));
  const auto bits = support::to_bits(rows);
  io::write_bits(dir / "a.bvm", bits);
  const auto bytes = slurp(dir / "a.bvm");
  CHECK(bytes.substr(0, 4) == "BVM1");
  CHECK(read_le<std::uint32_t>(bytes, 4) == 5);
  CHECK(read_le<std::uint32_t>(bytes, 8) == 70);
  CHECK(bytes.size() == 12 + 5 * 2 * 8);
  CHECK(read_le<std::uint64_t>(bytes, 12) == bits.words()[0]);
  CHECK(io::read_bits(dir / "a.bvm") == bits);
  io::write_bits(dir / "b.bvm", io::read_bits(dir / "a.bvm"));
  CHECK(slurp(dir / "b.bvm") == bytes);

  // A set pad bit is rejected.
  std::string bad = bytes;
  bad[12 + 15] = static_cast<char>(0x80);
  write_raw(dir / "bad.bvm", bad);
  CHECK(status_of([&] { io::read_bits(dir / "bad.bvm"); }) == Status::io);
}

TEST_CASE("DMX1 and SVM1 round trips") {
  const auto dir = support::scratch_dir("dmx");
  const Matrix m(2, 3, {1.5, -2, 0.1, 1e-300, 7, 8});
  io::write_dmx(dir / "m.dmx", m);
  const auto bytes = slurp(dir / "m.dmx");
  CHECK(bytes.substr(0, 4) == "DMX1");
  CHECK(bytes.size() == 12 + 6 * 8);
  CHECK(read_le<double>(bytes, 12 + 8 * 2) == 0.1);
  CHECK(io::read_dmx(dir / "m.dmx") == m);

  svm::SvmModel model;
  model.w = {0.25, -1.0, 3.0};
  model.b = -0.5;
  model.C = 2.0;
  io::write_svm(dir / "d.svm", model);
  const auto sb = slurp(dir / "d.svm");
  CHECK(sb.substr(0, 4) == "SVM1");
  CHECK(sb.size() == 4 + 4 + 8 + 3 * 8 + 8);
  CHECK(read_le<double>(sb, 8) == -0.5);
  const auto back = io::read_svm(dir / "d.svm");
  CHECK(back.w == model.w);
  CHECK(back.b == model.b);
  CHECK(back.C == model.C);
  io::write_svm(dir / "e.svm", back);
  CHECK(slurp(dir / "e.svm") == sb);
}

TEST_CASE("malformed binary files are I/O errors") {
  const auto dir = support::scratch_dir("bad");
  write_raw(dir / "short.dmx", "DMX1\x02\x00");
  CHECK(status_of([&] { io::read_dmx(dir / "short.dmx"); }) == Status::io);
  write_raw(dir / "magic.mlp", std::string("XXXX\0\0\0\0", 8));
  CHECK(status_of([&] { io::read_network(dir / "magic.mlp"); }) == Status::io);
  CHECK(status_of([&] { io::read_svm(dir / "missing.svm"); }) == Status::io);

  io::write_dmx(dir / "ok.dmx", Matrix(1, 1, 1.0));
  write_raw(dir / "trail.dmx", slurp(dir / "ok.dmx") + "x");
  CHECK(status_of([&] { io::read_dmx(dir / "trail.dmx"); }) == Status::io);
}

TEST_CASE("CSV datasets and matrices") {
  const auto dir = support::scratch_dir("csv");
  Dataset d{Matrix(3, 2, {0.1, 1.0 / 3.0, -2.5, 1e20, 0, 5}), {1, 0, 1}};
  io::write_dataset_csv(dir / "d.csv", d);
  const auto text = slurp(dir / "d.csv");
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  const auto back = io::read_dataset_csv(dir / "d.csv");
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  io::write_dataset_csv(dir / "e.csv", back);
  CHECK(slurp(dir / "e.csv") == text);

  write_raw(dir / "ragged.csv", "1,2,0\n3,1\n");
  CHECK(status_of([&] { io::read_dataset_csv(dir / "ragged.csv"); }) == Status::io);
  write_raw(dir / "label.csv", "1,2,0.5\n");
  CHECK(status_of([&] { io::read_dataset_csv(dir / "label.csv"); }) == Status::io);

  io::write_matrix_csv(dir / "m.csv", d.features);
  CHECK(io::read_matrix_csv(dir / "m.csv") == d.features);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("index, label, score and partition files") {
  const auto dir = support::scratch_dir("lists");
  const std::vector<std::size_t> idx{4, 0, 17};
  io::write_indices(dir / "i.txt", idx);
  CHECK(slurp(dir / "i.txt") == "4\n0\n17\n");
  CHECK(io::read_indices(dir / "i.txt") == idx);
  const std::vector<int> labels{-1, 1, 1};
  io::write_labels(dir / "l.txt", labels);
  CHECK(io::read_labels(dir / "l.txt") == labels);

  io::write_feature_scores(dir / "s.csv", std::vector<double>{4.0, 0.5});
  CHECK(slurp(dir / "s.csv") == "feature_index,score\n0,4\n1,0.5\n");

  spectral::Partition p;
  p.assignment = {1, 0, 1};
  io::write_partition_csv(dir / "p.csv", p);
  CHECK(slurp(dir / "p.csv") == "vertex_index,cluster_id\n0,1\n1,0\n2,1\n");
}

TEST_CASE("PGM heatmap scaling") {
  const auto dir = support::scratch_dir("pgm");
  io::write_pgm(dir / "a.pgm", Matrix(2, 2, {0.0, 0.5, 0.5, 1.0}));
  const auto a = slurp(dir / "a.pgm");
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(a.substr(0, header.size()) == header);
  const auto px = a.substr(header.size());
  CHECK(px.size() == 4);
  CHECK(static_cast<unsigned char>(px[0]) == 0);
  CHECK(static_cast<unsigned char>(px[1]) == 128);
  CHECK(static_cast<unsigned char>(px[3]) == 255);

  io::write_pgm(dir / "c.pgm", Matrix(3, 1, 0.7));
  const auto c = slurp(dir / "c.pgm").substr(std::string("P5\n1 3\n255\n").size());
  CHECK(c == std::string(3, static_cast<char>(128)));
}
