#include <doctest.h>

#include <random>
#include <thread>

#include "support.hpp"
#include "relubits/bitvec.hpp"

using namespace relubits;
using namespace relubits::bitvec;
using support::status_of;

namespace {

BitMatrix from_string(const std::vector<std::string>& rows) {
  std::vector<oracle::Bits> b;
  for (const auto& s : rows) {
    oracle::Bits r;
    for (char c : s) r.push_back(c == '1');
    b.push_back(r);
  }
  return support::to_bits(b);
}

bool all_pad_bits_clear(const BitMatrix& m) {
  const std::size_t used = m.bits() % kWordBits;
  if (used == 0) return true;
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.row(r).words.back() >> used) return false;
  return true;
}

}  // namespace

TEST_CASE("binarize follows the strict positivity rule") {
  const auto w = binarize(std::vector<double>{0.5, 0.0, 3.1});
  CHECK(w.size() == 1);
  CHECK(w[0] == 0b101);
  CHECK(binarize(std::vector<double>(70, 0.0)) == std::vector<std::uint64_t>{0, 0});
  CHECK(binarize(std::vector<double>{1e-300})[0] == 1);
  CHECK(status_of([] { binarize(std::vector<double>{1.0, -0.5}); }) == Status::contract);
}

TEST_CASE("binarize agrees with an elementwise oracle on 1000 entries") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = u(g) < 0.4 ? 0.0 : u(g);
  const auto words = binarize(v);
  REQUIRE(words.size() == words_for(1000));
  for (std::size_t j = 0; j < v.size(); ++j)
    CHECK(((words[j / 64] >> (j % 64)) & 1U) == (v[j] > 0.0 ? 1U : 0U));
  CHECK((words.back() >> (1000 % 64)) == 0);
}

TEST_CASE("hamming small cases") {
  const auto m = from_string({"1111", "0000", "1111"});
  CHECK(hamming(m.row(0), m.row(2)) == 0);
  CHECK(hamming(m.row(0), m.row(1)) == 4);
  const auto p = from_string({"10110", "11010"});
  CHECK(hamming(p.row(0), p.row(1)) == 2);
  const auto q = from_string({"101"});
  CHECK(status_of([&] { hamming(p.row(0), q.row(0)); }) == Status::shape);
}

TEST_CASE("hamming metric axioms on 1000 random triples") {
  std::mt19937_64 g(5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + g() % 200;
    std::vector<oracle::Bits> r{oracle::random_bits(g, n), oracle::random_bits(g, n),
                                oracle::random_bits(g, n)};
    if (t % 10 == 0) r[1] = r[0];
    const auto m = support::to_bits(r);
    const auto ab = hamming(m.row(0), m.row(1));
    CHECK(ab == hamming(m.row(1), m.row(0)));
    CHECK(hamming(m.row(0), m.row(0)) == 0);
    CHECK((ab == 0) == (r[0] == r[1]));
    CHECK(ab <= hamming(m.row(0), m.row(2)) + hamming(m.row(2), m.row(1)));
  }
}

TEST_CASE("hamming_matrix matches the naive oracle exactly") {
  SUBCASE("identical and complementary rows") {
    const auto same = hamming_matrix(from_string({"1010", "1010"}));
    CHECK(same.values == Matrix(2, 2, 0.0));
    const auto comp = hamming_matrix(from_string({"1111", "0000"}));
    CHECK(comp.values(0, 1) == 1.0);
  }
  SUBCASE("50 random rows of 1000 bits, any thread count") {
    std::mt19937_64 g(17);
    std::vector<oracle::Bits> rows;
    for (int i = 0; i < 50; ++i) rows.push_back(oracle::random_bits(g, 1000));
    const auto bits = support::to_bits(rows);
    const auto h1 = hamming_matrix(bits, 1);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j)
        CHECK(h1.values(i, j) == static_cast<double>(oracle::hamming(rows[i], rows[j])) / 1000.0);
    for (unsigned threads : {2U, 3U, 7U}) CHECK(hamming_matrix(bits, threads).values == h1.values);
  }
  SUBCASE("structural properties") {
    std::mt19937_64 g(23);
    std::vector<oracle::Bits> rows;
    for (int i = 0; i < 30; ++i) rows.push_back(oracle::random_bits(g, 77, 0.3));
    const auto h = hamming_matrix(support::to_bits(rows));
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(h.values(i, i) == 0.0);
      for (std::size_t j = 0; j < 30; ++j) {
        CHECK(h.values(i, j) == h.values(j, i));
        CHECK(h.values(i, j) >= 0.0);
        CHECK(h.values(i, j) <= 1.0);
      }
    }
  }
}

TEST_CASE("hamming_matrix is independent of the parallel decomposition at scale") {
  std::mt19937_64 g(31);
  std::vector<oracle::Bits> rows;
  for (int i = 0; i < 300; ++i) rows.push_back(oracle::random_bits(g, 4096));
  const auto bits = support::to_bits(rows);
  CHECK(hamming_matrix(bits, 1).values == hamming_matrix(bits, 8).values);
}

TEST_CASE("select_columns") {
  const auto m = from_string({"10110", "01001"});
  CHECK(select_columns(m, std::vector<std::size_t>{0, 1, 2, 3, 4}) == m);
  const auto s = select_columns(m, std::vector<std::size_t>{0, 2, 4});
  CHECK(s == from_string({"110", "001"}));
  CHECK(status_of([&] { select_columns(m, std::vector<std::size_t>{}); }) == Status::index);
  CHECK(status_of([&] { select_columns(m, std::vector<std::size_t>{5}); }) == Status::index);
  CHECK(status_of([&] { select_columns(m, std::vector<std::size_t>{1, 1}); }) == Status::index);
}

TEST_CASE("pad bits stay clear through every operation") {
  std::mt19937_64 g(3);
  std::vector<oracle::Bits> rows;
  for (int i = 0; i < 9; ++i) rows.push_back(oracle::random_bits(g, 131));
  const auto m = support::to_bits(rows);
  CHECK(all_pad_bits_clear(m));
  CHECK(m.pad_bits_clear());
  std::vector<std::size_t> idx{130, 0, 64, 65, 3};
  CHECK(all_pad_bits_clear(select_columns(m, idx)));
  CHECK(all_pad_bits_clear(hconcat(m, select_columns(m, idx))));
  CHECK(all_pad_bits_clear(select_rows(m, std::vector<std::size_t>{8, 0, 4})));
  auto w = std::vector<std::uint64_t>(m.words().begin(), m.words().end());
  w[2] |= std::uint64_t{1} << 63;
  CHECK(status_of([&] { BitMatrix::from_words(9, 131, w); }) == Status::data);
}

TEST_CASE("hconcat and select_rows") {
  const auto a = from_string({"10", "01"});
  const auto b = from_string({"111", "000"});
  CHECK(hconcat(a, b) == from_string({"10111", "01000"}));
  CHECK(select_rows(b, std::vector<std::size_t>{1, 0}) == from_string({"000", "111"}));
  CHECK(status_of([&] { hconcat(a, from_string({"1"})); }) == Status::shape);
}
