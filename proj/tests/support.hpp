#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relubits/bitvec.hpp"
#include "relubits/error.hpp"
#include "relubits/net.hpp"

namespace support {

inline relubits::bitvec::BitMatrix to_bits(const std::vector<oracle::Bits>& rows) {
  const std::size_t n_bits = rows.empty() ? 0 : rows[0].size();
  relubits::bitvec::BitMatrix m(rows.size(), n_bits);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < n_bits; ++j) m.set(r, j, rows[r][j] != 0);
  return m;
}

inline oracle::Mlp to_oracle(const relubits::net::MlpNetwork& net) {
  oracle::Mlp o;
  for (std::size_t t = 0; t < net.weights.size(); ++t) {
    const auto& w = net.weights[t];
    oracle::Mat m(w.rows(), oracle::Real(w.cols()));
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) m[r][c] = w(r, c);
    o.weights.push_back(m);
    o.biases.push_back(net.biases[t]);
  }
  return o;
}

// Status of the exception thrown by f, or Status::ok when none is thrown.
template <class F>
relubits::Status status_of(F&& f) {
  try {
    f();
  } catch (const relubits::Error& e) {
    return e.status();
  }
  return relubits::Status::ok;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("relubits_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
