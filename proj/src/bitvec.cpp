#include "relubits/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <thread>

#include "relubits/error.hpp"

namespace relubits::bitvec {

namespace {

std::uint64_t pad_mask(std::size_t n_bits) {
  const std::size_t used = n_bits % kWordBits;
  return used == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
}

}  // namespace

BitMatrix::BitMatrix(std::size_t n_rows, std::size_t n_bits)
    : n_rows_(n_rows),
      n_bits_(n_bits),
      words_per_row_(words_for(n_bits)),
      words_(n_rows * words_for(n_bits), 0) {}

BitMatrix BitMatrix::from_words(std::size_t n_rows, std::size_t n_bits,
                                std::vector<std::uint64_t> words) {
  BitMatrix m;
  m.n_rows_ = n_rows;
  m.n_bits_ = n_bits;
  m.words_per_row_ = words_for(n_bits);
  require(words.size() == n_rows * m.words_per_row_, Status::data,
          "bit matrix word count does not match its shape");
  m.words_ = std::move(words);
  require(m.pad_bits_clear(), Status::data, "bit matrix has nonzero pad bits");
  return m;
}

void BitMatrix::set(std::size_t r, std::size_t j, bool value) {
  std::uint64_t& w = words_[r * words_per_row_ + j / kWordBits];
  const std::uint64_t bit = std::uint64_t{1} << (j % kWordBits);
  w = value ? (w | bit) : (w & ~bit);
}

bool BitMatrix::pad_bits_clear() const {
  if (words_per_row_ == 0) return true;
  const std::uint64_t mask = pad_mask(n_bits_);
  for (std::size_t r = 0; r < n_rows_; ++r)
    if ((words_[(r + 1) * words_per_row_ - 1] & ~mask) != 0) return false;
  return true;
}

std::vector<double> BitMatrix::row_as_reals(std::size_t r) const {
  std::vector<double> out(n_bits_);
  for (std::size_t j = 0; j < n_bits_; ++j) out[j] = get(r, j) ? 1.0 : 0.0;
  return out;
}

std::vector<std::uint64_t> binarize(std::span<const double> layer_output) {
  std::vector<std::uint64_t> words(words_for(layer_output.size()), 0);
  for (std::size_t j = 0; j < layer_output.size(); ++j) {
    const double o = layer_output[j];
    require(!(o < 0.0), Status::contract, "binarize: negative post-ReLU output");
    if (o > 0.0) words[j / kWordBits] |= std::uint64_t{1} << (j % kWordBits);
  }
  return words;
}

BitMatrix binarize_rows(std::span<const std::vector<double>> layer_outputs) {
  const std::size_t n_bits = layer_outputs.empty() ? 0 : layer_outputs.front().size();
  BitMatrix m(layer_outputs.size(), n_bits);
  for (std::size_t r = 0; r < layer_outputs.size(); ++r) {
    require(layer_outputs[r].size() == n_bits, Status::shape, "rows of unequal width");
    std::ranges::copy(binarize(layer_outputs[r]), m.row_words(r).begin());
  }
  return m;
}

std::size_t hamming(BitRow a, BitRow b) {
  require(a.n_bits == b.n_bits && a.words.size() == b.words.size(), Status::shape,
          "hamming: bit rows differ in length");
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) d += std::popcount(a.words[w] ^ b.words[w]);
  return d;
}

DissimMatrix hamming_matrix(const BitMatrix& bits, unsigned threads) {
  require(bits.rows() >= 2, Status::shape, "hamming_matrix needs at least two rows");
  require(bits.bits() >= 1, Status::shape, "hamming_matrix needs at least one bit");
  const std::size_t n = bits.rows();
  const double denom = static_cast<double>(bits.bits());
  DissimMatrix out;
  out.metric = Metric::normalized_hamming;
  out.values = Matrix(n, n);

  // Each worker owns whole upper-triangle rows and mirrors them; entries are
  // exact integer counts divided once, so the split cannot change a value.
  auto fill_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      const BitRow ri = bits.row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = static_cast<double>(hamming(ri, bits.row(j))) / denom;
        out.values(i, j) = v;
        out.values(j, i) = v;
      }
    }
  };

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t work = n * n * bits.words_per_row();
  if (threads == 1 || work < (std::size_t{1} << 20)) {
    fill_rows(0, 1);
  } else {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fill_rows, t, threads);
  }
  return out;
}

BitMatrix select_columns(const BitMatrix& bits, std::span<const std::size_t> indices) {
  require(!indices.empty(), Status::index, "select_columns: empty index list");
  std::vector<bool> seen(bits.bits(), false);
  for (std::size_t idx : indices) {
    require(idx < bits.bits(), Status::index,
            "select_columns: index " + std::to_string(idx) + " out of range");
    require(!seen[idx], Status::index,
            "select_columns: duplicate index " + std::to_string(idx));
    seen[idx] = true;
  }
  BitMatrix out(bits.rows(), indices.size());
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    const BitRow src = bits.row(r);
    auto dst = out.row_words(r);
    for (std::size_t k = 0; k < indices.size(); ++k)
      if (src.get(indices[k])) dst[k / kWordBits] |= std::uint64_t{1} << (k % kWordBits);
  }
  return out;
}

BitMatrix select_rows(const BitMatrix& bits, std::span<const std::size_t> rows) {
  BitMatrix out(rows.size(), bits.bits());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < bits.rows(), Status::index, "select_rows: row out of range");
    std::ranges::copy(bits.row(rows[i]).words, out.row_words(i).begin());
  }
  return out;
}

BitMatrix hconcat(const BitMatrix& a, const BitMatrix& b) {
  require(a.rows() == b.rows(), Status::shape, "hconcat: row counts differ");
  BitMatrix out(a.rows(), a.bits() + b.bits());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row_words(r);
    std::ranges::copy(a.row(r).words, dst.begin());
    const BitRow rb = b.row(r);
    for (std::size_t j = 0; j < b.bits(); ++j) {
      if (!rb.get(j)) continue;
      const std::size_t k = a.bits() + j;
      dst[k / kWordBits] |= std::uint64_t{1} << (k % kWordBits);
    }
  }
  return out;
}

}  // namespace relubits::bitvec
