#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "relubits/dissim.hpp"

namespace relubits::bitvec {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t n_bits) {
  return (n_bits + kWordBits - 1) / kWordBits;
}

/// Read-only view of one packed row. Bit j lives in word j/64 at position
/// j%64 (least significant first).
struct BitRow {
  std::span<const std::uint64_t> words;
  std::size_t n_bits = 0;

  bool get(std::size_t j) const { return (words[j / kWordBits] >> (j % kWordBits)) & 1U; }
};

/// n_rows packed binary activation patterns of n_bits each. Pad bits past
/// n_bits in the last word of a row are always zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t n_rows, std::size_t n_bits);

  /// Adopts raw words; throws Status::data if the size is wrong or any
  /// pad bit is set.
  static BitMatrix from_words(std::size_t n_rows, std::size_t n_bits,
                              std::vector<std::uint64_t> words);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t bits() const noexcept { return n_bits_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  bool get(std::size_t r, std::size_t j) const {
    return (words_[r * words_per_row_ + j / kWordBits] >> (j % kWordBits)) & 1U;
  }
  void set(std::size_t r, std::size_t j, bool value);

  BitRow row(std::size_t r) const {
    return {{words_.data() + r * words_per_row_, words_per_row_}, n_bits_};
  }
  std::span<std::uint64_t> row_words(std::size_t r) {
    return {words_.data() + r * words_per_row_, words_per_row_};
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// True when every pad bit is zero.
  bool pad_bits_clear() const;

  /// Row r as 0.0 / 1.0 values.
  std::vector<double> row_as_reals(std::size_t r) const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_bits_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Packs a post-ReLU layer output: bit j is 1 iff o_j > 0. A negative
/// entry is a Status::contract violation.
std::vector<std::uint64_t> binarize(std::span<const double> layer_output);

/// Stacks binarized rows into a matrix; all rows must have equal length.
BitMatrix binarize_rows(std::span<const std::vector<double>> layer_outputs);

/// Number of differing positions; throws Status::shape on length mismatch.
std::size_t hamming(BitRow a, BitRow b);

/// Pairwise Hamming distance divided by the current n_bits. `threads` = 0
/// picks the hardware concurrency; the result does not depend on it.
DissimMatrix hamming_matrix(const BitMatrix& bits, unsigned threads = 0);

/// Column gather: bit k of each output row is source bit indices[k].
/// Throws Status::index for an empty list, out-of-range or repeated index.
BitMatrix select_columns(const BitMatrix& bits, std::span<const std::size_t> indices);

/// Row gather.
BitMatrix select_rows(const BitMatrix& bits, std::span<const std::size_t> rows);

/// Horizontal concatenation [a | b]; row counts must match.
BitMatrix hconcat(const BitMatrix& a, const BitMatrix& b);

}  // namespace relubits::bitvec
