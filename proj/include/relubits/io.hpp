#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "relubits/bitvec.hpp"
#include "relubits/dataset.hpp"
#include "relubits/matrix.hpp"
#include "relubits/net.hpp"
#include "relubits/spectral.hpp"
#include "relubits/svm.hpp"

// Binary formats (all little-endian):
//   MLP1  "MLP1" u32 T, then T x (u32 in, u32 out, out*in f32 weights, out f32 biases)
//   BVM1  "BVM1" u32 rows, u32 bits, rows*ceil(bits/64) u64 words
//   DMX1  "DMX1" u32 rows, u32 cols, rows*cols f64 row-major
//   SVM1  "SVM1" u32 d, f64 b, d f64 weights, f64 C
// Reading failures throw Status::io.

namespace relubits::io {

namespace fs = std::filesystem;

void write_network(const fs::path& path, const net::MlpNetwork& net);
net::MlpNetwork read_network(const fs::path& path);
/// MLP1 stores f32, so this is what a network looks like after a round trip.
net::MlpNetwork round_to_f32(const net::MlpNetwork& net);

void write_bits(const fs::path& path, const bitvec::BitMatrix& bits);
bitvec::BitMatrix read_bits(const fs::path& path);

void write_dmx(const fs::path& path, const Matrix& m);
Matrix read_dmx(const fs::path& path);

void write_svm(const fs::path& path, const svm::SvmModel& model);
svm::SvmModel read_svm(const fs::path& path);

/// One sample per line: features, then the integer label in the last column.
Dataset read_dataset_csv(const fs::path& path);
void write_dataset_csv(const fs::path& path, const Dataset& data);

/// Plain numeric CSV, every value printed with %.17g.
Matrix read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const Matrix& m);

/// One integer per line.
std::vector<int> read_labels(const fs::path& path);
void write_labels(const fs::path& path, std::span<const int> labels);

/// One index per line.
std::vector<std::size_t> read_indices(const fs::path& path);
void write_indices(const fs::path& path, std::span<const std::size_t> indices);

/// Header "feature_index,score", one row per feature.
void write_feature_scores(const fs::path& path, std::span<const double> scores);

/// Header "vertex_index,cluster_id".
void write_partition_csv(const fs::path& path, const spectral::Partition& partition);

/// Binary greyscale heatmap: [min,max] mapped linearly to [0,255], a
/// constant matrix maps to 128.
void write_pgm(const fs::path& path, const Matrix& m);

std::string format_double(double v);

}  // namespace relubits::io
