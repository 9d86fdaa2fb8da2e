#include "relubits/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "relubits/error.hpp"

namespace relubits::io {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::ranges::reverse(bytes);
    return std::bit_cast<T>(bytes);
  }
}

class Writer {
 public:
  explicit Writer(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    require(static_cast<bool>(out_), Status::io, "cannot open '" + path.string() + "' for writing");
    path_ = path.string();
  }

  void magic(const char (&tag)[5]) { out_.write(tag, 4); }

  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  void u32(std::size_t v) {
    require(v <= 0xFFFFFFFFu, Status::io, "value does not fit the u32 field of " + path_);
    put(static_cast<std::uint32_t>(v));
  }

  void finish() {
    out_.flush();
    require(static_cast<bool>(out_), Status::io, "write to '" + path_ + "' failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const fs::path& path) : in_(path, std::ios::binary), path_(path.string()) {
    require(static_cast<bool>(in_), Status::io, "cannot open '" + path_ + "'");
  }

  void expect_magic(const char (&tag)[5]) {
    char buf[4] = {};
    in_.read(buf, 4);
    require(static_cast<bool>(in_) && std::memcmp(buf, tag, 4) == 0, Status::io,
            "'" + path_ + "' is not a " + std::string(tag, 4) + " file");
  }

  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(static_cast<bool>(in_), Status::io, "'" + path_ + "' is truncated");
    return to_little(v);
  }

  std::size_t u32() { return get<std::uint32_t>(); }

  void expect_end() {
    in_.peek();
    require(in_.eof(), Status::io, "'" + path_ + "' has trailing bytes");
  }

 private:
  std::ifstream in_;
  std::string path_;
};

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), Status::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_text_in(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Status::io, "cannot open '" + path.string() + "'");
  return in;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, const fs::path& path, std::size_t line) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(!t.empty() && end == t.c_str() + t.size(), Status::io,
          path.string() + ":" + std::to_string(line) + ": bad number '" + t + "'");
  return v;
}

long long parse_integer(const std::string& field, const fs::path& path, std::size_t line) {
  const std::string t = trim(field);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  require(!t.empty() && end == t.c_str() + t.size(), Status::io,
          path.string() + ":" + std::to_string(line) + ": bad integer '" + t + "'");
  return v;
}

// Numeric rows of a CSV file; blank lines are skipped and every row must
// have the same number of fields.
std::vector<std::vector<std::string>> read_csv_fields(const fs::path& path) {
  auto in = open_text_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    require(rows.empty() || fields.size() == rows.front().size(), Status::io,
            path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_network(const fs::path& path, const net::MlpNetwork& network) {
  network.validate();
  Writer w(path);
  w.magic("MLP1");
  w.u32(network.transitions());
  for (std::size_t t = 0; t < network.transitions(); ++t) {
    const Matrix& m = network.weights[t];
    w.u32(m.cols());
    w.u32(m.rows());
    for (double v : m.data()) w.put(static_cast<float>(v));
    for (double v : network.biases[t]) w.put(static_cast<float>(v));
  }
  w.finish();
}

net::MlpNetwork read_network(const fs::path& path) {
  Reader r(path);
  r.expect_magic("MLP1");
  const std::size_t layers = r.u32();
  require(layers >= 1, Status::io, "'" + path.string() + "' has no layers");
  net::MlpNetwork network;
  for (std::size_t t = 0; t < layers; ++t) {
    const std::size_t in = r.u32();
    const std::size_t out = r.u32();
    require(in > 0 && out > 0, Status::io, "'" + path.string() + "' has an empty layer");
    if (t == 0) {
      network.layer_dims.push_back(in);
    } else {
      require(in == network.layer_dims.back(), Status::io,
              "'" + path.string() + "': layer " + std::to_string(t) + " input width mismatch");
    }
    network.layer_dims.push_back(out);
    Matrix m(out, in);
    for (double& v : m.data()) v = static_cast<double>(r.get<float>());
    std::vector<double> b(out);
    for (double& v : b) v = static_cast<double>(r.get<float>());
    network.weights.push_back(std::move(m));
    network.biases.push_back(std::move(b));
  }
  r.expect_end();
  return network;
}

net::MlpNetwork round_to_f32(const net::MlpNetwork& network) {
  net::MlpNetwork out = network;
  for (auto& m : out.weights)
    for (double& v : m.data()) v = static_cast<double>(static_cast<float>(v));
  for (auto& b : out.biases)
    for (double& v : b) v = static_cast<double>(static_cast<float>(v));
  return out;
}

void write_bits(const fs::path& path, const bitvec::BitMatrix& bits) {
  Writer w(path);
  w.magic("BVM1");
  w.u32(bits.rows());
  w.u32(bits.bits());
  for (std::uint64_t word : bits.words()) w.put(word);
  w.finish();
}

bitvec::BitMatrix read_bits(const fs::path& path) {
  Reader r(path);
  r.expect_magic("BVM1");
  const std::size_t rows = r.u32();
  const std::size_t n_bits = r.u32();
  std::vector<std::uint64_t> words(rows * bitvec::words_for(n_bits));
  for (auto& word : words) word = r.get<std::uint64_t>();
  r.expect_end();
  try {
    return bitvec::BitMatrix::from_words(rows, n_bits, std::move(words));
  } catch (const Error& e) {
    fail(Status::io, "'" + path.string() + "': " + e.what());
  }
}

void write_dmx(const fs::path& path, const Matrix& m) {
  Writer w(path);
  w.magic("DMX1");
  w.u32(m.rows());
  w.u32(m.cols());
  for (double v : m.data()) w.put(v);
  w.finish();
}

Matrix read_dmx(const fs::path& path) {
  Reader r(path);
  r.expect_magic("DMX1");
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  Matrix m(rows, cols);
  for (double& v : m.data()) v = r.get<double>();
  r.expect_end();
  return m;
}

void write_svm(const fs::path& path, const svm::SvmModel& model) {
  Writer w(path);
  w.magic("SVM1");
  w.u32(model.w.size());
  w.put(model.b);
  for (double v : model.w) w.put(v);
  w.put(model.C);
  w.finish();
}

svm::SvmModel read_svm(const fs::path& path) {
  Reader r(path);
  r.expect_magic("SVM1");
  svm::SvmModel model;
  model.w.resize(r.u32());
  model.b = r.get<double>();
  for (double& v : model.w) v = r.get<double>();
  model.C = r.get<double>();
  r.expect_end();
  return model;
}

Dataset read_dataset_csv(const fs::path& path) {
  const auto rows = read_csv_fields(path);
  require(!rows.empty(), Status::io, "'" + path.string() + "' has no samples");
  require(rows.front().size() >= 2, Status::io,
          "'" + path.string() + "' needs features and a label column");
  const std::size_t dim = rows.front().size() - 1;
  Dataset d;
  d.features = Matrix(rows.size(), dim);
  d.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) d.features(i, j) = parse_double(rows[i][j], path, i + 1);
    const long long y = parse_integer(rows[i][dim], path, i + 1);
    require(y >= 0 && y <= 1'000'000, Status::io,
            path.string() + ":" + std::to_string(i + 1) + ": label must be a non-negative integer");
    d.labels[i] = static_cast<int>(y);
  }
  return d;
}

void write_dataset_csv(const fs::path& path, const Dataset& data) {
  auto out = open_text(path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) out << format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto rows = read_csv_fields(path);
  require(!rows.empty(), Status::io, "'" + path.string() + "' is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = parse_double(rows[i][j], path, i + 1);
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  auto out = open_text(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

std::vector<int> read_labels(const fs::path& path) {
  const auto rows = read_csv_fields(path);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == 1, Status::io, "'" + path.string() + "': one label per line");
    labels.push_back(static_cast<int>(parse_integer(rows[i][0], path, i + 1)));
  }
  return labels;
}

void write_labels(const fs::path& path, std::span<const int> labels) {
  auto out = open_text(path);
  for (int y : labels) out << y << '\n';
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

std::vector<std::size_t> read_indices(const fs::path& path) {
  std::vector<std::size_t> out;
  for (int v : read_labels(path)) {
    require(v >= 0, Status::io, "'" + path.string() + "': negative index");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_indices(const fs::path& path, std::span<const std::size_t> indices) {
  auto out = open_text(path);
  for (std::size_t i : indices) out << i << '\n';
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

void write_feature_scores(const fs::path& path, std::span<const double> scores) {
  auto out = open_text(path);
  out << "feature_index,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) out << i << ',' << format_double(scores[i]) << '\n';
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

void write_partition_csv(const fs::path& path, const spectral::Partition& partition) {
  auto out = open_text(path);
  out << "vertex_index,cluster_id\n";
  for (std::size_t i = 0; i < partition.assignment.size(); ++i)
    out << i << ',' << partition.assignment[i] << '\n';
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

void write_pgm(const fs::path& path, const Matrix& m) {
  require(!m.empty(), Status::io, "cannot write an empty heatmap");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Status::io, "cannot open '" + path.string() + "' for writing");
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  const auto [lo_it, hi_it] = std::ranges::minmax_element(m.data());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::string pixels(m.data().size(), static_cast<char>(128));
  if (hi > lo) {
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const double t = (m.data()[i] - lo) / (hi - lo);
      pixels[i] = static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0)));
    }
  }
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

}  // namespace relubits::io
