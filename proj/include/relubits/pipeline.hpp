#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relubits/bitvec.hpp"
#include "relubits/dataset.hpp"
#include "relubits/featsel.hpp"
#include "relubits/net.hpp"
#include "relubits/spectral.hpp"
#include "relubits/svm.hpp"

namespace relubits::pipeline {

namespace fs = std::filesystem;

/// Activation pattern of hidden layer `layer` (1-based) for every row of
/// `inputs`. Throws Status::parameter for a layer outside [1, L].
bitvec::BitMatrix extract_bits(const net::MlpNetwork& net, const Matrix& inputs,
                               std::size_t layer);

/// Post-ReLU values of hidden layer `layer` (1-based).
Matrix extract_activations(const net::MlpNetwork& net, const Matrix& inputs,
                           std::size_t layer);

/// Resolves "all" or a 1-based layer number to a list of layers.
std::vector<std::size_t> resolve_layers(const net::MlpNetwork& net, const std::string& selector);

/// Effective k for a layer: `k` itself, or min(k, n_bits) when clamping.
/// Without clamping, k > n_bits is a Status::parameter error.
std::size_t effective_k(std::size_t k, std::size_t n_bits, bool clamp);

// ---------------------------------------------------------------- training

struct TrainSummary {
  net::MlpNetwork network;  // as written to disk (f32-rounded)
  std::vector<net::EpochLog> log;
  double train_accuracy = 0.0;
};

/// Trains, writes `weights.mlp` and `train_log.csv` into out_dir.
TrainSummary run_train(const Dataset& data, std::span<const std::size_t> layer_dims,
                       const net::SgdConfig& cfg, const fs::path& out_dir);

/// Writes one `layer<i>.bvm` per requested layer; returns the paths.
std::vector<fs::path> run_extract_bits(const net::MlpNetwork& net, const Dataset& data,
                                       const std::string& layers, const fs::path& out_dir);

// ----------------------------------------------------------- Fiedler stage

struct FiedlerOptions {
  std::size_t k = 64;
  bool clamp_k = false;
  fs::path out_dir;
  std::string prefix = "fiedler";  // file name stem for every artifact
};

struct FiedlerSplitResult {
  std::size_t n = 0;
  double lambda2 = 0.0;
  spectral::Partition partition;
  spectral::PartitionAccuracy accuracy;
};

struct FiedlerResult {
  std::optional<std::size_t> layer;
  std::size_t k_requested = 0;
  std::size_t k_effective = 0;
  std::vector<std::size_t> selected;
  FiedlerSplitResult train;
  FiedlerSplitResult eval;
};

/// Chi-square selection fit on the training rows, then for each split
/// separately: Hamming RDM -> adjacency -> Laplacian -> Fiedler partition
/// -> best-bijection accuracy. Evaluation labels are read only by the
/// final accuracy step. Writes <prefix>_selected.txt, <prefix>_scores.csv
/// and, per split, <prefix>_<split>_rdm.{dmx,pgm} and
/// <prefix>_<split>_partition.csv when out_dir is set.
FiedlerResult run_fiedler(const bitvec::BitMatrix& bits_train, std::span<const int> labels_train,
                          const bitvec::BitMatrix& bits_eval, std::span<const int> labels_eval,
                          const FiedlerOptions& opts, std::optional<std::size_t> layer = {});

/// Per-layer Fiedler stage straight from a network and two datasets.
std::vector<FiedlerResult> run_fiedler_layers(const net::MlpNetwork& net, const Dataset& train,
                                              const Dataset& eval, const std::string& layers,
                                              const FiedlerOptions& opts);

void write_fiedler_report(const fs::path& path, std::span<const FiedlerResult> results);

// ------------------------------------------------------ adversarial stage

struct AdversarialOptions {
  net::AttackConfig attack;
  bool clip_from_data = true;  // replace attack clip range by the data range
  std::size_t layer = 0;       // 0 = last hidden layer
  std::size_t k = 64;
  bool clamp_k = false;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  svm::SvmConfig svm;
  bool latent = false;  // also run the latent-embedding comparison
  fs::path out_dir;
};

struct AdversarialResult {
  std::size_t layer = 0;
  std::size_t n_train = 0;  // originals in the training split
  std::size_t n_test = 0;
  std::size_t k_effective = 0;
  std::vector<std::size_t> selected_original;
  std::vector<std::size_t> selected_adversarial;
  double max_linf = 0.0;
  double attack_success = 0.0;  // fraction of adversarial rows misclassified
  svm::SvmModel model;
  double accuracy = 0.0;
  double auroc = 0.0;
  std::optional<double> latent_accuracy;
  std::optional<double> latent_auroc;
  std::optional<double> rdm_pearson;
};

/// The detection experiment: split the originals, attack every sample,
/// take the analyzed layer's bits for both sets, select k bits per set on
/// its training split by class label, use [original selection |
/// adversarial selection] as features, label originals -1 and adversarial
/// +1, fit a linear SVM and score the test split.
AdversarialResult run_adversarial(const net::MlpNetwork& net, const Dataset& originals,
                                  const AdversarialOptions& opts);

void write_adversarial_report(const fs::path& path, const AdversarialResult& result,
                              const AdversarialOptions& opts);

}  // namespace relubits::pipeline
