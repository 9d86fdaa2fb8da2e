#include "relubits/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "relubits/error.hpp"
#include "relubits/io.hpp"
#include "relubits/rdm.hpp"

namespace relubits::pipeline {

namespace {

void check_layer(const net::MlpNetwork& net, std::size_t layer) {
  require(layer >= 1 && layer <= net.hidden_layers(), Status::parameter,
          "layer " + std::to_string(layer) + " outside [1, " +
              std::to_string(net.hidden_layers()) + "]");
}

Matrix to_reals(const bitvec::BitMatrix& bits) {
  Matrix m(bits.rows(), bits.bits());
  for (std::size_t r = 0; r < bits.rows(); ++r)
    for (std::size_t j = 0; j < bits.bits(); ++j) m(r, j) = bits.get(r, j) ? 1.0 : 0.0;
  return m;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  require(top.cols() == bottom.cols(), Status::shape, "stacked blocks differ in width");
  Matrix m(top.rows() + bottom.rows(), top.cols());
  std::ranges::copy(top.data(), m.data().begin());
  std::ranges::copy(bottom.data(), m.data().begin() + static_cast<std::ptrdiff_t>(top.data().size()));
  return m;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) std::ranges::copy(m.row(rows[i]), out.row(i).begin());
  return out;
}

std::vector<int> gather(std::span<const int> v, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

// -1 for the first n_neg rows, +1 for the next n_pos.
std::vector<int> detector_labels(std::size_t n_neg, std::size_t n_pos) {
  std::vector<int> y(n_neg, -1);
  y.resize(n_neg + n_pos, 1);
  return y;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += io::format_double(v[i]);
  }
  return s;
}

std::ofstream open_report(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), Status::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void write_rdm_files(const fs::path& stem, const Matrix& values) {
  io::write_dmx(fs::path(stem.string() + ".dmx"), values);
  io::write_pgm(fs::path(stem.string() + ".pgm"), values);
}

FiedlerSplitResult fiedler_split(const bitvec::BitMatrix& bits, std::optional<std::size_t> layer,
                                 const std::string& split, const FiedlerOptions& opts) {
  std::optional<int> tag;
  if (layer) tag = static_cast<int>(*layer);
  const DissimMatrix r = rdm::rdm_hamming(bits, tag);
  const rdm::LaplacianMatrix l = rdm::laplacian(rdm::adjacency_from_dissim(r));
  FiedlerSplitResult out;
  out.n = bits.rows();
  try {
    out.partition = spectral::fiedler_partition(l);
  } catch (const Error& e) {
    const std::string where = layer ? "layer " + std::to_string(*layer) + ", " : std::string();
    fail(e.status(), where + split + " split: " + e.what());
  }
  out.lambda2 = out.partition.lambda2;
  if (!opts.out_dir.empty()) {
    const fs::path stem = opts.out_dir / (opts.prefix + "_" + split);
    write_rdm_files(fs::path(stem.string() + "_rdm"), r.values);
    io::write_partition_csv(fs::path(stem.string() + "_partition.csv"), out.partition);
  }
  return out;
}

}  // namespace

bitvec::BitMatrix extract_bits(const net::MlpNetwork& net, const Matrix& inputs,
                               std::size_t layer) {
  check_layer(net, layer);
  std::vector<std::vector<double>> outputs;
  outputs.reserve(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i)
    outputs.push_back(std::move(net::forward(net, inputs.row(i)).layer_outputs[layer - 1]));
  if (outputs.empty()) return bitvec::BitMatrix(0, net.layer_dims[layer]);
  return bitvec::binarize_rows(outputs);
}

Matrix extract_activations(const net::MlpNetwork& net, const Matrix& inputs, std::size_t layer) {
  check_layer(net, layer);
  Matrix out(inputs.rows(), net.layer_dims[layer]);
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    const auto trace = net::forward(net, inputs.row(i));
    std::ranges::copy(trace.layer_outputs[layer - 1], out.row(i).begin());
  }
  return out;
}

std::vector<std::size_t> resolve_layers(const net::MlpNetwork& net, const std::string& selector) {
  std::vector<std::size_t> layers;
  if (selector == "all") {
    for (std::size_t l = 1; l <= net.hidden_layers(); ++l) layers.push_back(l);
  } else if (selector == "last") {
    layers.push_back(net.hidden_layers());
  } else {
    std::size_t pos = 0;
    long long v = -1;
    try {
      v = std::stoll(selector, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == selector.size() && v >= 0, Status::parameter,
            "layer must be a number, 'last' or 'all', got '" + selector + "'");
    layers.push_back(static_cast<std::size_t>(v));
  }
  require(!layers.empty(), Status::parameter, "network has no hidden layers");
  for (std::size_t l : layers) check_layer(net, l);
  return layers;
}

std::size_t effective_k(std::size_t k, std::size_t n_bits, bool clamp) {
  require(k >= 1, Status::parameter, "k must be at least 1");
  if (clamp) return std::min(k, n_bits);
  require(k <= n_bits, Status::parameter,
          "k = " + std::to_string(k) + " exceeds the " + std::to_string(n_bits) +
              " available bits");
  return k;
}

TrainSummary run_train(const Dataset& data, std::span<const std::size_t> layer_dims,
                       const net::SgdConfig& cfg, const fs::path& out_dir) {
  TrainSummary s;
  s.network = io::round_to_f32(net::train_sgd(data, layer_dims, cfg, &s.log));
  s.train_accuracy = net::evaluate(s.network, data).accuracy;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    io::write_network(out_dir / "weights.mlp", s.network);
    auto log = open_report(out_dir / "train_log.csv");
    log << "epoch,mean_loss,accuracy\n";
    for (const auto& e : s.log)
      log << e.epoch << ',' << io::format_double(e.mean_loss) << ','
          << io::format_double(e.accuracy) << '\n';
  }
  return s;
}

std::vector<fs::path> run_extract_bits(const net::MlpNetwork& net, const Dataset& data,
                                       const std::string& layers, const fs::path& out_dir) {
  std::vector<fs::path> paths;
  fs::create_directories(out_dir);
  for (std::size_t l : resolve_layers(net, layers)) {
    const fs::path p = out_dir / ("layer" + std::to_string(l) + ".bvm");
    io::write_bits(p, extract_bits(net, data.features, l));
    paths.push_back(p);
  }
  return paths;
}

FiedlerResult run_fiedler(const bitvec::BitMatrix& bits_train, std::span<const int> labels_train,
                          const bitvec::BitMatrix& bits_eval, std::span<const int> labels_eval,
                          const FiedlerOptions& opts, std::optional<std::size_t> layer) {
  require(bits_train.bits() == bits_eval.bits(), Status::shape,
          "train and eval bit vectors differ in length");
  require(labels_train.size() == bits_train.rows() && labels_eval.size() == bits_eval.rows(),
          Status::shape, "one label per row required");

  FiedlerResult res;
  res.layer = layer;
  res.k_requested = opts.k;
  res.k_effective = effective_k(opts.k, bits_train.bits(), opts.clamp_k);

  const auto scores = featsel::select_k_best(bits_train, labels_train, res.k_effective);
  res.selected = scores.selected;
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    io::write_indices(opts.out_dir / (opts.prefix + "_selected.txt"), res.selected);
    io::write_feature_scores(opts.out_dir / (opts.prefix + "_scores.csv"), scores.scores);
  }

  res.train = fiedler_split(bitvec::select_columns(bits_train, res.selected), layer, "train", opts);
  res.eval = fiedler_split(bitvec::select_columns(bits_eval, res.selected), layer, "eval", opts);
  res.train.accuracy = spectral::partition_accuracy(res.train.partition, labels_train);
  res.eval.accuracy = spectral::partition_accuracy(res.eval.partition, labels_eval);
  return res;
}

std::vector<FiedlerResult> run_fiedler_layers(const net::MlpNetwork& net, const Dataset& train,
                                              const Dataset& eval, const std::string& layers,
                                              const FiedlerOptions& opts) {
  std::vector<FiedlerResult> results;
  for (std::size_t l : resolve_layers(net, layers)) {
    FiedlerOptions layer_opts = opts;
    layer_opts.prefix = "layer" + std::to_string(l);
    results.push_back(run_fiedler(extract_bits(net, train.features, l), train.labels,
                                  extract_bits(net, eval.features, l), eval.labels, layer_opts, l));
  }
  return results;
}

void write_fiedler_report(const fs::path& path, std::span<const FiedlerResult> results) {
  auto out = open_report(path);
  out << "report: fiedler\n";
  out << "entries: " << results.size() << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FiedlerResult& r = results[i];
    const std::string key =
        r.layer ? "layer" + std::to_string(*r.layer) : "entry" + std::to_string(i + 1);
    out << key << ".k_requested: " << r.k_requested << '\n';
    out << key << ".k_effective: " << r.k_effective << '\n';
    for (const auto* split : {&r.train, &r.eval}) {
      const std::string sk = key + (split == &r.train ? ".train" : ".eval");
      out << sk << ".n: " << split->n << '\n';
      out << sk << ".lambda2: " << io::format_double(split->lambda2) << '\n';
      out << sk << ".accuracy: " << io::format_double(split->accuracy.overall) << '\n';
      out << sk << ".per_class: " << join(split->accuracy.per_class) << '\n';
      out << sk << ".cluster_to_class:";
      for (std::size_t c = 0; c < split->accuracy.cluster_to_class.size(); ++c)
        out << (c == 0 ? " " : ",") << c << "->" << split->accuracy.cluster_to_class[c];
      out << '\n';
    }
  }
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

AdversarialResult run_adversarial(const net::MlpNetwork& net, const Dataset& originals,
                                  const AdversarialOptions& opts) {
  net.validate();
  require(originals.size() >= 4, Status::data, "need at least four samples");
  require(originals.dim() == net.input_dim(), Status::shape,
          "dataset dimension does not match the network input");

  AdversarialResult res;
  res.layer = opts.layer == 0 ? net.hidden_layers() : opts.layer;
  check_layer(net, res.layer);

  net::AttackConfig attack = opts.attack;
  if (opts.clip_from_data) {
    const auto [lo, hi] = feature_range(originals);
    attack.clip_min = lo;
    attack.clip_max = hi;
  }
  attack.validate();

  // Split, then give every original an adversarial twin with the same index.
  const Split split = train_test_split(originals.size(), opts.train_fraction, opts.seed);
  require(!split.train.empty() && !split.test.empty(), Status::data, "split left a side empty");
  res.n_train = split.train.size();
  res.n_test = split.test.size();

  Matrix adversarial(originals.size(), originals.dim());
  std::size_t fooled = 0;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const auto adv = net::attack(net, originals.features.row(i), originals.labels[i], attack);
    for (std::size_t j = 0; j < adv.size(); ++j)
      res.max_linf = std::max(res.max_linf, std::abs(adv[j] - originals.features(i, j)));
    std::ranges::copy(adv, adversarial.row(i).begin());
    if (net::predict(net, adv) != originals.labels[i]) ++fooled;
  }
  res.attack_success = static_cast<double>(fooled) / static_cast<double>(originals.size());

  const bitvec::BitMatrix bits_org = extract_bits(net, originals.features, res.layer);
  const bitvec::BitMatrix bits_adv = extract_bits(net, adversarial, res.layer);
  res.k_effective = effective_k(opts.k, bits_org.bits(), opts.clamp_k);

  // Class labels drive the selection, fit on training rows only.
  const std::vector<int> class_train = gather(originals.labels, split.train);
  res.selected_original =
      featsel::select_k_best(bitvec::select_rows(bits_org, split.train), class_train, res.k_effective)
          .selected;
  res.selected_adversarial =
      featsel::select_k_best(bitvec::select_rows(bits_adv, split.train), class_train, res.k_effective)
          .selected;

  auto features = [&](const bitvec::BitMatrix& bits, std::span<const std::size_t> rows) {
    const bitvec::BitMatrix sub = bitvec::select_rows(bits, rows);
    return bitvec::hconcat(bitvec::select_columns(sub, res.selected_original),
                           bitvec::select_columns(sub, res.selected_adversarial));
  };

  // Detector rows: originals first (-1), adversarial second (+1).
  const bitvec::BitMatrix train_org = features(bits_org, split.train);
  const bitvec::BitMatrix train_adv = features(bits_adv, split.train);
  const bitvec::BitMatrix test_org = features(bits_org, split.test);
  const bitvec::BitMatrix test_adv = features(bits_adv, split.test);
  const Matrix x_train = stack_rows(to_reals(train_org), to_reals(train_adv));
  const Matrix x_test = stack_rows(to_reals(test_org), to_reals(test_adv));
  const std::vector<int> y_train = detector_labels(res.n_train, res.n_train);
  const std::vector<int> y_test = detector_labels(res.n_test, res.n_test);

  // Train and score the detector.
  res.model = svm::svm_train(x_train, y_train, opts.svm);
  const std::vector<double> scores = svm::svm_scores(res.model, x_test);
  std::vector<int> predicted(scores.size());
  std::ranges::transform(scores, predicted.begin(), svm::label_for_score);
  res.accuracy = svm::accuracy(predicted, y_test);
  res.auroc = svm::auroc(scores, y_test);

  std::optional<DissimMatrix> bit_rdm;
  std::optional<DissimMatrix> latent_rdm;
  if (opts.latent) {
    const std::size_t last = net.hidden_layers();
    const Matrix lat_org = extract_activations(net, originals.features, last);
    const Matrix lat_adv = extract_activations(net, adversarial, last);
    const Matrix lat_train =
        stack_rows(gather_rows(lat_org, split.train), gather_rows(lat_adv, split.train));
    const Matrix lat_test =
        stack_rows(gather_rows(lat_org, split.test), gather_rows(lat_adv, split.test));
    const svm::SvmModel latent_model = svm::svm_train(lat_train, y_train, opts.svm);
    const std::vector<double> lat_scores = svm::svm_scores(latent_model, lat_test);
    std::vector<int> lat_pred(lat_scores.size());
    std::ranges::transform(lat_scores, lat_pred.begin(), svm::label_for_score);
    res.latent_accuracy = svm::accuracy(lat_pred, y_test);
    res.latent_auroc = svm::auroc(lat_scores, y_test);

    // RDMs over the test rows, originals then adversarial.
    bitvec::BitMatrix test_bits(test_org.rows() + test_adv.rows(), test_org.bits());
    for (std::size_t r = 0; r < test_org.rows(); ++r)
      std::ranges::copy(test_org.row(r).words, test_bits.row_words(r).begin());
    for (std::size_t r = 0; r < test_adv.rows(); ++r)
      std::ranges::copy(test_adv.row(r).words, test_bits.row_words(test_org.rows() + r).begin());
    bit_rdm = rdm::rdm_hamming(test_bits, static_cast<int>(res.layer));
    latent_rdm = rdm::rdm_cosine(lat_test, static_cast<int>(last));
    res.rdm_pearson = rdm::pearson_rdm(*bit_rdm, *latent_rdm);
  }

  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    Dataset adv_data{adversarial, originals.labels};
    io::write_dataset_csv(opts.out_dir / "adversarial.csv", adv_data);
    io::write_indices(opts.out_dir / "selected_original.txt", res.selected_original);
    io::write_indices(opts.out_dir / "selected_adversarial.txt", res.selected_adversarial);
    io::write_svm(opts.out_dir / "detector.svm", res.model);
    auto sc = open_report(opts.out_dir / "test_scores.csv");
    sc << "row,label,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
      sc << i << ',' << (y_test[i] > 0 ? 1 : 0) << ',' << io::format_double(scores[i]) << '\n';
    if (bit_rdm) {
      write_rdm_files(opts.out_dir / "rdm_bits", bit_rdm->values);
      write_rdm_files(opts.out_dir / "rdm_latent", latent_rdm->values);
    }
  }
  return res;
}

void write_adversarial_report(const fs::path& path, const AdversarialResult& r,
                              const AdversarialOptions& opts) {
  auto out = open_report(path);
  out << "report: adversarial\n";
  out << "attack: " << net::attack_kind_name(opts.attack.kind) << '\n';
  out << "epsilon: " << io::format_double(opts.attack.epsilon) << '\n';
  if (opts.attack.kind == net::AttackKind::pgd) {
    out << "pgd_steps: " << opts.attack.pgd_steps << '\n';
    out << "pgd_step_size: " << io::format_double(opts.attack.pgd_step_size) << '\n';
  }
  out << "layer: " << r.layer << '\n';
  out << "k_requested: " << opts.k << '\n';
  out << "k_effective: " << r.k_effective << '\n';
  out << "features: " << r.selected_original.size() + r.selected_adversarial.size() << '\n';
  out << "n_train_pairs: " << r.n_train << '\n';
  out << "n_test_pairs: " << r.n_test << '\n';
  out << "max_linf: " << io::format_double(r.max_linf) << '\n';
  out << "attack_success: " << io::format_double(r.attack_success) << '\n';
  out << "svm_iterations: " << r.model.iterations << '\n';
  out << "svm_final_violation: " << io::format_double(r.model.final_violation) << '\n';
  out << "accuracy: " << io::format_double(r.accuracy) << '\n';
  out << "auroc: " << io::format_double(r.auroc) << '\n';
  if (r.latent_accuracy) out << "latent_accuracy: " << io::format_double(*r.latent_accuracy) << '\n';
  if (r.latent_auroc) out << "latent_auroc: " << io::format_double(*r.latent_auroc) << '\n';
  if (r.rdm_pearson) out << "rdm_pearson: " << io::format_double(*r.rdm_pearson) << '\n';
  require(static_cast<bool>(out), Status::io, "write to '" + path.string() + "' failed");
}

}  // namespace relubits::pipeline
