// relubits command-line front end. Everything goes through the C API.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relubits/relubits.h"

namespace fs = std::filesystem;

namespace {

// Thrown to unwind with a C API status.
struct Failure {
  rb_status status;
  std::string message;
};

// Thrown for a semantically invalid flag combination.
struct Usage {
  std::string message;
};

void check(rb_status s) {
  if (s != RB_OK) throw Failure{s, rb_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<rb_dataset, Deleter<rb_dataset, rb_dataset_free>>;
using Network = std::unique_ptr<rb_network, Deleter<rb_network, rb_network_free>>;
using Bits = std::unique_ptr<rb_bitmatrix, Deleter<rb_bitmatrix, rb_bitmatrix_free>>;
using DMatrix = std::unique_ptr<rb_matrix, Deleter<rb_matrix, rb_matrix_free>>;
using Svm = std::unique_ptr<rb_svm, Deleter<rb_svm, rb_svm_free>>;

Dataset load_dataset(const std::string& path) {
  rb_dataset* d = nullptr;
  check(rb_dataset_read_csv(path.c_str(), &d));
  return Dataset(d);
}

Network load_network(const std::string& path) {
  rb_network* n = nullptr;
  check(rb_network_read(path.c_str(), &n));
  return Network(n);
}

Bits load_bits(const std::string& path) {
  rb_bitmatrix* b = nullptr;
  check(rb_bitmatrix_read(path.c_str(), &b));
  return Bits(b);
}

std::vector<int32_t> load_labels(const std::string& path) {
  size_t n = 0;
  check(rb_read_labels(path.c_str(), nullptr, 0, &n));
  std::vector<int32_t> labels(n);
  check(rb_read_labels(path.c_str(), labels.data(), labels.size(), &n));
  return labels;
}

// A CSV feature matrix, or a BVM file seen as 0/1 reals.
DMatrix load_features(const std::string& path) {
  rb_matrix* m = nullptr;
  if (fs::path(path).extension() == ".bvm") {
    Bits b = load_bits(path);
    const size_t rows = rb_bitmatrix_rows(b.get());
    const size_t cols = rb_bitmatrix_bits(b.get());
    std::vector<double> values(rows * cols);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c) values[r * cols + c] = rb_bitmatrix_get(b.get(), r, c);
    check(rb_matrix_create(rows, cols, values.data(), &m));
  } else {
    check(rb_matrix_read_csv(path.c_str(), &m));
  }
  return DMatrix(m);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{RB_E_IO, "cannot create directory " + dir + ": " + ec.message()};
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// "last" -> 0, otherwise a positive layer number.
size_t parse_layer_number(const std::string& s) {
  if (s == "last") return 0;
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos == s.size() && v >= 1) return static_cast<size_t>(v);
  } catch (const std::exception&) {
  }
  throw Usage{"--layer must be 'last' or a positive integer, got '" + s + "'"};
}

rb_attack_kind parse_attack(const std::string& s) {
  return s == "pgd" ? RB_ATTACK_PGD : RB_ATTACK_FGSM;
}

// Options shared by the attack-running subcommands.
struct AttackFlags {
  std::string kind = "fgsm";
  double epsilon = 0.1;
  uint32_t steps = 10;
  double step_size = 0.01;
  std::optional<double> clip_min;
  std::optional<double> clip_max;

  void add(CLI::App* cmd) {
    cmd->add_option("--attack", kind, "fgsm or pgd")
        ->check(CLI::IsMember({"fgsm", "pgd"}))
        ->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "L-infinity budget")->capture_default_str();
    cmd->add_option("--steps", steps, "PGD iterations")->capture_default_str();
    cmd->add_option("--step-size", step_size, "PGD step")->capture_default_str();
    cmd->add_option("--clip-min", clip_min, "lower input bound (default: data minimum)");
    cmd->add_option("--clip-max", clip_max, "upper input bound (default: data maximum)");
  }

  rb_attack_params params() const {
    if (clip_min.has_value() != clip_max.has_value())
      throw Usage{"--clip-min and --clip-max go together"};
    rb_attack_params p;
    rb_attack_params_default(&p);
    p.kind = parse_attack(kind);
    p.epsilon = epsilon;
    p.pgd_steps = steps;
    p.pgd_step_size = step_size;
    if (clip_min) {
      p.clip_from_data = 0;
      p.clip_min = *clip_min;
      p.clip_max = *clip_max;
    }
    return p;
  }
};

struct SvmFlags {
  double C = 1.0;
  double tol = 1e-4;
  uint32_t max_iter = 1000;

  void add(CLI::App* cmd) {
    cmd->add_option("--C", C, "soft-margin penalty")->capture_default_str();
    cmd->add_option("--tol", tol, "stopping tolerance")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "maximum epochs")->capture_default_str();
  }

  rb_svm_params params(uint64_t seed) const { return {C, tol, max_iter, seed}; }
};

std::FILE* open_text(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw Failure{RB_E_IO, "cannot write " + path};
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReLU activation-pattern analysis toolkit"};
  app.set_version_flag("--version", rb_version());
  app.require_subcommand(1);

  uint64_t seed = 0;
  std::string out = ".";
  std::string data_path, weights_path, bits_path, labels_path, train_path, eval_path;
  std::string layer = "last";
  size_t k = 64;
  bool clamp_k = false;

  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", seed, "random seed")->capture_default_str();
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", out, "output directory")->capture_default_str();
  };

  // make-blobs
  rb_blobs_params blobs;
  rb_blobs_params_default(&blobs);
  double split_fraction = 0.0;
  auto* c_blobs = app.add_subcommand("make-blobs", "write a seeded Gaussian-blobs dataset");
  add_seed(c_blobs);
  add_out(c_blobs);
  c_blobs->add_option("--classes", blobs.classes)->capture_default_str();
  c_blobs->add_option("--dim", blobs.dim)->capture_default_str();
  c_blobs->add_option("--per-class", blobs.samples_per_class)->capture_default_str();
  c_blobs->add_option("--separation", blobs.separation, "mean distance in sigmas")
      ->capture_default_str();
  c_blobs->add_option("--sigma", blobs.sigma)->capture_default_str();
  c_blobs->add_option("--split", split_fraction,
                      "also write train.csv / eval.csv with this train fraction");

  // train
  std::vector<uint32_t> dims{16, 64, 64, 32, 2};
  rb_train_params train;
  rb_train_params_default(&train);
  auto* c_train = app.add_subcommand("train", "train an MLP with minibatch SGD");
  add_seed(c_train);
  add_out(c_train);
  c_train->add_option("--data", data_path, "training CSV")->required();
  c_train->add_option("--layers", dims, "layer widths, input first")
      ->delimiter(',')
      ->capture_default_str();
  c_train->add_option("--epochs", train.epochs)->capture_default_str();
  c_train->add_option("--lr", train.learning_rate)->capture_default_str();
  c_train->add_option("--batch", train.batch_size)->capture_default_str();

  // extract-bits
  auto* c_extract = app.add_subcommand("extract-bits", "write ReLU activation bits per layer");
  add_out(c_extract);
  c_extract->add_option("--weights", weights_path)->required();
  c_extract->add_option("--data", data_path)->required();
  c_extract->add_option("--layer", layer, "all, last or a 1-based layer")->capture_default_str();

  // attack
  AttackFlags attack_flags;
  auto* c_attack = app.add_subcommand("attack", "write adversarial counterparts of a dataset");
  add_out(c_attack);
  c_attack->add_option("--weights", weights_path)->required();
  c_attack->add_option("--data", data_path)->required();
  attack_flags.add(c_attack);

  // rdm
  std::string metric = "hamming";
  auto* c_rdm = app.add_subcommand("rdm", "dissimilarity matrix of bit vectors or embeddings");
  add_out(c_rdm);
  c_rdm->add_option("--metric", metric)
      ->check(CLI::IsMember({"hamming", "cosine"}))
      ->capture_default_str();
  c_rdm->add_option("--input", bits_path, "BVM file (hamming, cosine) or CSV matrix (cosine)")
      ->required();

  // fiedler
  std::string rdm_path;
  uint32_t levels = 1;
  auto* c_fiedler = app.add_subcommand("fiedler", "spectral partition of an RDM");
  add_out(c_fiedler);
  c_fiedler->add_option("--rdm", rdm_path, "DMX file")->required();
  c_fiedler->add_option("--levels", levels, "2^levels clusters")->capture_default_str();
  c_fiedler->add_option("--labels", labels_path, "class labels, for an accuracy line");

  // select-features
  auto* c_select = app.add_subcommand("select-features", "chi-square top-k bit selection");
  add_out(c_select);
  c_select->add_option("--bits", bits_path)->required();
  c_select->add_option("--labels", labels_path)->required();
  c_select->add_option("--k", k)->capture_default_str();
  c_select->add_flag("--clamp-k", clamp_k, "use min(k, bits) instead of failing");

  // svm-train / svm-eval
  SvmFlags svm_flags;
  std::string features_path, model_path;
  auto* c_svm_train = app.add_subcommand("svm-train", "fit the linear detector");
  add_seed(c_svm_train);
  add_out(c_svm_train);
  c_svm_train->add_option("--features", features_path, "CSV matrix or BVM file")->required();
  c_svm_train->add_option("--labels", labels_path, "-1 / +1 per row")->required();
  svm_flags.add(c_svm_train);

  auto* c_svm_eval = app.add_subcommand("svm-eval", "score a detector");
  add_out(c_svm_eval);
  c_svm_eval->add_option("--model", model_path, "SVM1 file")->required();
  c_svm_eval->add_option("--features", features_path, "CSV matrix or BVM file")->required();
  c_svm_eval->add_option("--labels", labels_path, "-1 / +1 per row");

  // pipeline-fiedler
  auto* c_pf = app.add_subcommand("pipeline-fiedler", "per-layer Fiedler class separation");
  add_out(c_pf);
  c_pf->add_option("--weights", weights_path)->required();
  c_pf->add_option("--train", train_path, "CSV used to fit the feature selection")->required();
  c_pf->add_option("--eval", eval_path, "held-out CSV")->required();
  c_pf->add_option("--layer", layer, "all, last or a 1-based layer")->capture_default_str();
  c_pf->add_option("--k", k)->capture_default_str();
  c_pf->add_flag("--clamp-k", clamp_k, "use min(k, bits) instead of failing");

  // pipeline-adv
  AttackFlags adv_attack;
  SvmFlags adv_svm;
  double train_fraction = 0.8;
  bool latent = false;
  auto* c_pa = app.add_subcommand("pipeline-adv", "adversarial detection from activation bits");
  add_seed(c_pa);
  add_out(c_pa);
  c_pa->add_option("--weights", weights_path)->required();
  c_pa->add_option("--data", data_path, "original samples")->required();
  c_pa->add_option("--layer", layer, "last or a 1-based layer")->capture_default_str();
  c_pa->add_option("--k", k)->capture_default_str();
  c_pa->add_flag("--clamp-k", clamp_k, "use min(k, bits) instead of failing");
  c_pa->add_option("--train-fraction", train_fraction)->capture_default_str();
  c_pa->add_flag("--latent", latent, "also run the latent-embedding comparison");
  adv_attack.add(c_pa);
  adv_svm.add(c_pa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_blobs) {
      blobs.seed = seed;
      ensure_dir(out);
      rb_dataset* d = nullptr;
      check(rb_dataset_make_blobs(&blobs, &d));
      Dataset data(d);
      check(rb_dataset_write_csv(data.get(), join(out, "data.csv").c_str()));
      if (split_fraction != 0.0) {
        rb_dataset *tr = nullptr, *ev = nullptr;
        check(rb_dataset_split(data.get(), split_fraction, seed, &tr, &ev));
        Dataset train_set(tr), eval_set(ev);
        check(rb_dataset_write_csv(train_set.get(), join(out, "train.csv").c_str()));
        check(rb_dataset_write_csv(eval_set.get(), join(out, "eval.csv").c_str()));
      }
    } else if (*c_train) {
      train.seed = seed;
      ensure_dir(out);
      Dataset data = load_dataset(data_path);
      rb_network* n = nullptr;
      rb_train_summary s{};
      check(rb_network_train(data.get(), dims.data(), dims.size(), &train, out.c_str(), &n, &s));
      Network net(n);
      std::printf("final_loss: %.17g\ntrain_accuracy: %.17g\n", s.final_loss, s.train_accuracy);
    } else if (*c_extract) {
      ensure_dir(out);
      Network net = load_network(weights_path);
      Dataset data = load_dataset(data_path);
      size_t written = 0;
      check(rb_extract_bits_to_dir(net.get(), data.get(), layer.c_str(), out.c_str(), &written));
      std::printf("layers_written: %zu\n", written);
    } else if (*c_attack) {
      ensure_dir(out);
      Network net = load_network(weights_path);
      Dataset data = load_dataset(data_path);
      const rb_attack_params p = attack_flags.params();
      rb_dataset* a = nullptr;
      check(rb_attack_dataset(net.get(), data.get(), &p, &a));
      Dataset adv(a);
      check(rb_dataset_write_csv(adv.get(), join(out, "adversarial.csv").c_str()));
    } else if (*c_rdm) {
      ensure_dir(out);
      rb_matrix* r = nullptr;
      if (metric == "hamming") {
        if (fs::path(bits_path).extension() != ".bvm")
          throw Usage{"--metric hamming needs a .bvm input"};
        Bits b = load_bits(bits_path);
        check(rb_rdm_hamming(b.get(), &r));
      } else {
        DMatrix e = load_features(bits_path);
        check(rb_rdm_cosine(e.get(), &r));
      }
      DMatrix rdm(r);
      check(rb_matrix_write_dmx(rdm.get(), join(out, "rdm.dmx").c_str()));
      check(rb_matrix_write_pgm(rdm.get(), join(out, "rdm.pgm").c_str()));
    } else if (*c_fiedler) {
      ensure_dir(out);
      rb_matrix* r = nullptr;
      check(rb_matrix_read_dmx(rdm_path.c_str(), &r));
      DMatrix rdm(r);
      const size_t n = rb_matrix_rows(rdm.get());
      std::vector<int32_t> assignment(n);
      double lambda2 = 0.0;
      check(rb_partition_rdm(rdm.get(), levels, assignment.data(), n, &lambda2));
      check(rb_write_partition_csv(assignment.data(), n, join(out, "partition.csv").c_str()));
      std::FILE* f = open_text(join(out, "report.txt"));
      std::fprintf(f, "vertices: %zu\nclusters: %u\nlambda2: %.17g\n", n, 1u << levels, lambda2);
      if (!labels_path.empty()) {
        const auto labels = load_labels(labels_path);
        if (labels.size() != n) {
          std::fclose(f);
          throw Failure{RB_E_EVALUATION, "labels and RDM differ in length"};
        }
        double acc = 0.0;
        const rb_status s = rb_partition_accuracy(assignment.data(), labels.data(), n,
                                                  1u << levels, &acc);
        if (s != RB_OK) std::fclose(f);
        check(s);
        std::fprintf(f, "accuracy: %.17g\n", acc);
      }
      std::fclose(f);
      std::printf("lambda2: %.17g\n", lambda2);
    } else if (*c_select) {
      ensure_dir(out);
      Bits b = load_bits(bits_path);
      const auto labels = load_labels(labels_path);
      if (labels.size() != rb_bitmatrix_rows(b.get()))
        throw Failure{RB_E_SHAPE, "labels and bit matrix differ in length"};
      const size_t n_bits = rb_bitmatrix_bits(b.get());
      const size_t k_eff = clamp_k && k > n_bits ? n_bits : k;
      std::vector<size_t> selected(k_eff);
      std::vector<double> scores(n_bits);
      check(rb_select_k_best(b.get(), labels.data(), labels.size(), k_eff, selected.data(),
                             scores.data()));
      check(rb_write_feature_scores(scores.data(), scores.size(), join(out, "scores.csv").c_str()));
      check(rb_write_indices(selected.data(), selected.size(), join(out, "selected.txt").c_str()));
    } else if (*c_svm_train) {
      ensure_dir(out);
      DMatrix x = load_features(features_path);
      const auto y = load_labels(labels_path);
      if (y.size() != rb_matrix_rows(x.get()))
        throw Failure{RB_E_SHAPE, "labels and features differ in length"};
      const rb_svm_params p = svm_flags.params(seed);
      rb_svm* m = nullptr;
      check(rb_svm_train(x.get(), y.data(), y.size(), &p, &m));
      Svm model(m);
      check(rb_svm_write(model.get(), join(out, "detector.svm").c_str()));
    } else if (*c_svm_eval) {
      ensure_dir(out);
      rb_svm* m = nullptr;
      check(rb_svm_read(model_path.c_str(), &m));
      Svm model(m);
      DMatrix x = load_features(features_path);
      const size_t n = rb_matrix_rows(x.get());
      std::vector<double> scores(n);
      check(rb_svm_scores(model.get(), x.get(), scores.data(), n));
      std::vector<int32_t> predicted(n);
      for (size_t i = 0; i < n; ++i) predicted[i] = scores[i] >= 0.0 ? 1 : -1;
      std::FILE* f = open_text(join(out, "scores.csv"));
      std::fprintf(f, "index,score,predicted\n");
      for (size_t i = 0; i < n; ++i) std::fprintf(f, "%zu,%.17g,%d\n", i, scores[i], predicted[i]);
      std::fclose(f);
      if (!labels_path.empty()) {
        const auto y = load_labels(labels_path);
        if (y.size() != n) throw Failure{RB_E_SHAPE, "labels and features differ in length"};
        double acc = 0.0, auc = 0.0;
        check(rb_accuracy(predicted.data(), y.data(), n, &acc));
        check(rb_auroc(scores.data(), y.data(), n, &auc));
        std::FILE* r = open_text(join(out, "report.txt"));
        std::fprintf(r, "accuracy: %.17g\nauroc: %.17g\n", acc, auc);
        std::fclose(r);
        std::printf("accuracy: %.17g\nauroc: %.17g\n", acc, auc);
      }
    } else if (*c_pf) {
      ensure_dir(out);
      Network net = load_network(weights_path);
      Dataset tr = load_dataset(train_path);
      Dataset ev = load_dataset(eval_path);
      const rb_fiedler_params p{k, clamp_k ? 1 : 0, out.c_str()};
      std::vector<rb_fiedler_result> results(rb_network_hidden_layers(net.get()));
      size_t n = 0;
      check(rb_pipeline_fiedler(net.get(), tr.get(), ev.get(), layer.c_str(), &p, results.data(),
                                results.size(), &n));
      for (size_t i = 0; i < n; ++i)
        std::printf("layer %zu: k=%zu train %.4f eval %.4f\n", results[i].layer,
                    results[i].k_effective, results[i].train_accuracy, results[i].eval_accuracy);
    } else if (*c_pa) {
      ensure_dir(out);
      Network net = load_network(weights_path);
      Dataset data = load_dataset(data_path);
      rb_adv_params p;
      rb_adv_params_default(&p);
      p.attack = adv_attack.params();
      p.layer = parse_layer_number(layer);
      p.k = k;
      p.clamp_k = clamp_k ? 1 : 0;
      p.train_fraction = train_fraction;
      p.seed = seed;
      p.svm = adv_svm.params(seed);
      p.latent = latent ? 1 : 0;
      p.out_dir = out.c_str();
      rb_adv_result r{};
      check(rb_pipeline_adversarial(net.get(), data.get(), &p, &r));
      std::printf("accuracy: %.17g\nauroc: %.17g\n", r.accuracy, r.auroc);
      if (r.has_latent)
        std::printf("latent_accuracy: %.17g\nlatent_auroc: %.17g\nrdm_pearson: %.17g\n",
                    r.latent_accuracy, r.latent_auroc, r.rdm_pearson);
    }
  } catch (const Usage& u) {
    std::fprintf(stderr, "usage error: %s\n", u.message.c_str());
    return 1;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", rb_status_name(f.status), f.message.c_str());
    return rb_exit_code(f.status);
  }
  return 0;
}
