#include "relubits/relubits.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "relubits/error.hpp"
#include "relubits/featsel.hpp"
#include "relubits/io.hpp"
#include "relubits/pipeline.hpp"
#include "relubits/rdm.hpp"
#include "relubits/spectral.hpp"
#include "relubits/svm.hpp"

using namespace relubits;

struct rb_dataset {
  Dataset value;
};
struct rb_network {
  net::MlpNetwork value;
};
struct rb_bitmatrix {
  bitvec::BitMatrix value;
};
struct rb_matrix {
  Matrix value;
};
struct rb_svm {
  svm::SvmModel value;
};

namespace {

thread_local std::string g_last_error;

rb_status set_error(rb_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

// Runs f, converting every exception into a status code.
template <class F>
rb_status guarded(F&& f) {
  try {
    f();
    return RB_OK;
  } catch (const Error& e) {
    return set_error(static_cast<rb_status>(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RB_E_INTERNAL, e.what());
  }
}

#define RB_REQUIRE_ARG(p)                                                 \
  do {                                                                    \
    if ((p) == nullptr) return set_error(RB_E_NULL_ARGUMENT, #p " is NULL"); \
  } while (0)

template <class Handle, class T>
Handle* wrap(T&& value) {
  return new Handle{std::forward<T>(value)};
}

std::vector<std::size_t> to_dims(const uint32_t* dims, size_t n) {
  return {dims, dims + n};
}

net::AttackConfig to_attack(const rb_attack_params& p) {
  net::AttackConfig a;
  a.kind = p.kind == RB_ATTACK_PGD ? net::AttackKind::pgd : net::AttackKind::fgsm;
  a.epsilon = p.epsilon;
  a.pgd_steps = p.pgd_steps;
  a.pgd_step_size = p.pgd_step_size;
  a.clip_min = p.clip_min;
  a.clip_max = p.clip_max;
  return a;
}

svm::SvmConfig to_svm(const rb_svm_params& p) {
  return {p.C, p.tol, p.max_iter, p.seed};
}

DissimMatrix as_dissim(const Matrix& m) {
  return DissimMatrix{m, Metric::normalized_hamming, std::nullopt};
}

void fill_fiedler(const pipeline::FiedlerResult& r, rb_fiedler_result* out) {
  out->layer = r.layer.value_or(0);
  out->k_effective = r.k_effective;
  out->train_accuracy = r.train.accuracy.overall;
  out->eval_accuracy = r.eval.accuracy.overall;
  out->train_lambda2 = r.train.lambda2;
  out->eval_lambda2 = r.eval.lambda2;
}

pipeline::FiedlerOptions to_fiedler(const rb_fiedler_params* p) {
  pipeline::FiedlerOptions o;
  if (p != nullptr) {
    o.k = p->k;
    o.clamp_k = p->clamp_k != 0;
    if (p->out_dir != nullptr) o.out_dir = p->out_dir;
  }
  return o;
}

}  // namespace

extern "C" {

const char* rb_version(void) { return "1.0.0"; }

const char* rb_last_error(void) { return g_last_error.c_str(); }

const char* rb_status_name(rb_status status) {
  switch (status) {
    case RB_E_NULL_ARGUMENT: return "null_argument";
    case RB_E_INTERNAL: return "internal";
    default:
      if (status >= RB_OK && status <= RB_E_METRIC)
        return relubits::status_name(static_cast<Status>(status));
      return "unknown";
  }
}

int rb_exit_code(rb_status status) {
  if (status == RB_E_NULL_ARGUMENT) return 1;
  if (status == RB_E_INTERNAL) return 2;
  return relubits::exit_code(static_cast<Status>(status));
}

// ------------------------------------------------------------------ data

void rb_blobs_params_default(rb_blobs_params* params) {
  if (params == nullptr) return;
  const BlobsConfig c;
  params->classes = static_cast<uint32_t>(c.classes);
  params->dim = static_cast<uint32_t>(c.dim);
  params->samples_per_class = static_cast<uint32_t>(c.samples_per_class);
  params->separation = c.separation;
  params->sigma = c.sigma;
  params->seed = c.seed;
}

rb_status rb_dataset_make_blobs(const rb_blobs_params* params, rb_dataset** out) {
  RB_REQUIRE_ARG(params);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    BlobsConfig c{params->classes, params->dim, params->samples_per_class, params->separation,
                  params->sigma, params->seed};
    *out = wrap<rb_dataset>(make_blobs(c));
  });
}

rb_status rb_dataset_read_csv(const char* path, rb_dataset** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_dataset>(io::read_dataset_csv(path)); });
}

rb_status rb_dataset_write_csv(const rb_dataset* data, const char* path) {
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_dataset_csv(path, data->value); });
}

rb_status rb_dataset_split(const rb_dataset* data, double train_fraction, uint64_t seed,
                           rb_dataset** train, rb_dataset** test) {
  RB_REQUIRE_ARG(data);
  return guarded([&] {
    require(train_fraction > 0.0 && train_fraction < 1.0, Status::parameter,
            "train fraction must lie in (0, 1)");
    const Split s = train_test_split(data->value.size(), train_fraction, seed);
    if (train != nullptr) *train = wrap<rb_dataset>(data->value.subset(s.train));
    if (test != nullptr) *test = wrap<rb_dataset>(data->value.subset(s.test));
  });
}

size_t rb_dataset_rows(const rb_dataset* data) { return data ? data->value.size() : 0; }
size_t rb_dataset_dim(const rb_dataset* data) { return data ? data->value.dim() : 0; }

rb_status rb_dataset_labels(const rb_dataset* data, int32_t* labels, size_t n) {
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(labels);
  return guarded([&] {
    require(n >= data->value.size(), Status::shape, "label buffer too small");
    std::ranges::copy(data->value.labels, labels);
  });
}

void rb_dataset_free(rb_dataset* data) { delete data; }

// --------------------------------------------------------------- network

void rb_train_params_default(rb_train_params* params) {
  if (params == nullptr) return;
  const net::SgdConfig c;
  params->seed = c.seed;
  params->epochs = static_cast<uint32_t>(c.epochs);
  params->learning_rate = c.learning_rate;
  params->batch_size = static_cast<uint32_t>(c.batch_size);
}

rb_status rb_network_train(const rb_dataset* data, const uint32_t* layer_dims, size_t n_dims,
                           const rb_train_params* params, const char* out_dir, rb_network** out,
                           rb_train_summary* summary) {
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(layer_dims);
  RB_REQUIRE_ARG(params);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    const net::SgdConfig c{params->seed, params->epochs, params->learning_rate,
                           params->batch_size};
    const auto dims = to_dims(layer_dims, n_dims);
    auto s = pipeline::run_train(data->value, dims, c,
                                 out_dir ? pipeline::fs::path(out_dir) : pipeline::fs::path());
    if (summary != nullptr) {
      summary->initial_loss = s.log.front().mean_loss;
      summary->final_loss = s.log.back().mean_loss;
      summary->train_accuracy = s.train_accuracy;
    }
    *out = wrap<rb_network>(std::move(s.network));
  });
}

rb_status rb_network_init(const uint32_t* layer_dims, size_t n_dims, uint64_t seed,
                          rb_network** out) {
  RB_REQUIRE_ARG(layer_dims);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    *out = wrap<rb_network>(net::initialize(to_dims(layer_dims, n_dims), seed));
  });
}

rb_status rb_network_read(const char* path, rb_network** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_network>(io::read_network(path)); });
}

rb_status rb_network_write(const rb_network* net, const char* path) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_network(path, net->value); });
}

size_t rb_network_hidden_layers(const rb_network* net) {
  return net ? net->value.hidden_layers() : 0;
}

size_t rb_network_layer_dims(const rb_network* net, uint32_t* dims, size_t n) {
  if (net == nullptr) return 0;
  const auto& d = net->value.layer_dims;
  if (dims != nullptr)
    for (size_t i = 0; i < std::min(n, d.size()); ++i) dims[i] = static_cast<uint32_t>(d[i]);
  return d.size();
}

rb_status rb_network_forward(const rb_network* net, const double* x, size_t n, double* logits,
                             size_t n_logits) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(x);
  RB_REQUIRE_ARG(logits);
  return guarded([&] {
    require(n == net->value.input_dim(), Status::shape, "input has the wrong length");
    require(n_logits >= net->value.num_classes(), Status::shape, "logit buffer too small");
    const auto t = net::forward(net->value, {x, n});
    std::ranges::copy(t.logits, logits);
  });
}

rb_status rb_network_input_gradient(const rb_network* net, const double* x, size_t n,
                                    int32_t label, double* loss, double* grad) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(x);
  return guarded([&] {
    require(n == net->value.input_dim(), Status::shape, "input has the wrong length");
    const auto g = net::loss_and_input_gradient(net->value, {x, n}, label);
    if (loss != nullptr) *loss = g.loss;
    if (grad != nullptr) std::ranges::copy(g.grad, grad);
  });
}

rb_status rb_network_accuracy(const rb_network* net, const rb_dataset* data, double* accuracy) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(accuracy);
  return guarded([&] { *accuracy = net::evaluate(net->value, data->value).accuracy; });
}

void rb_network_free(rb_network* net) { delete net; }

void rb_attack_params_default(rb_attack_params* params) {
  if (params == nullptr) return;
  const net::AttackConfig c;
  params->kind = RB_ATTACK_FGSM;
  params->epsilon = c.epsilon;
  params->pgd_steps = static_cast<uint32_t>(c.pgd_steps);
  params->pgd_step_size = c.pgd_step_size;
  params->clip_from_data = 1;
  params->clip_min = c.clip_min;
  params->clip_max = c.clip_max;
}

rb_status rb_attack_dataset(const rb_network* net, const rb_dataset* data,
                            const rb_attack_params* params, rb_dataset** out) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(params);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    net::AttackConfig cfg = to_attack(*params);
    if (params->clip_from_data != 0) std::tie(cfg.clip_min, cfg.clip_max) = feature_range(data->value);
    cfg.validate();
    const Dataset& d = data->value;
    Dataset adv{Matrix(d.size(), d.dim()), d.labels};
    for (size_t i = 0; i < d.size(); ++i) {
      const auto x = net::attack(net->value, d.features.row(i), d.labels[i], cfg);
      std::ranges::copy(x, adv.features.row(i).begin());
    }
    *out = wrap<rb_dataset>(std::move(adv));
  });
}

// ------------------------------------------------------------ bit vectors

rb_status rb_extract_bits(const rb_network* net, const rb_dataset* data, size_t layer,
                          rb_bitmatrix** out) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    *out = wrap<rb_bitmatrix>(pipeline::extract_bits(net->value, data->value.features, layer));
  });
}

rb_status rb_extract_bits_to_dir(const rb_network* net, const rb_dataset* data, const char* layers,
                                 const char* out_dir, size_t* n_written) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(data);
  RB_REQUIRE_ARG(layers);
  RB_REQUIRE_ARG(out_dir);
  return guarded([&] {
    const auto paths = pipeline::run_extract_bits(net->value, data->value, layers, out_dir);
    if (n_written != nullptr) *n_written = paths.size();
  });
}

rb_status rb_bitmatrix_read(const char* path, rb_bitmatrix** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_bitmatrix>(io::read_bits(path)); });
}

rb_status rb_bitmatrix_write(const rb_bitmatrix* bits, const char* path) {
  RB_REQUIRE_ARG(bits);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_bits(path, bits->value); });
}

size_t rb_bitmatrix_rows(const rb_bitmatrix* bits) { return bits ? bits->value.rows() : 0; }
size_t rb_bitmatrix_bits(const rb_bitmatrix* bits) { return bits ? bits->value.bits() : 0; }

int rb_bitmatrix_get(const rb_bitmatrix* bits, size_t row, size_t bit) {
  if (bits == nullptr || row >= bits->value.rows() || bit >= bits->value.bits()) return -1;
  return bits->value.get(row, bit) ? 1 : 0;
}

rb_status rb_bitmatrix_hamming(const rb_bitmatrix* bits, size_t row_a, size_t row_b,
                               size_t* distance) {
  RB_REQUIRE_ARG(bits);
  RB_REQUIRE_ARG(distance);
  return guarded([&] {
    require(row_a < bits->value.rows() && row_b < bits->value.rows(), Status::index,
            "row index out of range");
    *distance = bitvec::hamming(bits->value.row(row_a), bits->value.row(row_b));
  });
}

rb_status rb_bitmatrix_select_columns(const rb_bitmatrix* bits, const size_t* indices, size_t n,
                                      rb_bitmatrix** out) {
  RB_REQUIRE_ARG(bits);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    const std::span<const size_t> idx =
        indices ? std::span<const size_t>(indices, n) : std::span<const size_t>();
    *out = wrap<rb_bitmatrix>(bitvec::select_columns(bits->value, idx));
  });
}

void rb_bitmatrix_free(rb_bitmatrix* bits) { delete bits; }

// --------------------------------------------------------- dense matrices

rb_status rb_matrix_create(size_t rows, size_t cols, const double* data, rb_matrix** out) {
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    Matrix m(rows, cols);
    if (data != nullptr) std::copy(data, data + rows * cols, m.data().begin());
    *out = wrap<rb_matrix>(std::move(m));
  });
}

rb_status rb_matrix_read_dmx(const char* path, rb_matrix** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(io::read_dmx(path)); });
}

rb_status rb_matrix_write_dmx(const rb_matrix* m, const char* path) {
  RB_REQUIRE_ARG(m);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_dmx(path, m->value); });
}

rb_status rb_matrix_read_csv(const char* path, rb_matrix** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(io::read_matrix_csv(path)); });
}

rb_status rb_matrix_write_csv(const rb_matrix* m, const char* path) {
  RB_REQUIRE_ARG(m);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_matrix_csv(path, m->value); });
}

rb_status rb_matrix_write_pgm(const rb_matrix* m, const char* path) {
  RB_REQUIRE_ARG(m);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_pgm(path, m->value); });
}

size_t rb_matrix_rows(const rb_matrix* m) { return m ? m->value.rows() : 0; }
size_t rb_matrix_cols(const rb_matrix* m) { return m ? m->value.cols() : 0; }
const double* rb_matrix_data(const rb_matrix* m) { return m ? m->value.data().data() : nullptr; }
void rb_matrix_free(rb_matrix* m) { delete m; }

// ------------------------------------------------------------------ RDMs

rb_status rb_rdm_hamming(const rb_bitmatrix* bits, rb_matrix** out) {
  RB_REQUIRE_ARG(bits);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(rdm::rdm_hamming(bits->value).values); });
}

rb_status rb_rdm_cosine(const rb_matrix* embeddings, rb_matrix** out) {
  RB_REQUIRE_ARG(embeddings);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(rdm::rdm_cosine(embeddings->value).values); });
}

rb_status rb_rdm_pearson(const rb_matrix* a, const rb_matrix* b, double* r) {
  RB_REQUIRE_ARG(a);
  RB_REQUIRE_ARG(b);
  RB_REQUIRE_ARG(r);
  return guarded([&] { *r = rdm::pearson_rdm(as_dissim(a->value), as_dissim(b->value)); });
}

rb_status rb_adjacency_from_dissim(const rb_matrix* rdm, rb_matrix** out) {
  RB_REQUIRE_ARG(rdm);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(rdm::adjacency_from_dissim(as_dissim(rdm->value))); });
}

rb_status rb_laplacian(const rb_matrix* adjacency, rb_matrix** out) {
  RB_REQUIRE_ARG(adjacency);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_matrix>(rdm::laplacian(adjacency->value).values); });
}

// -------------------------------------------------------------- spectral

rb_status rb_eig_symmetric(const rb_matrix* m, double* eigenvalues, rb_matrix** eigenvectors) {
  RB_REQUIRE_ARG(m);
  RB_REQUIRE_ARG(eigenvalues);
  return guarded([&] {
    auto e = spectral::eig_symmetric(m->value);
    std::ranges::copy(e.eigenvalues, eigenvalues);
    if (eigenvectors != nullptr) *eigenvectors = wrap<rb_matrix>(std::move(e.eigenvectors));
  });
}

rb_status rb_partition_rdm(const rb_matrix* rdm, uint32_t levels, int32_t* assignment, size_t n,
                           double* lambda2) {
  RB_REQUIRE_ARG(rdm);
  RB_REQUIRE_ARG(assignment);
  return guarded([&] {
    require(n >= rdm->value.rows(), Status::shape, "assignment buffer too small");
    const auto lap = rdm::laplacian(rdm::adjacency_from_dissim(as_dissim(rdm->value)));
    const auto p = levels == 1 ? spectral::fiedler_partition(lap)
                               : spectral::sign_pattern_partition(lap, levels);
    std::ranges::copy(p.assignment, assignment);
    if (lambda2 != nullptr) *lambda2 = p.lambda2;
  });
}

rb_status rb_partition_accuracy(const int32_t* assignment, const int32_t* labels, size_t n,
                                uint32_t n_clusters, double* overall) {
  RB_REQUIRE_ARG(assignment);
  RB_REQUIRE_ARG(labels);
  RB_REQUIRE_ARG(overall);
  return guarded([&] {
    spectral::Partition p;
    p.assignment.assign(assignment, assignment + n);
    p.n_clusters = static_cast<int>(n_clusters);
    *overall = spectral::partition_accuracy(p, std::span<const int>(labels, n)).overall;
  });
}

rb_status rb_write_partition_csv(const int32_t* assignment, size_t n, const char* path) {
  RB_REQUIRE_ARG(assignment);
  RB_REQUIRE_ARG(path);
  return guarded([&] {
    spectral::Partition p;
    p.assignment.assign(assignment, assignment + n);
    io::write_partition_csv(path, p);
  });
}

// ----------------------------------------------------- feature selection

rb_status rb_select_k_best(const rb_bitmatrix* bits, const int32_t* labels, size_t n, size_t k,
                           size_t* selected, double* scores) {
  RB_REQUIRE_ARG(bits);
  RB_REQUIRE_ARG(labels);
  RB_REQUIRE_ARG(selected);
  return guarded([&] {
    const auto f = featsel::select_k_best(bits->value, std::span<const int>(labels, n), k);
    std::ranges::copy(f.selected, selected);
    if (scores != nullptr) std::ranges::copy(f.scores, scores);
  });
}

rb_status rb_write_feature_scores(const double* scores, size_t n, const char* path) {
  RB_REQUIRE_ARG(scores);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_feature_scores(path, {scores, n}); });
}

rb_status rb_write_indices(const size_t* indices, size_t n, const char* path) {
  RB_REQUIRE_ARG(path);
  return guarded([&] {
    io::write_indices(path, indices ? std::span<const size_t>(indices, n)
                                    : std::span<const size_t>());
  });
}

rb_status rb_read_indices(const char* path, size_t* indices, size_t capacity, size_t* count) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(count);
  return guarded([&] {
    const auto v = io::read_indices(path);
    *count = v.size();
    if (indices != nullptr) {
      require(capacity >= v.size(), Status::shape, "index buffer too small");
      std::ranges::copy(v, indices);
    }
  });
}

rb_status rb_read_labels(const char* path, int32_t* labels, size_t capacity, size_t* count) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(count);
  return guarded([&] {
    const auto v = io::read_labels(path);
    *count = v.size();
    if (labels != nullptr) {
      require(capacity >= v.size(), Status::shape, "label buffer too small");
      std::ranges::copy(v, labels);
    }
  });
}

rb_status rb_write_labels(const int32_t* labels, size_t n, const char* path) {
  RB_REQUIRE_ARG(path);
  return guarded([&] {
    io::write_labels(path, labels ? std::span<const int>(labels, n) : std::span<const int>());
  });
}

// ------------------------------------------------------------------- SVM

void rb_svm_params_default(rb_svm_params* params) {
  if (params == nullptr) return;
  const svm::SvmConfig c;
  params->C = c.C;
  params->tol = c.tol;
  params->max_iter = static_cast<uint32_t>(c.max_iter);
  params->seed = c.seed;
}

rb_status rb_svm_train(const rb_matrix* x, const int32_t* y, size_t n,
                       const rb_svm_params* params, rb_svm** out) {
  RB_REQUIRE_ARG(x);
  RB_REQUIRE_ARG(y);
  RB_REQUIRE_ARG(out);
  return guarded([&] {
    rb_svm_params p;
    rb_svm_params_default(&p);
    if (params != nullptr) p = *params;
    *out = wrap<rb_svm>(svm::svm_train(x->value, std::span<const int>(y, n), to_svm(p)));
  });
}

rb_status rb_svm_scores(const rb_svm* model, const rb_matrix* x, double* scores, size_t n) {
  RB_REQUIRE_ARG(model);
  RB_REQUIRE_ARG(x);
  RB_REQUIRE_ARG(scores);
  return guarded([&] {
    require(n >= x->value.rows(), Status::shape, "score buffer too small");
    std::ranges::copy(svm::svm_scores(model->value, x->value), scores);
  });
}

rb_status rb_svm_read(const char* path, rb_svm** out) {
  RB_REQUIRE_ARG(path);
  RB_REQUIRE_ARG(out);
  return guarded([&] { *out = wrap<rb_svm>(io::read_svm(path)); });
}

rb_status rb_svm_write(const rb_svm* model, const char* path) {
  RB_REQUIRE_ARG(model);
  RB_REQUIRE_ARG(path);
  return guarded([&] { io::write_svm(path, model->value); });
}

size_t rb_svm_dim(const rb_svm* model) { return model ? model->value.w.size() : 0; }
void rb_svm_free(rb_svm* model) { delete model; }

rb_status rb_accuracy(const int32_t* predicted, const int32_t* truth, size_t n, double* accuracy) {
  RB_REQUIRE_ARG(predicted);
  RB_REQUIRE_ARG(truth);
  RB_REQUIRE_ARG(accuracy);
  return guarded([&] {
    *accuracy = svm::accuracy(std::span<const int>(predicted, n), std::span<const int>(truth, n));
  });
}

rb_status rb_auroc(const double* scores, const int32_t* truth, size_t n, double* auroc) {
  RB_REQUIRE_ARG(scores);
  RB_REQUIRE_ARG(truth);
  RB_REQUIRE_ARG(auroc);
  return guarded([&] {
    *auroc = svm::auroc(std::span<const double>(scores, n), std::span<const int>(truth, n));
  });
}

// ------------------------------------------------------------- pipelines

rb_status rb_pipeline_fiedler_bits(const rb_bitmatrix* bits_train, const int32_t* labels_train,
                                   const rb_bitmatrix* bits_eval, const int32_t* labels_eval,
                                   const rb_fiedler_params* params, rb_fiedler_result* result) {
  RB_REQUIRE_ARG(bits_train);
  RB_REQUIRE_ARG(labels_train);
  RB_REQUIRE_ARG(bits_eval);
  RB_REQUIRE_ARG(labels_eval);
  RB_REQUIRE_ARG(result);
  return guarded([&] {
    const auto r = pipeline::run_fiedler(
        bits_train->value, std::span<const int>(labels_train, bits_train->value.rows()),
        bits_eval->value, std::span<const int>(labels_eval, bits_eval->value.rows()),
        to_fiedler(params));
    fill_fiedler(r, result);
    if (params != nullptr && params->out_dir != nullptr)
      pipeline::write_fiedler_report(pipeline::fs::path(params->out_dir) / "report.txt",
                                     std::span(&r, 1));
  });
}

rb_status rb_pipeline_fiedler(const rb_network* net, const rb_dataset* train,
                              const rb_dataset* eval, const char* layers,
                              const rb_fiedler_params* params, rb_fiedler_result* results,
                              size_t n, size_t* n_results) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(train);
  RB_REQUIRE_ARG(eval);
  RB_REQUIRE_ARG(layers);
  return guarded([&] {
    const auto rs =
        pipeline::run_fiedler_layers(net->value, train->value, eval->value, layers, to_fiedler(params));
    if (n_results != nullptr) *n_results = rs.size();
    if (results != nullptr)
      for (size_t i = 0; i < std::min(n, rs.size()); ++i) fill_fiedler(rs[i], &results[i]);
    if (params != nullptr && params->out_dir != nullptr)
      pipeline::write_fiedler_report(pipeline::fs::path(params->out_dir) / "report.txt", rs);
  });
}

void rb_adv_params_default(rb_adv_params* params) {
  if (params == nullptr) return;
  const pipeline::AdversarialOptions o;
  rb_attack_params_default(&params->attack);
  params->layer = o.layer;
  params->k = o.k;
  params->clamp_k = o.clamp_k ? 1 : 0;
  params->train_fraction = o.train_fraction;
  params->seed = o.seed;
  rb_svm_params_default(&params->svm);
  params->latent = o.latent ? 1 : 0;
  params->out_dir = nullptr;
}

rb_status rb_pipeline_adversarial(const rb_network* net, const rb_dataset* originals,
                                  const rb_adv_params* params, rb_adv_result* result) {
  RB_REQUIRE_ARG(net);
  RB_REQUIRE_ARG(originals);
  RB_REQUIRE_ARG(params);
  RB_REQUIRE_ARG(result);
  return guarded([&] {
    pipeline::AdversarialOptions o;
    o.attack = to_attack(params->attack);
    o.clip_from_data = params->attack.clip_from_data != 0;
    o.layer = params->layer;
    o.k = params->k;
    o.clamp_k = params->clamp_k != 0;
    o.train_fraction = params->train_fraction;
    o.seed = params->seed;
    o.svm = to_svm(params->svm);
    o.latent = params->latent != 0;
    if (params->out_dir != nullptr) o.out_dir = params->out_dir;
    const auto r = pipeline::run_adversarial(net->value, originals->value, o);
    if (params->out_dir != nullptr)
      pipeline::write_adversarial_report(o.out_dir / "report.txt", r, o);
    *result = rb_adv_result{};
    result->layer = r.layer;
    result->n_train = r.n_train;
    result->n_test = r.n_test;
    result->k_effective = r.k_effective;
    result->max_linf = r.max_linf;
    result->attack_success = r.attack_success;
    result->accuracy = r.accuracy;
    result->auroc = r.auroc;
    result->has_latent = r.latent_accuracy.has_value() ? 1 : 0;
    result->latent_accuracy = r.latent_accuracy.value_or(0.0);
    result->latent_auroc = r.latent_auroc.value_or(0.0);
    result->rdm_pearson = r.rdm_pearson.value_or(0.0);
  });
}

}  // extern "C"
