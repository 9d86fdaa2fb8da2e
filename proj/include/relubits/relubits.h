/*
 * relubits C API.
 *
 * Every object is an opaque handle owned by the caller and released with
 * the matching *_free function (passing NULL is allowed). Every fallible
 * call returns an rb_status; on failure rb_last_error() describes the
 * problem for the calling thread until its next failing call.
 */
#ifndef RELUBITS_H
#define RELUBITS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RELUBITS_BUILDING)
#    define RB_API __declspec(dllexport)
#  else
#    define RB_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__)
#  define RB_API __attribute__((visibility("default")))
#else
#  define RB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
  RB_OK = 0,
  RB_E_SHAPE = 1,
  RB_E_LABEL = 2,
  RB_E_DATA = 3,
  RB_E_CONFIG = 4,
  RB_E_INDEX = 5,
  RB_E_RANGE = 6,
  RB_E_DEGENERATE = 7,
  RB_E_CONVERGENCE = 8,
  RB_E_MULTIPLICITY = 9,
  RB_E_PARAMETER = 10,
  RB_E_IO = 11,
  RB_E_EVALUATION = 12,
  RB_E_CONTRACT = 13,
  RB_E_METRIC = 14,
  RB_E_NULL_ARGUMENT = 100,
  RB_E_INTERNAL = 101
} rb_status;

typedef struct rb_dataset rb_dataset;     /* labeled real samples */
typedef struct rb_network rb_network;     /* ReLU MLP */
typedef struct rb_bitmatrix rb_bitmatrix; /* packed activation patterns */
typedef struct rb_matrix rb_matrix;       /* dense real matrix */
typedef struct rb_svm rb_svm;             /* linear detector */

RB_API const char* rb_version(void);
RB_API const char* rb_last_error(void);
RB_API const char* rb_status_name(rb_status status);
/* 0 success, 1 usage, 2 data/contract, 3 numerical non-convergence. */
RB_API int rb_exit_code(rb_status status);

/* ---------------------------------------------------------------- data */

typedef struct rb_blobs_params {
  uint32_t classes;
  uint32_t dim;
  uint32_t samples_per_class;
  double separation; /* distance between class means, in sigmas */
  double sigma;
  uint64_t seed;
} rb_blobs_params;

RB_API void rb_blobs_params_default(rb_blobs_params* params);
RB_API rb_status rb_dataset_make_blobs(const rb_blobs_params* params, rb_dataset** out);
RB_API rb_status rb_dataset_read_csv(const char* path, rb_dataset** out);
RB_API rb_status rb_dataset_write_csv(const rb_dataset* data, const char* path);
/* Seeded split; writes the two parts (either output may be NULL). */
RB_API rb_status rb_dataset_split(const rb_dataset* data, double train_fraction, uint64_t seed,
                                  rb_dataset** train, rb_dataset** test);
RB_API size_t rb_dataset_rows(const rb_dataset* data);
RB_API size_t rb_dataset_dim(const rb_dataset* data);
RB_API rb_status rb_dataset_labels(const rb_dataset* data, int32_t* labels, size_t n);
RB_API void rb_dataset_free(rb_dataset* data);

/* ------------------------------------------------------------- network */

typedef struct rb_train_params {
  uint64_t seed;
  uint32_t epochs;
  double learning_rate;
  uint32_t batch_size;
} rb_train_params;

typedef struct rb_train_summary {
  double initial_loss;
  double final_loss;
  double train_accuracy;
} rb_train_summary;

RB_API void rb_train_params_default(rb_train_params* params);
/* Trains and, when out_dir is not NULL, writes weights.mlp and
   train_log.csv there. The returned network is the f32-rounded one that
   the weight file holds. */
RB_API rb_status rb_network_train(const rb_dataset* data, const uint32_t* layer_dims,
                                  size_t n_dims, const rb_train_params* params,
                                  const char* out_dir, rb_network** out,
                                  rb_train_summary* summary);
RB_API rb_status rb_network_init(const uint32_t* layer_dims, size_t n_dims, uint64_t seed,
                                 rb_network** out);
RB_API rb_status rb_network_read(const char* path, rb_network** out);
RB_API rb_status rb_network_write(const rb_network* net, const char* path);
RB_API size_t rb_network_hidden_layers(const rb_network* net);
/* Copies layer widths [input, hidden..., classes] into dims (capacity n). */
RB_API size_t rb_network_layer_dims(const rb_network* net, uint32_t* dims, size_t n);
RB_API rb_status rb_network_forward(const rb_network* net, const double* x, size_t n,
                                    double* logits, size_t n_logits);
RB_API rb_status rb_network_input_gradient(const rb_network* net, const double* x, size_t n,
                                           int32_t label, double* loss, double* grad);
RB_API rb_status rb_network_accuracy(const rb_network* net, const rb_dataset* data,
                                     double* accuracy);
RB_API void rb_network_free(rb_network* net);

typedef enum rb_attack_kind { RB_ATTACK_FGSM = 0, RB_ATTACK_PGD = 1 } rb_attack_kind;

typedef struct rb_attack_params {
  rb_attack_kind kind;
  double epsilon;
  uint32_t pgd_steps;
  double pgd_step_size;
  int clip_from_data; /* nonzero: clip range = min/max of the dataset */
  double clip_min;
  double clip_max;
} rb_attack_params;

RB_API void rb_attack_params_default(rb_attack_params* params);
/* Adversarial twin of every row, labels copied. */
RB_API rb_status rb_attack_dataset(const rb_network* net, const rb_dataset* data,
                                   const rb_attack_params* params, rb_dataset** out);

/* ---------------------------------------------------------- bit vectors */

/* layer is 1-based. */
RB_API rb_status rb_extract_bits(const rb_network* net, const rb_dataset* data, size_t layer,
                                 rb_bitmatrix** out);
/* layers: "all", "last" or a 1-based number. Writes layer<i>.bvm files. */
RB_API rb_status rb_extract_bits_to_dir(const rb_network* net, const rb_dataset* data,
                                        const char* layers, const char* out_dir,
                                        size_t* n_written);
RB_API rb_status rb_bitmatrix_read(const char* path, rb_bitmatrix** out);
RB_API rb_status rb_bitmatrix_write(const rb_bitmatrix* bits, const char* path);
RB_API size_t rb_bitmatrix_rows(const rb_bitmatrix* bits);
RB_API size_t rb_bitmatrix_bits(const rb_bitmatrix* bits);
RB_API int rb_bitmatrix_get(const rb_bitmatrix* bits, size_t row, size_t bit);
RB_API rb_status rb_bitmatrix_hamming(const rb_bitmatrix* bits, size_t row_a, size_t row_b,
                                      size_t* distance);
RB_API rb_status rb_bitmatrix_select_columns(const rb_bitmatrix* bits, const size_t* indices,
                                             size_t n, rb_bitmatrix** out);
RB_API void rb_bitmatrix_free(rb_bitmatrix* bits);

/* -------------------------------------------------------- dense matrices */

RB_API rb_status rb_matrix_create(size_t rows, size_t cols, const double* data, rb_matrix** out);
RB_API rb_status rb_matrix_read_dmx(const char* path, rb_matrix** out);
RB_API rb_status rb_matrix_write_dmx(const rb_matrix* m, const char* path);
RB_API rb_status rb_matrix_read_csv(const char* path, rb_matrix** out);
RB_API rb_status rb_matrix_write_csv(const rb_matrix* m, const char* path);
RB_API rb_status rb_matrix_write_pgm(const rb_matrix* m, const char* path);
RB_API size_t rb_matrix_rows(const rb_matrix* m);
RB_API size_t rb_matrix_cols(const rb_matrix* m);
/* Row-major storage, valid until the handle is freed. */
RB_API const double* rb_matrix_data(const rb_matrix* m);
RB_API void rb_matrix_free(rb_matrix* m);

/* ----------------------------------------------------------------- RDMs */

RB_API rb_status rb_rdm_hamming(const rb_bitmatrix* bits, rb_matrix** out);
RB_API rb_status rb_rdm_cosine(const rb_matrix* embeddings, rb_matrix** out);
RB_API rb_status rb_rdm_pearson(const rb_matrix* a, const rb_matrix* b, double* r);
RB_API rb_status rb_adjacency_from_dissim(const rb_matrix* rdm, rb_matrix** out);
RB_API rb_status rb_laplacian(const rb_matrix* adjacency, rb_matrix** out);

/* ------------------------------------------------------------- spectral */

/* Ascending eigenvalues (n) and eigenvectors as columns of an n x n matrix. */
RB_API rb_status rb_eig_symmetric(const rb_matrix* m, double* eigenvalues,
                                  rb_matrix** eigenvectors);
/* Partitions the similarity graph of a normalized dissimilarity matrix into
   2^levels clusters. assignment has one entry per row; lambda2 may be NULL. */
RB_API rb_status rb_partition_rdm(const rb_matrix* rdm, uint32_t levels, int32_t* assignment,
                                  size_t n, double* lambda2);
RB_API rb_status rb_partition_accuracy(const int32_t* assignment, const int32_t* labels,
                                       size_t n, uint32_t n_clusters, double* overall);
RB_API rb_status rb_write_partition_csv(const int32_t* assignment, size_t n, const char* path);

/* ------------------------------------------------------ feature selection */

/* selected receives k indices; scores (may be NULL) receives n_bits values. */
RB_API rb_status rb_select_k_best(const rb_bitmatrix* bits, const int32_t* labels, size_t n,
                                  size_t k, size_t* selected, double* scores);
RB_API rb_status rb_write_feature_scores(const double* scores, size_t n, const char* path);
RB_API rb_status rb_write_indices(const size_t* indices, size_t n, const char* path);
/* Reads an index list; call with indices = NULL to get the count. */
RB_API rb_status rb_read_indices(const char* path, size_t* indices, size_t capacity,
                                 size_t* count);
RB_API rb_status rb_read_labels(const char* path, int32_t* labels, size_t capacity,
                                size_t* count);
RB_API rb_status rb_write_labels(const int32_t* labels, size_t n, const char* path);

/* ------------------------------------------------------------------ SVM */

typedef struct rb_svm_params {
  double C;
  double tol;
  uint32_t max_iter;
  uint64_t seed;
} rb_svm_params;

RB_API void rb_svm_params_default(rb_svm_params* params);
/* y holds -1 / +1. */
RB_API rb_status rb_svm_train(const rb_matrix* x, const int32_t* y, size_t n,
                              const rb_svm_params* params, rb_svm** out);
RB_API rb_status rb_svm_scores(const rb_svm* model, const rb_matrix* x, double* scores,
                               size_t n);
RB_API rb_status rb_svm_read(const char* path, rb_svm** out);
RB_API rb_status rb_svm_write(const rb_svm* model, const char* path);
RB_API size_t rb_svm_dim(const rb_svm* model);
RB_API void rb_svm_free(rb_svm* model);
RB_API rb_status rb_accuracy(const int32_t* predicted, const int32_t* truth, size_t n,
                             double* accuracy);
RB_API rb_status rb_auroc(const double* scores, const int32_t* truth, size_t n, double* auroc);

/* ------------------------------------------------------------ pipelines */

typedef struct rb_fiedler_params {
  size_t k;
  int clamp_k;         /* nonzero: use min(k, n_bits) instead of failing */
  const char* out_dir; /* artifacts + report.txt; may be NULL */
} rb_fiedler_params;

typedef struct rb_fiedler_result {
  size_t layer; /* 0 when run on raw bit matrices */
  size_t k_effective;
  double train_accuracy;
  double eval_accuracy;
  double train_lambda2;
  double eval_lambda2;
} rb_fiedler_result;

/* Selection on the training bits, then partition + accuracy per split. */
RB_API rb_status rb_pipeline_fiedler_bits(const rb_bitmatrix* bits_train,
                                          const int32_t* labels_train,
                                          const rb_bitmatrix* bits_eval,
                                          const int32_t* labels_eval,
                                          const rb_fiedler_params* params,
                                          rb_fiedler_result* result);
/* Per hidden layer ("all", "last" or a number); results has capacity n. */
RB_API rb_status rb_pipeline_fiedler(const rb_network* net, const rb_dataset* train,
                                     const rb_dataset* eval, const char* layers,
                                     const rb_fiedler_params* params, rb_fiedler_result* results,
                                     size_t n, size_t* n_results);

typedef struct rb_adv_params {
  rb_attack_params attack;
  size_t layer; /* 0 = last hidden layer */
  size_t k;
  int clamp_k;
  double train_fraction;
  uint64_t seed;
  rb_svm_params svm;
  int latent; /* nonzero: latent SVM, cosine RDM and RDM correlation too */
  const char* out_dir;
} rb_adv_params;

typedef struct rb_adv_result {
  size_t layer;
  size_t n_train;
  size_t n_test;
  size_t k_effective;
  double max_linf;
  double attack_success;
  double accuracy;
  double auroc;
  int has_latent;
  double latent_accuracy;
  double latent_auroc;
  double rdm_pearson;
} rb_adv_result;

RB_API void rb_adv_params_default(rb_adv_params* params);
RB_API rb_status rb_pipeline_adversarial(const rb_network* net, const rb_dataset* originals,
                                         const rb_adv_params* params, rb_adv_result* result);

#ifdef __cplusplus
}
#endif

#endif /* RELUBITS_H */
