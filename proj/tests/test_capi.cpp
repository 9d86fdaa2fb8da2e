#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "relubits/relubits.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("relubits_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("status codes map to exit codes") {
  CHECK(rb_exit_code(RB_OK) == 0);
  CHECK(rb_exit_code(RB_E_PARAMETER) == 1);
  CHECK(rb_exit_code(RB_E_CONFIG) == 1);
  CHECK(rb_exit_code(RB_E_CONVERGENCE) == 3);
  CHECK(rb_exit_code(RB_E_SHAPE) == 2);
  CHECK(rb_exit_code(RB_E_IO) == 2);
  CHECK(rb_exit_code(RB_E_MULTIPLICITY) == 2);
  CHECK(std::string(rb_status_name(RB_E_MULTIPLICITY)).size() > 0);
}

TEST_CASE("null arguments and missing files") {
  rb_network* net = nullptr;
  CHECK(rb_network_read(nullptr, &net) == RB_E_NULL_ARGUMENT);
  CHECK(rb_network_read("/nonexistent/weights.mlp", &net) == RB_E_IO);
  CHECK(net == nullptr);
  CHECK(std::string(rb_last_error()).find("weights.mlp") != std::string::npos);
  rb_network_free(nullptr);
}

TEST_CASE("end to end through the C API") {
  const auto dir = fresh_dir("e2e");
  rb_blobs_params bp;
  rb_blobs_params_default(&bp);
  bp.seed = 3;
  bp.samples_per_class = 60;
  rb_dataset* data = nullptr;
  REQUIRE(rb_dataset_make_blobs(&bp, &data) == RB_OK);
  CHECK(rb_dataset_rows(data) == 120);
  CHECK(rb_dataset_dim(data) == 16);

  rb_dataset *train = nullptr, *eval = nullptr;
  REQUIRE(rb_dataset_split(data, 0.75, 3, &train, &eval) == RB_OK);
  CHECK(rb_dataset_rows(train) == 90);

  const uint32_t dims[] = {16, 32, 16, 2};
  rb_train_params tp;
  rb_train_params_default(&tp);
  tp.seed = 3;
  rb_network* net = nullptr;
  rb_train_summary summary{};
  REQUIRE(rb_network_train(train, dims, 4, &tp, dir.c_str(), &net, &summary) == RB_OK);
  CHECK(summary.final_loss < summary.initial_loss);
  CHECK(fs::exists(dir / "weights.mlp"));
  CHECK(rb_network_hidden_layers(net) == 2);

  rb_network* back = nullptr;
  REQUIRE(rb_network_read((dir / "weights.mlp").c_str(), &back) == RB_OK);
  std::vector<double> x(16, 0.3), za(2), zb(2);
  CHECK(rb_network_forward(net, x.data(), x.size(), za.data(), 2) == RB_OK);
  CHECK(rb_network_forward(back, x.data(), x.size(), zb.data(), 2) == RB_OK);
  CHECK(za == zb);
  CHECK(rb_network_forward(net, x.data(), 3, za.data(), 2) == RB_E_SHAPE);

  rb_bitmatrix* bits = nullptr;
  REQUIRE(rb_extract_bits(net, eval, 2, &bits) == RB_OK);
  CHECK(rb_bitmatrix_rows(bits) == 30);
  CHECK(rb_bitmatrix_bits(bits) == 16);
  CHECK(rb_extract_bits(net, eval, 3, &bits) == RB_E_PARAMETER);

  rb_matrix* rdm = nullptr;
  REQUIRE(rb_rdm_hamming(bits, &rdm) == RB_OK);
  CHECK(rb_matrix_rows(rdm) == 30);

  std::vector<int32_t> labels(30);
  REQUIRE(rb_dataset_labels(eval, labels.data(), labels.size()) == RB_OK);
  std::vector<size_t> selected(8);
  std::vector<double> scores(16);
  REQUIRE(rb_select_k_best(bits, labels.data(), 30, 8, selected.data(), scores.data()) == RB_OK);
  CHECK(rb_select_k_best(bits, labels.data(), 30, 17, selected.data(), nullptr) == RB_E_PARAMETER);

  rb_fiedler_params fp{64, 1, nullptr};
  std::vector<rb_fiedler_result> fr(2);
  size_t n = 0;
  REQUIRE(rb_pipeline_fiedler(net, train, eval, "all", &fp, fr.data(), fr.size(), &n) == RB_OK);
  CHECK(n == 2);
  CHECK(fr[1].layer == 2);
  CHECK(fr[1].k_effective == 16);
  fp.clamp_k = 0;
  CHECK(rb_pipeline_fiedler(net, train, eval, "all", &fp, fr.data(), fr.size(), &n) ==
        RB_E_PARAMETER);

  rb_adv_params ap;
  rb_adv_params_default(&ap);
  ap.attack.epsilon = 0.5;
  ap.k = 16;
  ap.latent = 1;
  ap.out_dir = dir.c_str();
  rb_adv_result ar{};
  REQUIRE(rb_pipeline_adversarial(net, data, &ap, &ar) == RB_OK);
  CHECK(ar.has_latent == 1);
  CHECK(ar.max_linf <= 0.5 + 1e-12);
  CHECK(fs::exists(dir / "detector.svm"));
  CHECK(fs::exists(dir / "report.txt"));

  rb_svm* model = nullptr;
  REQUIRE(rb_svm_read((dir / "detector.svm").c_str(), &model) == RB_OK);
  CHECK(rb_svm_dim(model) == 32);

  rb_svm_free(model);
  rb_matrix_free(rdm);
  rb_bitmatrix_free(bits);
  rb_network_free(back);
  rb_network_free(net);
  rb_dataset_free(train);
  rb_dataset_free(eval);
  rb_dataset_free(data);
}

TEST_CASE("spectral helpers through the C API") {
  const double p3[] = {1, -1, 0, -1, 2, -1, 0, -1, 1};
  rb_matrix* m = nullptr;
  REQUIRE(rb_matrix_create(3, 3, p3, &m) == RB_OK);
  double ev[3];
  rb_matrix* vecs = nullptr;
  REQUIRE(rb_eig_symmetric(m, ev, &vecs) == RB_OK);
  CHECK(ev[1] == doctest::Approx(1.0));
  CHECK(rb_matrix_cols(vecs) == 3);
  rb_matrix_free(vecs);
  rb_matrix_free(m);

  const double rdm[] = {0, 0.1, 0.9, 0.9, 0.1, 0, 0.9, 0.9, 0.9, 0.9, 0, 0.1, 0.9, 0.9, 0.1, 0};
  REQUIRE(rb_matrix_create(4, 4, rdm, &m) == RB_OK);
  int32_t assignment[4];
  double lambda2 = 0;
  REQUIRE(rb_partition_rdm(m, 1, assignment, 4, &lambda2) == RB_OK);
  CHECK(assignment[0] == assignment[1]);
  CHECK(assignment[2] == assignment[3]);
  CHECK(assignment[0] != assignment[2]);
  const int32_t labels[] = {0, 0, 1, 1};
  double acc = 0;
  CHECK(rb_partition_accuracy(assignment, labels, 4, 2, &acc) == RB_OK);
  CHECK(acc == 1.0);
  rb_matrix_free(m);

  const double scores[] = {0.9, 0.3, 0.5, 0.1};
  const int32_t truth[] = {1, 1, -1, -1};
  double auc = 0;
  CHECK(rb_auroc(scores, truth, 4, &auc) == RB_OK);
  CHECK(auc == 0.75);
  const int32_t one_class[] = {1, 1, 1, 1};
  CHECK(rb_auroc(scores, one_class, 4, &auc) == RB_E_METRIC);
}
