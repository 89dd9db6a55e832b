#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoqc/dataset.hpp"
#include "geoqc/nn.hpp"

namespace geoqc {

// Sequence model for U -> (U_1 ... U_N): encoder GRU stack over the 8 row
// timesteps, final top hidden state repeated d*N times, decoder GRU stack,
// per-timestep linear head back to row vectors.
struct GlobalModelConfig {
  int n = 3;
  int segments = 10;      // N
  int gru_layers = 10;    // encoder + decoder stacks combined
  int encoder_layers = 5; // split point of the stack
  int hidden = 64;
  int epochs = 1500;
  int batch = 32;
  double lr = 1e-3;
  double clip_norm = 5.0;

  int d() const { return 1 << n; }
  int vec_size() const { return 2 * d(); }       // row encoding length
  int out_steps() const { return d() * segments; }
};

struct LocalModelConfig {
  int n = 3;
  int segments = 10;  // N, recorded for the coefficient scale 1/N
  int m = 36;         // dim(Delta)
  int hidden = 2000;
  int epochs = 500;
  int batch = 32;
  double lr = 1e-3;

  int d() const { return 1 << n; }
  int input_size() const { return 2 * d() * d(); }
};

class GlobalModel {
 public:
  explicit GlobalModel(const GlobalModelConfig& cfg);
  GlobalModel(const GlobalModelConfig& cfg, std::uint64_t init_seed);

  // Single-sample inference; returns N predicted segment matrices.
  std::vector<Mat> forward(const Mat& u) const;

  // Batched training path. Timestep matrices are (vec_size x batch).
  std::vector<RMat> forward_batch(const std::vector<RMat>& input_steps);
  void backward_batch(const std::vector<RMat>& dpred);
  std::vector<RMat> infer_batch(const std::vector<RMat>& input_steps) const;

  std::vector<nn::Param*> params();
  std::vector<const nn::Param*> params() const;
  const GlobalModelConfig& config() const { return cfg_; }

 private:
  GlobalModelConfig cfg_;
  std::vector<nn::GRULayer> encoder_, decoder_;
  nn::DenseLayer head_;
};

class LocalModel {
 public:
  explicit LocalModel(const LocalModelConfig& cfg);
  LocalModel(const LocalModelConfig& cfg, std::uint64_t init_seed);

  RVec forward(const Mat& uj) const;  // single-sample inference

  RMat forward_batch(const RMat& x);  // x is (input_size x batch)
  void backward_batch(const RMat& dy);
  RMat infer_batch(const RMat& x) const;

  std::vector<nn::Param*> params();
  std::vector<const nn::Param*> params() const;
  const LocalModelConfig& config() const { return cfg_; }

 private:
  LocalModelConfig cfg_;
  nn::DenseLayer hidden1_, hidden2_, out_;
};

// Flattened row encoding of a matrix, length 2*d*d (inputs of LocalModel).
RVec flatten_matrix(const Mat& m);

struct TrainReport {
  std::vector<double> train_loss;  // one entry per epoch
  std::vector<double> val_loss;
  int best_epoch = -1;             // epoch of the retained checkpoint
  double wall_seconds = 0;
  std::uint64_t seed = 0;
  nlohmann::json config;
};

void write_report_csv(const TrainReport& report, const std::string& path);

// Deterministic given seed. The model is left holding the best-validation
// checkpoint. Throws NumericError naming the epoch if the loss diverges.
TrainReport train_global(GlobalModel& model, const GlobalDataset& train,
                         const GlobalDataset& validation, std::uint64_t seed);
TrainReport train_local(LocalModel& model, const LocalDataset& train,
                        const LocalDataset& validation, std::uint64_t seed);

struct LocalEval {
  double loss = 0;              // mean squared coefficient distance
  double mean_coeff_error = 0;  // mean Euclidean distance ||pred - true||
};
LocalEval eval_local(const LocalModel& model, const LocalDataset& ds);
double eval_global_loss(const GlobalModel& model, const GlobalDataset& ds);

// Weight files: one-line JSON descriptor, then raw little-endian doubles in
// parameter declaration order.
void save_model(const GlobalModel& model, const std::string& path);
void save_model(const LocalModel& model, const std::string& path);
GlobalModel load_global_model(const std::string& path);
LocalModel load_local_model(const std::string& path);

}  // namespace geoqc
