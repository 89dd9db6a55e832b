#pragma once

#include <string>
#include <vector>

#include "geoqc/rng.hpp"
#include "geoqc/su_algebra.hpp"

namespace geoqc::nn {

// One trainable parameter block. Gradients accumulate across backward
// calls until zero_grads().
struct Param {
  RMat value;
  RMat grad;
  std::string name;

  Param() = default;
  Param(int rows, int cols, std::string n)
      : value(RMat::Zero(rows, cols)), grad(RMat::Zero(rows, cols)), name(std::move(n)) {}
};

enum class Activation { Identity, ReLU };

// Column-batched dense layer: x is (in x batch), y is (out x batch).
class DenseLayer {
 public:
  DenseLayer(int in, int out, Activation act, const std::string& name = "dense");

  void init(Rng& rng);  // uniform +-sqrt(6/(fan_in+fan_out)), zero bias

  RMat forward(const RMat& x);                 // caches for backward
  RMat forward_nocache(const RMat& x) const;   // inference
  RMat backward(const RMat& dy);               // returns dx, accumulates grads

  std::vector<Param*> params() { return {&W, &b}; }
  int in_size() const { return static_cast<int>(W.value.cols()); }
  int out_size() const { return static_cast<int>(W.value.rows()); }

  Param W, b;  // b is (out x 1), broadcast over the batch

 private:
  Activation act_;
  RMat x_, pre_;
};

// GRU cell, batched over columns, unrolled over a sequence:
//   z = sigmoid(Wz x + Rz h + bz)
//   r = sigmoid(Wr x + Rr h + br)
//   hc = tanh(Wh x + Rh (r.h) + bh)
//   h' = (1 - z).h + z.hc
class GRULayer {
 public:
  GRULayer(int input, int hidden, const std::string& name = "gru");

  void init(Rng& rng);  // glorot-uniform inputs, QR-orthogonal recurrences

  RMat step(const RMat& x, const RMat& h_prev) const;  // single step, no cache

  // Unrolled forward from h0 = 0. Returns hidden states h_1..h_T.
  std::vector<RMat> forward(const std::vector<RMat>& xs);

  // dhs[t] is dL/dh_t from above (empty matrix means zero). Returns dxs.
  std::vector<RMat> backward(const std::vector<RMat>& dhs);

  std::vector<Param*> params() {
    return {&Wz, &Wr, &Wh, &Rz, &Rr, &Rh, &bz, &br, &bh};
  }
  int input_size() const { return static_cast<int>(Wz.value.cols()); }
  int hidden_size() const { return static_cast<int>(Wz.value.rows()); }

  Param Wz, Wr, Wh, Rz, Rr, Rh, bz, br, bh;

 private:
  // per-step caches from the last forward
  std::vector<RMat> xs_, hs_, zs_, rs_, hcs_;
};

struct SequenceLoss {
  double value = 0;
  std::vector<RMat> grad;  // dL/dpred_t
};

// Mean over timesteps and batch columns of the squared Euclidean distance
// between prediction and target vectors.
SequenceLoss euclidean_loss(const std::vector<RMat>& pred,
                            const std::vector<RMat>& target);

double global_grad_norm(const std::vector<Param*>& params);
// Rescales gradients if their global norm exceeds max_norm; returns the
// pre-clip norm.
double clip_gradients(const std::vector<Param*>& params, double max_norm);
void zero_grads(const std::vector<Param*>& params);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr = 1e-3, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Param*>& params);

  long step_count() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<RMat> m_, v_;
};

// Flat parameter serialization, declaration order.
std::vector<double> flatten(const std::vector<Param*>& params);
void unflatten(const std::vector<Param*>& params, const std::vector<double>& flat);

}  // namespace geoqc::nn
