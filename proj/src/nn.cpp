#include "geoqc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace geoqc::nn {

namespace {

void glorot_uniform(RMat& w, Rng& rng) {
  const double lim = std::sqrt(6.0 / (w.rows() + w.cols()));
  for (int c = 0; c < w.cols(); ++c) {
    for (int r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-lim, lim);
  }
}

// QR of a Gaussian matrix, signs fixed by diag(R) so the result is unique.
void orthogonal_init(RMat& w, Rng& rng) {
  RMat g(w.rows(), w.cols());
  for (int c = 0; c < g.cols(); ++c) {
    for (int r = 0; r < g.rows(); ++r) g(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<RMat> qr(g);
  RMat q = qr.householderQ() * RMat::Identity(g.rows(), g.cols());
  RMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < q.cols(); ++c) {
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  }
  w = q;
}

RMat sigmoid(const RMat& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

}  // namespace

DenseLayer::DenseLayer(int in, int out, Activation act, const std::string& name)
    : W(out, in, name + ".W"), b(out, 1, name + ".b"), act_(act) {}

void DenseLayer::init(Rng& rng) {
  glorot_uniform(W.value, rng);
  b.value.setZero();
}

RMat DenseLayer::forward(const RMat& x) {
  if (x.rows() != in_size()) throw std::invalid_argument(W.name + ": input shape mismatch");
  x_ = x;
  pre_ = (W.value * x).colwise() + Eigen::VectorXd(b.value.col(0));
  if (act_ == Activation::ReLU) return pre_.cwiseMax(0.0);
  return pre_;
}

RMat DenseLayer::forward_nocache(const RMat& x) const {
  if (x.rows() != in_size()) throw std::invalid_argument(W.name + ": input shape mismatch");
  RMat pre = (W.value * x).colwise() + Eigen::VectorXd(b.value.col(0));
  if (act_ == Activation::ReLU) return pre.cwiseMax(0.0);
  return pre;
}

RMat DenseLayer::backward(const RMat& dy) {
  if (dy.rows() != out_size() || dy.cols() != x_.cols()) {
    throw std::invalid_argument(W.name + ": grad shape mismatch");
  }
  RMat dpre = dy;
  if (act_ == Activation::ReLU) {
    dpre = dy.cwiseProduct((pre_.array() > 0.0).cast<double>().matrix());
  }
  W.grad.noalias() += dpre * x_.transpose();
  b.grad.col(0) += dpre.rowwise().sum();
  return W.value.transpose() * dpre;
}

GRULayer::GRULayer(int input, int hidden, const std::string& name)
    : Wz(hidden, input, name + ".Wz"), Wr(hidden, input, name + ".Wr"),
      Wh(hidden, input, name + ".Wh"), Rz(hidden, hidden, name + ".Rz"),
      Rr(hidden, hidden, name + ".Rr"), Rh(hidden, hidden, name + ".Rh"),
      bz(hidden, 1, name + ".bz"), br(hidden, 1, name + ".br"),
      bh(hidden, 1, name + ".bh") {}

void GRULayer::init(Rng& rng) {
  glorot_uniform(Wz.value, rng);
  glorot_uniform(Wr.value, rng);
  glorot_uniform(Wh.value, rng);
  orthogonal_init(Rz.value, rng);
  orthogonal_init(Rr.value, rng);
  orthogonal_init(Rh.value, rng);
  bz.value.setZero();
  br.value.setZero();
  bh.value.setZero();
}

RMat GRULayer::step(const RMat& x, const RMat& h_prev) const {
  RMat z = sigmoid(((Wz.value * x + Rz.value * h_prev).colwise() + Eigen::VectorXd(bz.value.col(0))));
  RMat r = sigmoid(((Wr.value * x + Rr.value * h_prev).colwise() + Eigen::VectorXd(br.value.col(0))));
  RMat hc = ((Wh.value * x + Rh.value * h_prev.cwiseProduct(r)).colwise() +
             Eigen::VectorXd(bh.value.col(0))).array().tanh();
  return (1.0 - z.array()).matrix().cwiseProduct(h_prev) + z.cwiseProduct(hc);
}

std::vector<RMat> GRULayer::forward(const std::vector<RMat>& xs) {
  if (xs.empty()) throw std::invalid_argument("GRULayer: empty sequence");
  const int batch = static_cast<int>(xs[0].cols());
  const int hid = hidden_size();
  xs_ = xs;
  hs_.assign(1, RMat::Zero(hid, batch));  // hs_[0] = h0
  zs_.clear();
  rs_.clear();
  hcs_.clear();

  std::vector<RMat> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    if (x.rows() != input_size()) throw std::invalid_argument("GRULayer: input shape mismatch");
    const RMat& h = hs_.back();
    RMat z = sigmoid(((Wz.value * x + Rz.value * h).colwise() + Eigen::VectorXd(bz.value.col(0))));
    RMat r = sigmoid(((Wr.value * x + Rr.value * h).colwise() + Eigen::VectorXd(br.value.col(0))));
    RMat hc = ((Wh.value * x + Rh.value * h.cwiseProduct(r)).colwise() +
               Eigen::VectorXd(bh.value.col(0))).array().tanh();
    RMat hn = (1.0 - z.array()).matrix().cwiseProduct(h) + z.cwiseProduct(hc);
    zs_.push_back(std::move(z));
    rs_.push_back(std::move(r));
    hcs_.push_back(std::move(hc));
    hs_.push_back(hn);
    out.push_back(std::move(hn));
  }
  return out;
}

std::vector<RMat> GRULayer::backward(const std::vector<RMat>& dhs) {
  const auto T = xs_.size();
  if (dhs.size() != T) throw std::invalid_argument("GRULayer: grad sequence length mismatch");
  const int batch = static_cast<int>(xs_[0].cols());
  const int hid = hidden_size();

  std::vector<RMat> dxs(T);
  RMat dh = RMat::Zero(hid, batch);  // carry into step t from t+1
  for (std::size_t t = T; t-- > 0;) {
    if (dhs[t].size() != 0) dh += dhs[t];
    const RMat& h_prev = hs_[t];
    const RMat& z = zs_[t];
    const RMat& r = rs_[t];
    const RMat& hc = hcs_[t];

    RMat dz = dh.cwiseProduct(hc - h_prev);
    RMat dhc = dh.cwiseProduct(z);
    RMat dh_prev = dh.cwiseProduct((1.0 - z.array()).matrix());

    RMat da_h = dhc.cwiseProduct((1.0 - hc.array().square()).matrix());
    RMat da_z = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));

    RMat drh = Rh.value.transpose() * da_h;       // grad w.r.t. (r . h_prev)
    RMat dr = drh.cwiseProduct(h_prev);
    dh_prev += drh.cwiseProduct(r);
    RMat da_r = dr.cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));

    Wz.grad.noalias() += da_z * xs_[t].transpose();
    Wr.grad.noalias() += da_r * xs_[t].transpose();
    Wh.grad.noalias() += da_h * xs_[t].transpose();
    Rz.grad.noalias() += da_z * h_prev.transpose();
    Rr.grad.noalias() += da_r * h_prev.transpose();
    Rh.grad.noalias() += da_h * h_prev.cwiseProduct(r).transpose();
    bz.grad.col(0) += da_z.rowwise().sum();
    br.grad.col(0) += da_r.rowwise().sum();
    bh.grad.col(0) += da_h.rowwise().sum();

    dxs[t] = Wz.value.transpose() * da_z + Wr.value.transpose() * da_r +
             Wh.value.transpose() * da_h;
    dh_prev += Rz.value.transpose() * da_z + Rr.value.transpose() * da_r;
    dh = std::move(dh_prev);
  }
  return dxs;
}

SequenceLoss euclidean_loss(const std::vector<RMat>& pred,
                            const std::vector<RMat>& target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw std::invalid_argument("euclidean_loss: sequence length mismatch");
  }
  const double scale = 1.0 / (static_cast<double>(pred.size()) * pred[0].cols());
  SequenceLoss out;
  out.grad.reserve(pred.size());
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (pred[t].rows() != target[t].rows() || pred[t].cols() != target[t].cols()) {
      throw std::invalid_argument("euclidean_loss: shape mismatch at timestep " + std::to_string(t));
    }
    RMat diff = pred[t] - target[t];
    out.value += diff.squaredNorm() * scale;
    out.grad.push_back(2.0 * scale * diff);
  }
  return out;
}

double global_grad_norm(const std::vector<Param*>& params) {
  double sq = 0;
  for (const auto* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_gradients(const std::vector<Param*>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0) {
    const double s = max_norm / norm;
    for (auto* p : params) p->grad *= s;
  }
  return norm;
}

void zero_grads(const std::vector<Param*>& params) {
  for (auto* p : params) p->grad.setZero();
}

void AdamOptimizer::step(const std::vector<Param*>& params) {
  if (m_.empty()) {
    for (const auto* p : params) {
      m_.push_back(RMat::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(RMat::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("AdamOptimizer: parameter set changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * p.grad;
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr_ * (m_[k].array() / bc1) /
                       ((v_[k].array() / bc2).sqrt() + eps_);
  }
}

std::vector<double> flatten(const std::vector<Param*>& params) {
  std::vector<double> flat;
  for (const auto* p : params) {
    flat.insert(flat.end(), p->value.data(), p->value.data() + p->value.size());
  }
  return flat;
}

void unflatten(const std::vector<Param*>& params, const std::vector<double>& flat) {
  std::size_t off = 0;
  for (auto* p : params) {
    const std::size_t sz = static_cast<std::size_t>(p->value.size());
    if (off + sz > flat.size()) throw std::invalid_argument("unflatten: flat array too short");
    std::copy(flat.begin() + off, flat.begin() + off + sz, p->value.data());
    off += sz;
  }
  if (off != flat.size()) throw std::invalid_argument("unflatten: flat array size mismatch");
}

}  // namespace geoqc::nn
