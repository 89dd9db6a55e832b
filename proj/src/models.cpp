#include "geoqc/models.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "geoqc/errors.hpp"

namespace geoqc {

using nn::Param;

namespace {

void init_all(std::vector<Param*> params, std::uint64_t seed,
              const std::vector<nn::GRULayer*>& grus,
              const std::vector<nn::DenseLayer*>& denses) {
  (void)params;
  Rng rng(seed);
  for (auto* g : grus) g->init(rng);
  for (auto* d : denses) d->init(rng);
}

std::vector<RMat> gather_steps(const std::vector<const std::vector<RVec>*>& samples,
                               int steps, int vec_size) {
  std::vector<RMat> out(steps, RMat(vec_size, static_cast<int>(samples.size())));
  for (int t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < samples.size(); ++b) {
      out[t].col(static_cast<int>(b)) = (*samples[b])[t];
    }
  }
  return out;
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t k = idx.size(); k > 1; --k) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform() * k);
    std::swap(idx[k - 1], idx[j]);
  }
}

}  // namespace

GlobalModel::GlobalModel(const GlobalModelConfig& cfg)
    : cfg_(cfg), head_(cfg.hidden, cfg.vec_size(), nn::Activation::Identity, "head") {
  if (cfg.encoder_layers < 1 || cfg.encoder_layers >= cfg.gru_layers) {
    throw std::invalid_argument("GlobalModel: encoder_layers must split the stack");
  }
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    encoder_.emplace_back(l == 0 ? cfg.vec_size() : cfg.hidden, cfg.hidden,
                          "enc" + std::to_string(l));
  }
  for (int l = 0; l < cfg.gru_layers - cfg.encoder_layers; ++l) {
    decoder_.emplace_back(cfg.hidden, cfg.hidden, "dec" + std::to_string(l));
  }
}

GlobalModel::GlobalModel(const GlobalModelConfig& cfg, std::uint64_t init_seed)
    : GlobalModel(cfg) {
  std::vector<nn::GRULayer*> grus;
  for (auto& g : encoder_) grus.push_back(&g);
  for (auto& g : decoder_) grus.push_back(&g);
  init_all(params(), init_seed, grus, {&head_});
}

std::vector<Param*> GlobalModel::params() {
  std::vector<Param*> out;
  for (auto& g : encoder_) {
    auto p = g.params();
    out.insert(out.end(), p.begin(), p.end());
  }
  for (auto& g : decoder_) {
    auto p = g.params();
    out.insert(out.end(), p.begin(), p.end());
  }
  auto p = head_.params();
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<const Param*> GlobalModel::params() const {
  auto mut = const_cast<GlobalModel*>(this)->params();
  return {mut.begin(), mut.end()};
}

std::vector<RMat> GlobalModel::forward_batch(const std::vector<RMat>& input_steps) {
  std::vector<RMat> seq = input_steps;
  for (auto& layer : encoder_) seq = layer.forward(seq);
  const RMat h_enc = seq.back();

  std::vector<RMat> dec_seq(cfg_.out_steps(), h_enc);  // repeat-vector bridge
  for (auto& layer : decoder_) dec_seq = layer.forward(dec_seq);

  const int batch = static_cast<int>(h_enc.cols());
  RMat h_all(cfg_.hidden, cfg_.out_steps() * batch);
  for (int t = 0; t < cfg_.out_steps(); ++t) {
    h_all.middleCols(t * batch, batch) = dec_seq[t];
  }
  RMat y_all = head_.forward(h_all);
  std::vector<RMat> out(cfg_.out_steps());
  for (int t = 0; t < cfg_.out_steps(); ++t) {
    out[t] = y_all.middleCols(t * batch, batch);
  }
  return out;
}

void GlobalModel::backward_batch(const std::vector<RMat>& dpred) {
  const int batch = static_cast<int>(dpred[0].cols());
  RMat dy_all(cfg_.vec_size(), cfg_.out_steps() * batch);
  for (int t = 0; t < cfg_.out_steps(); ++t) {
    dy_all.middleCols(t * batch, batch) = dpred[t];
  }
  RMat dh_all = head_.backward(dy_all);
  std::vector<RMat> dhs(cfg_.out_steps());
  for (int t = 0; t < cfg_.out_steps(); ++t) {
    dhs[t] = dh_all.middleCols(t * batch, batch);
  }
  for (auto it = decoder_.rbegin(); it != decoder_.rend(); ++it) {
    dhs = it->backward(dhs);
  }
  RMat dh_enc = RMat::Zero(cfg_.hidden, batch);
  for (const auto& d : dhs) dh_enc += d;

  // only the final top-layer hidden state feeds the decoder
  std::vector<RMat> enc_dhs(cfg_.d());
  enc_dhs.back() = dh_enc;
  for (auto it = encoder_.rbegin(); it != encoder_.rend(); ++it) {
    enc_dhs = it->backward(enc_dhs);
  }
}

std::vector<RMat> GlobalModel::infer_batch(const std::vector<RMat>& input_steps) const {
  const int batch = static_cast<int>(input_steps[0].cols());
  std::vector<RMat> seq = input_steps;
  for (const auto& layer : encoder_) {
    RMat h = RMat::Zero(cfg_.hidden, batch);
    for (auto& x : seq) {
      h = layer.step(x, h);
      x = h;
    }
  }
  RMat h_enc = seq.back();
  std::vector<RMat> dec_seq(cfg_.out_steps(), h_enc);
  for (const auto& layer : decoder_) {
    RMat h = RMat::Zero(cfg_.hidden, batch);
    for (auto& x : dec_seq) {
      h = layer.step(x, h);
      x = h;
    }
  }
  for (auto& x : dec_seq) x = head_.forward_nocache(x);
  return dec_seq;
}

std::vector<Mat> GlobalModel::forward(const Mat& u) const {
  if (u.rows() != cfg_.d()) throw std::invalid_argument("GlobalModel::forward: wrong dimension");
  const auto enc = encode_matrix_rows(u);
  std::vector<RMat> steps;
  steps.reserve(enc.timesteps.size());
  for (const auto& v : enc.timesteps) steps.push_back(v);
  const auto pred = infer_batch(steps);
  if (!pred.back().allFinite()) throw NumericError("GlobalModel::forward: non-finite activations");

  std::vector<Mat> segments;
  segments.reserve(cfg_.segments);
  for (int j = 0; j < cfg_.segments; ++j) {
    std::vector<RVec> rows;
    rows.reserve(cfg_.d());
    for (int r = 0; r < cfg_.d(); ++r) {
      rows.push_back(pred[j * cfg_.d() + r].col(0));
    }
    segments.push_back(decode_matrix_rows(rows));
  }
  return segments;
}

LocalModel::LocalModel(const LocalModelConfig& cfg)
    : cfg_(cfg),
      hidden1_(cfg.input_size(), cfg.hidden, nn::Activation::ReLU, "fc1"),
      hidden2_(cfg.hidden, cfg.hidden, nn::Activation::ReLU, "fc2"),
      out_(cfg.hidden, cfg.m, nn::Activation::Identity, "out") {}

LocalModel::LocalModel(const LocalModelConfig& cfg, std::uint64_t init_seed)
    : LocalModel(cfg) {
  init_all(params(), init_seed, {}, {&hidden1_, &hidden2_, &out_});
}

std::vector<Param*> LocalModel::params() {
  std::vector<Param*> out;
  for (auto* layer : {&hidden1_, &hidden2_, &out_}) {
    auto p = layer->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<const Param*> LocalModel::params() const {
  auto mut = const_cast<LocalModel*>(this)->params();
  return {mut.begin(), mut.end()};
}

RMat LocalModel::forward_batch(const RMat& x) {
  return out_.forward(hidden2_.forward(hidden1_.forward(x)));
}

void LocalModel::backward_batch(const RMat& dy) {
  hidden1_.backward(hidden2_.backward(out_.backward(dy)));
}

RMat LocalModel::infer_batch(const RMat& x) const {
  return out_.forward_nocache(hidden2_.forward_nocache(hidden1_.forward_nocache(x)));
}

RVec LocalModel::forward(const Mat& uj) const {
  if (uj.rows() != cfg_.d()) throw std::invalid_argument("LocalModel::forward: wrong dimension");
  return infer_batch(flatten_matrix(uj)).col(0);
}

RVec flatten_matrix(const Mat& m) {
  const auto enc = encode_matrix_rows(m);
  const int step = static_cast<int>(enc.timesteps[0].size());
  RVec flat(step * static_cast<int>(enc.timesteps.size()));
  for (std::size_t r = 0; r < enc.timesteps.size(); ++r) {
    flat.segment(static_cast<int>(r) * step, step) = enc.timesteps[r];
  }
  return flat;
}

void write_report_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "epoch,train_loss,val_loss\n";
  char buf[128];
  for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e + 1,
                  report.train_loss[e], report.val_loss[e]);
    out << buf;
  }
}

TrainReport train_global(GlobalModel& model, const GlobalDataset& train,
                         const GlobalDataset& validation, std::uint64_t seed) {
  if (train.samples.empty() || validation.samples.empty()) {
    throw std::invalid_argument("train_global: empty dataset");
  }
  const auto& cfg = model.config();
  const auto t0 = std::chrono::steady_clock::now();

  // pre-encode every sample once
  auto encode_set = [&](const GlobalDataset& ds,
                        std::vector<std::vector<RVec>>& ins,
                        std::vector<std::vector<RVec>>& tgts) {
    for (const auto& s : ds.samples) {
      ins.push_back(encode_matrix_rows(s.input).timesteps);
      std::vector<RVec> tgt;
      tgt.reserve(cfg.out_steps());
      for (const auto& seg : s.target_segments) {
        auto rows = encode_matrix_rows(seg).timesteps;
        tgt.insert(tgt.end(), rows.begin(), rows.end());
      }
      tgts.push_back(std::move(tgt));
    }
  };
  std::vector<std::vector<RVec>> train_in, train_tgt, val_in, val_tgt;
  encode_set(train, train_in, train_tgt);
  encode_set(validation, val_in, val_tgt);

  auto batch_of = [&](const std::vector<std::vector<RVec>>& enc,
                      const std::vector<int>& idx, std::size_t lo, std::size_t hi,
                      int steps) {
    std::vector<const std::vector<RVec>*> ptrs;
    ptrs.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) ptrs.push_back(&enc[idx[k]]);
    return gather_steps(ptrs, steps, cfg.vec_size());
  };

  auto params = model.params();
  nn::AdamOptimizer opt(cfg.lr);
  Rng rng(seed);
  TrainReport report;
  report.seed = seed;
  report.config = {{"kind", "global"}, {"epochs", cfg.epochs}, {"batch", cfg.batch},
                   {"lr", cfg.lr}, {"hidden", cfg.hidden}, {"gru_layers", cfg.gru_layers},
                   {"encoder_layers", cfg.encoder_layers}, {"clip_norm", cfg.clip_norm}};

  std::vector<int> order(train_in.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> val_order(val_in.size());
  std::iota(val_order.begin(), val_order.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0;
    std::size_t seen = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch);
      auto xs = batch_of(train_in, order, lo, hi, cfg.d());
      auto ts = batch_of(train_tgt, order, lo, hi, cfg.out_steps());
      auto pred = model.forward_batch(xs);
      auto loss = nn::euclidean_loss(pred, ts);
      if (!std::isfinite(loss.value)) {
        throw NumericError("train_global: loss diverged at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss.value * static_cast<double>(hi - lo);
      seen += hi - lo;
      nn::zero_grads(params);
      model.backward_batch(loss.grad);
      nn::clip_gradients(params, cfg.clip_norm);
      opt.step(params);
    }
    report.train_loss.push_back(epoch_loss / static_cast<double>(seen));

    double val_loss = 0;
    for (std::size_t lo = 0; lo < val_order.size(); lo += cfg.batch) {
      const std::size_t hi = std::min(val_order.size(), lo + cfg.batch);
      auto xs = batch_of(val_in, val_order, lo, hi, cfg.d());
      auto ts = batch_of(val_tgt, val_order, lo, hi, cfg.out_steps());
      auto pred = model.infer_batch(xs);
      val_loss += nn::euclidean_loss(pred, ts).value * static_cast<double>(hi - lo);
    }
    val_loss /= static_cast<double>(val_order.size());
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = nn::flatten(params);
      report.best_epoch = epoch + 1;
    }
  }
  if (!best_params.empty()) nn::unflatten(params, best_params);
  report.wall_seconds = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count();
  return report;
}

TrainReport train_local(LocalModel& model, const LocalDataset& train,
                        const LocalDataset& validation, std::uint64_t seed) {
  if (train.samples.empty() || validation.samples.empty()) {
    throw std::invalid_argument("train_local: empty dataset");
  }
  const auto& cfg = model.config();
  const auto t0 = std::chrono::steady_clock::now();

  auto encode_set = [&](const LocalDataset& ds, RMat& x, RMat& y) {
    x.resize(cfg.input_size(), static_cast<int>(ds.samples.size()));
    y.resize(cfg.m, static_cast<int>(ds.samples.size()));
    for (std::size_t k = 0; k < ds.samples.size(); ++k) {
      x.col(static_cast<int>(k)) = flatten_matrix(ds.samples[k].input);
      y.col(static_cast<int>(k)) = ds.samples[k].target_coeffs;
    }
  };
  RMat train_x, train_y, val_x, val_y;
  encode_set(train, train_x, train_y);
  encode_set(validation, val_x, val_y);

  auto params = model.params();
  nn::AdamOptimizer opt(cfg.lr);
  Rng rng(seed);
  TrainReport report;
  report.seed = seed;
  report.config = {{"kind", "local"}, {"epochs", cfg.epochs}, {"batch", cfg.batch},
                   {"lr", cfg.lr}, {"hidden", cfg.hidden}};

  std::vector<int> order(train.samples.size());
  std::iota(order.begin(), order.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch);
      const int bs = static_cast<int>(hi - lo);
      RMat x(cfg.input_size(), bs), y(cfg.m, bs);
      for (int k = 0; k < bs; ++k) {
        x.col(k) = train_x.col(order[lo + k]);
        y.col(k) = train_y.col(order[lo + k]);
      }
      RMat pred = model.forward_batch(x);
      RMat diff = pred - y;
      const double loss = diff.squaredNorm() / bs;
      if (!std::isfinite(loss)) {
        throw NumericError("train_local: loss diverged at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * bs;
      nn::zero_grads(params);
      model.backward_batch(2.0 / bs * diff);
      opt.step(params);
    }
    report.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    RMat val_pred = model.infer_batch(val_x);
    const double val_loss = (val_pred - val_y).squaredNorm() / val_y.cols();
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = nn::flatten(params);
      report.best_epoch = epoch + 1;
    }
  }
  if (!best_params.empty()) nn::unflatten(params, best_params);
  report.wall_seconds = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count();
  return report;
}

LocalEval eval_local(const LocalModel& model, const LocalDataset& ds) {
  if (ds.samples.empty()) throw std::invalid_argument("eval_local: empty dataset");
  const auto& cfg = model.config();
  RMat x(cfg.input_size(), static_cast<int>(ds.samples.size()));
  RMat y(cfg.m, static_cast<int>(ds.samples.size()));
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    x.col(static_cast<int>(k)) = flatten_matrix(ds.samples[k].input);
    y.col(static_cast<int>(k)) = ds.samples[k].target_coeffs;
  }
  RMat diff = model.infer_batch(x) - y;
  LocalEval out;
  out.loss = diff.squaredNorm() / diff.cols();
  out.mean_coeff_error = diff.colwise().norm().mean();
  return out;
}

double eval_global_loss(const GlobalModel& model, const GlobalDataset& ds) {
  if (ds.samples.empty()) throw std::invalid_argument("eval_global_loss: empty dataset");
  const auto& cfg = model.config();
  double total = 0;
  const int batch = cfg.batch;
  for (std::size_t lo = 0; lo < ds.samples.size(); lo += batch) {
    const std::size_t hi = std::min(ds.samples.size(), lo + batch);
    std::vector<std::vector<RVec>> ins, tgts;
    for (std::size_t k = lo; k < hi; ++k) {
      ins.push_back(encode_matrix_rows(ds.samples[k].input).timesteps);
      std::vector<RVec> tgt;
      for (const auto& seg : ds.samples[k].target_segments) {
        auto rows = encode_matrix_rows(seg).timesteps;
        tgt.insert(tgt.end(), rows.begin(), rows.end());
      }
      tgts.push_back(std::move(tgt));
    }
    std::vector<const std::vector<RVec>*> in_ptrs, tgt_ptrs;
    for (const auto& v : ins) in_ptrs.push_back(&v);
    for (const auto& v : tgts) tgt_ptrs.push_back(&v);
    auto xs = gather_steps(in_ptrs, cfg.d(), cfg.vec_size());
    auto ts = gather_steps(tgt_ptrs, cfg.out_steps(), cfg.vec_size());
    total += nn::euclidean_loss(model.infer_batch(xs), ts).value *
             static_cast<double>(hi - lo);
  }
  return total / static_cast<double>(ds.samples.size());
}

namespace {

void write_weights(const nlohmann::json& descriptor,
                   const std::vector<const Param*>& params,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << descriptor.dump() << "\n";
  for (const auto* p : params) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(sizeof(double) * p->value.size()));
  }
}

nlohmann::json read_descriptor(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing model descriptor");
  nlohmann::json d;
  try {
    d = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": bad descriptor: " + e.what());
  }
  if (!d.contains("format_version") || d["format_version"] != 1) {
    throw ParseError(path + ": unsupported model format_version");
  }
  return d;
}

void read_weights(std::ifstream& in, const std::string& path,
                  const std::vector<Param*>& params, long expected_count) {
  long total = 0;
  for (const auto* p : params) total += p->value.size();
  if (expected_count != total) {
    throw ParseError(path + ": param_count does not match architecture");
  }
  for (auto* p : params) {
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(sizeof(double) * p->value.size()));
    if (!in) throw ParseError(path + ": truncated weight payload");
  }
}

long param_count(const std::vector<const Param*>& params) {
  long total = 0;
  for (const auto* p : params) total += p->value.size();
  return total;
}

}  // namespace

void save_model(const GlobalModel& model, const std::string& path) {
  const auto& cfg = model.config();
  nlohmann::json d = {{"format_version", 1}, {"kind", "global"}, {"n", cfg.n},
                      {"segments", cfg.segments}, {"gru_layers", cfg.gru_layers},
                      {"encoder_layers", cfg.encoder_layers}, {"hidden", cfg.hidden},
                      {"param_count", param_count(model.params())}};
  write_weights(d, model.params(), path);
}

void save_model(const LocalModel& model, const std::string& path) {
  const auto& cfg = model.config();
  nlohmann::json d = {{"format_version", 1}, {"kind", "local"}, {"n", cfg.n},
                      {"segments", cfg.segments}, {"m", cfg.m}, {"hidden", cfg.hidden},
                      {"param_count", param_count(model.params())}};
  write_weights(d, model.params(), path);
}

GlobalModel load_global_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model file not found: " + path);
  auto d = read_descriptor(in, path);
  if (d.value("kind", "") != "global") {
    throw ParseError(path + ": model kind is '" + d.value("kind", "") + "', expected 'global'");
  }
  GlobalModelConfig cfg;
  cfg.n = d.at("n");
  cfg.segments = d.at("segments");
  cfg.gru_layers = d.at("gru_layers");
  cfg.encoder_layers = d.at("encoder_layers");
  cfg.hidden = d.at("hidden");
  GlobalModel model(cfg);
  read_weights(in, path, model.params(), d.at("param_count"));
  return model;
}

LocalModel load_local_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model file not found: " + path);
  auto d = read_descriptor(in, path);
  if (d.value("kind", "") != "local") {
    throw ParseError(path + ": model kind is '" + d.value("kind", "") + "', expected 'local'");
  }
  LocalModelConfig cfg;
  cfg.n = d.at("n");
  cfg.segments = d.at("segments");
  cfg.m = d.at("m");
  cfg.hidden = d.at("hidden");
  LocalModel model(cfg);
  read_weights(in, path, model.params(), d.at("param_count"));
  return model;
}

}  // namespace geoqc
