// geoqc: compile 3-qubit special unitaries into gate circuits via
// geodesic-trained decomposition networks.
//
// Subcommands: gen-data, train, compile, eval, emit-circuit.
// Exit codes: 0 success, 1 usage/config, 2 data error, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "geoqc/errors.hpp"
#include "geoqc/matrix_json.hpp"
#include "geoqc/models.hpp"
#include "geoqc/pipeline.hpp"

using namespace geoqc;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// All recognized config-file keys; anything else is rejected up front.
const std::vector<std::string> kConfigKeys = {
    "n", "segments", "norm_bound", "count", "validation_count", "seed",
    "epochs", "batch", "lr", "hidden", "gru_layers", "encoder_layers",
    "clip_norm", "threads"};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ParseError(path + ": config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw std::invalid_argument("unknown config key '" + key + "' in " + path);
    }
  }
  return cfg;
}

// flag wins over config file, config file over default
template <typename T>
void apply(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return matrix_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

int threads_setting(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("GEOQC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

struct CommonOpts {
  std::string config_path;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--config", common.config_path, "JSON config file (flags override it)");
  cmd->add_option("--threads", common.threads, "worker thread cap (env GEOQC_THREADS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoqc: geodesic-trained quantum circuit compiler"};
  app.require_subcommand(1);

  CommonOpts common;

  // ---- gen-data ----
  auto* gen = app.add_subcommand("gen-data", "generate a training dataset");
  std::string gen_kind, gen_out;
  int gen_count = 5000, gen_n = 3, gen_segments = 10;
  double gen_bound = 36.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("kind", gen_kind, "global|local")->required()
      ->check(CLI::IsMember({"global", "local"}));
  auto* gen_count_opt = gen->add_option("--count", gen_count, "sample count");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output dataset path")->required();
  auto* gen_n_opt = gen->add_option("--n", gen_n, "qubit count");
  auto* gen_seg_opt = gen->add_option("--segments", gen_segments, "segment count N");
  auto* gen_bound_opt = gen->add_option("--norm-bound", gen_bound, "costate norm bound");
  add_common(gen, common);

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a decomposition network");
  std::string train_kind, train_data, train_model_out, train_csv_out;
  int train_epochs = -1, train_val_count = 500, train_batch = 32;
  int train_hidden = -1, train_gru_layers = 10, train_enc_layers = 5;
  double train_lr = 1e-3, train_clip = 5.0;
  std::uint64_t train_seed = 1;
  train->add_option("kind", train_kind, "global|local")->required()
      ->check(CLI::IsMember({"global", "local"}));
  train->add_option("--data", train_data, "dataset path")->required();
  auto* tr_epochs = train->add_option("--epochs", train_epochs, "training epochs");
  auto* tr_val = train->add_option("--validation-count", train_val_count, "held-out tail size");
  auto* tr_batch = train->add_option("--batch", train_batch, "batch size");
  auto* tr_hidden = train->add_option("--hidden", train_hidden, "hidden width");
  auto* tr_gru = train->add_option("--gru-layers", train_gru_layers, "total GRU layers (global)");
  auto* tr_enc = train->add_option("--encoder-layers", train_enc_layers, "encoder split (global)");
  auto* tr_lr = train->add_option("--lr", train_lr, "learning rate");
  auto* tr_clip = train->add_option("--clip-norm", train_clip, "gradient clip norm (global)");
  auto* tr_seed = train->add_option("--seed", train_seed, "RNG seed");
  train->add_option("--out-model", train_model_out, "model output path")->required();
  train->add_option("--out-csv", train_csv_out, "loss-curve CSV output path");
  add_common(train, common);

  // ---- compile ----
  auto* comp = app.add_subcommand("compile", "compile a unitary into a circuit");
  std::string comp_input, comp_global, comp_local, comp_out, comp_circuit_out;
  bool comp_refine = false, comp_no_project = false;
  int comp_refine_iters = 500;
  comp->add_option("--input", comp_input, "matrix JSON file with U")->required();
  comp->add_option("--global-model", comp_global, "global model path")->required();
  comp->add_option("--local-model", comp_local, "local model path")->required();
  comp->add_flag("--refine", comp_refine, "run numerical refinement");
  comp->add_flag("--no-project", comp_no_project, "skip polar projection of segments");
  comp->add_option("--refine-iters", comp_refine_iters, "refinement iteration cap");
  comp->add_option("--out", comp_out, "CompileResult JSON output path");
  comp->add_option("--circuit-out", comp_circuit_out, "circuit text output path");
  add_common(comp, common);

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string ev_kind, ev_model, ev_data, ev_out;
  ev->add_option("kind", ev_kind, "global|local")->required()
      ->check(CLI::IsMember({"global", "local"}));
  ev->add_option("--model", ev_model, "model path")->required();
  ev->add_option("--data", ev_data, "dataset path")->required();
  ev->add_option("--out", ev_out, "metrics JSON output path");
  add_common(ev, common);

  // ---- emit-circuit ----
  auto* emit = app.add_subcommand("emit-circuit", "coefficient file -> circuit text");
  std::string emit_coeffs, emit_out;
  emit->add_option("--coeffs", emit_coeffs, "JSON file: array (m) or array of arrays (N x m)")
      ->required();
  emit->add_option("--out", emit_out, "circuit text output path");
  add_common(emit, common);

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg;
    if (!common.config_path.empty()) cfg = load_config(common.config_path);
    const int threads = threads_setting(common.threads);
    if (threads > 0) Eigen::setNbThreads(threads);

    if (gen->parsed()) {
      apply(cfg, "count", gen_count_opt, gen_count);
      apply(cfg, "seed", gen_seed_opt, gen_seed);
      apply(cfg, "n", gen_n_opt, gen_n);
      apply(cfg, "segments", gen_seg_opt, gen_segments);
      apply(cfg, "norm_bound", gen_bound_opt, gen_bound);
      if (gen_count < 1) throw std::invalid_argument("--count must be >= 1");

      if (gen_kind == "global") {
        GeodesicConfig gc{gen_n, gen_segments, gen_bound};
        auto ds = gen_global_dataset(gen_count, gc, gen_seed);
        save_dataset(ds, gen_out);
        double mean_u0 = 0;
        for (const auto& s : ds.samples) mean_u0 += s.u0_norm;
        mean_u0 /= static_cast<double>(ds.samples.size());
        std::cout << "wrote " << ds.samples.size() << " global samples to " << gen_out
                  << " (mean ||u0|| = " << mean_u0 << ")\n";
      } else {
        const auto basis = horizontal_basis(gen_n);
        auto ds = gen_local_dataset(gen_count, gen_segments, gen_seed, basis);
        save_dataset(ds, gen_out);
        std::cout << "wrote " << ds.samples.size() << " local samples to " << gen_out << "\n";
      }
      return 0;
    }

    if (train->parsed()) {
      apply(cfg, "epochs", tr_epochs, train_epochs);
      apply(cfg, "validation_count", tr_val, train_val_count);
      apply(cfg, "batch", tr_batch, train_batch);
      apply(cfg, "hidden", tr_hidden, train_hidden);
      apply(cfg, "gru_layers", tr_gru, train_gru_layers);
      apply(cfg, "encoder_layers", tr_enc, train_enc_layers);
      apply(cfg, "lr", tr_lr, train_lr);
      apply(cfg, "clip_norm", tr_clip, train_clip);
      apply(cfg, "seed", tr_seed, train_seed);

      TrainReport report;
      if (train_kind == "global") {
        auto ds = load_global_dataset(train_data);
        if (ds.samples.empty()) throw std::runtime_error("dataset is empty: " + train_data);
        auto [tr, val] = split(ds, train_val_count);
        GlobalModelConfig mc;
        mc.n = ds.n;
        mc.segments = ds.segments;
        if (train_hidden > 0) mc.hidden = train_hidden;
        if (train_epochs > 0) mc.epochs = train_epochs;
        mc.batch = train_batch;
        mc.lr = train_lr;
        mc.clip_norm = train_clip;
        mc.gru_layers = train_gru_layers;
        mc.encoder_layers = train_enc_layers;
        GlobalModel model(mc, train_seed);
        report = train_global(model, tr, val, train_seed);
        save_model(model, train_model_out);
      } else {
        auto ds = load_local_dataset(train_data);
        if (ds.samples.empty()) throw std::runtime_error("dataset is empty: " + train_data);
        auto [tr, val] = split(ds, train_val_count);
        LocalModelConfig mc;
        mc.n = ds.n;
        mc.segments = ds.segments;
        mc.m = ds.m;
        if (train_hidden > 0) mc.hidden = train_hidden;
        if (train_epochs > 0) mc.epochs = train_epochs;
        mc.batch = train_batch;
        mc.lr = train_lr;
        LocalModel model(mc, train_seed);
        report = train_local(model, tr, val, train_seed);
        save_model(model, train_model_out);
      }
      if (!train_csv_out.empty()) write_report_csv(report, train_csv_out);
      std::cout << "final train loss " << report.train_loss.back() << ", val loss "
                << report.val_loss.back() << " (best epoch " << report.best_epoch
                << ", " << report.wall_seconds << " s)\n";
      return 0;
    }

    if (comp->parsed()) {
      Mat u = read_matrix_file(comp_input);
      GlobalModel gm = load_global_model(comp_global);
      LocalModel lm = load_local_model(comp_local);
      const auto basis = horizontal_basis(gm.config().n);
      CompileOptions opts;
      opts.refine = comp_refine;
      opts.project_segments = !comp_no_project;
      opts.refine_max_iters = comp_refine_iters;
      CompileResult result;
      try {
        result = compile(u, gm, lm, basis, opts);
      } catch (const std::invalid_argument& e) {
        // invalid input matrix is bad data, not a usage problem
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
      }
      if (!comp_out.empty()) write_text(comp_out, compile_result_to_json(result).dump(2) + "\n");
      if (!comp_circuit_out.empty()) write_text(comp_circuit_out, emit_circuit_text(result.circuit));
      std::cout << "fidelity " << result.fidelity_value << ", frobenius error "
                << result.frobenius_error << ", " << result.circuit.gates.size()
                << " gates\n";
      return 0;
    }

    if (ev->parsed()) {
      json metrics;
      if (ev_kind == "local") {
        auto ds = load_local_dataset(ev_data);
        if (ds.samples.empty()) throw std::runtime_error("dataset is empty: " + ev_data);
        LocalModel model = load_local_model(ev_model);
        auto r = eval_local(model, ds);
        metrics = {{"kind", "local"}, {"samples", ds.samples.size()},
                   {"loss", r.loss}, {"mean_coeff_error", r.mean_coeff_error}};
        std::cout << "loss " << r.loss << ", mean coefficient error "
                  << r.mean_coeff_error << "\n";
      } else {
        auto ds = load_global_dataset(ev_data);
        if (ds.samples.empty()) throw std::runtime_error("dataset is empty: " + ev_data);
        GlobalModel model = load_global_model(ev_model);
        const double loss = eval_global_loss(model, ds);
        metrics = {{"kind", "global"}, {"samples", ds.samples.size()}, {"loss", loss}};
        std::cout << "loss " << loss << "\n";
      }
      if (!ev_out.empty()) write_text(ev_out, metrics.dump(2) + "\n");
      return 0;
    }

    if (emit->parsed()) {
      std::ifstream in(emit_coeffs);
      if (!in) throw std::runtime_error("cannot open coefficient file: " + emit_coeffs);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw ParseError(emit_coeffs + ": " + e.what());
      }
      const auto basis = horizontal_basis(3);
      Circuit circuit;
      circuit.n_qubits = basis.n;
      auto append_row = [&](const json& row) {
        RVec c(row.size());
        for (std::size_t a = 0; a < row.size(); ++a) c[static_cast<int>(a)] = row[a].get<double>();
        Circuit term = synthesize_coefficients(c, basis);
        circuit.gates.insert(circuit.gates.end(), term.gates.begin(), term.gates.end());
      };
      if (!j.is_array() || j.empty()) throw ParseError(emit_coeffs + ": expected a nonempty array");
      if (j[0].is_array()) {
        for (const auto& row : j) append_row(row);
      } else {
        append_row(j);
      }
      const std::string text = emit_circuit_text(circuit);
      if (!emit_out.empty()) {
        write_text(emit_out, text);
      } else {
        std::cout << text;
      }
      return 0;
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
