#include "geoqc/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "geoqc/errors.hpp"
#include "geoqc/matrix_json.hpp"
#include "geoqc/rng.hpp"

namespace geoqc {

using nlohmann::json;

EncodedSequence encode_matrix_rows(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  EncodedSequence seq;
  seq.timesteps.reserve(d);
  for (int r = 0; r < d; ++r) {
    RVec v(2 * m.cols());
    for (int c = 0; c < m.cols(); ++c) {
      v[c] = m(r, c).real();
      v[m.cols() + c] = m(r, c).imag();
    }
    seq.timesteps.push_back(std::move(v));
  }
  return seq;
}

Mat decode_matrix_rows(const std::vector<RVec>& timesteps) {
  const int d = static_cast<int>(timesteps.size());
  if (d == 0) throw std::invalid_argument("decode_matrix_rows: empty sequence");
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    if (timesteps[r].size() != 2 * d) {
      throw std::invalid_argument("decode_matrix_rows: timestep length != 2*dim");
    }
    for (int c = 0; c < d; ++c) {
      m(r, c) = Complex(timesteps[r][c], timesteps[r][d + c]);
    }
  }
  return m;
}

GlobalDataset gen_global_dataset(int count, const GeodesicConfig& cfg,
                                 std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_global_dataset: count must be >= 1");
  const auto basis = horizontal_basis(cfg.n);
  const auto full = full_basis(cfg.n);
  GlobalDataset ds;
  ds.n = cfg.n;
  ds.segments = cfg.segments;
  ds.m = basis.m();
  ds.seed = seed;
  ds.samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t sample_seed = Rng::mix(seed, static_cast<std::uint64_t>(i));
    Mat lam = sample_lambda0(sample_seed, full, cfg.norm_bound);
    GeodesicSample g;
    try {
      g = integrate_geodesic(lam, cfg, basis);
    } catch (const NumericError& e) {
      throw NumericError("sample " + std::to_string(i) + ": " + e.what());
    }
    GlobalSample s;
    s.input = endpoint(g);
    s.target_segments = g.segments;
    s.seed = sample_seed;
    s.lambda_norm = g.lambda_norm;
    s.u0_norm = g.u0_norm;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

LocalDataset gen_local_dataset(int count, int segments, std::uint64_t seed,
                               const HorizontalBasis& basis) {
  if (count < 1) throw std::invalid_argument("gen_local_dataset: count must be >= 1");
  LocalDataset ds;
  ds.n = basis.n;
  ds.segments = segments;
  ds.m = basis.m();
  ds.seed = seed;
  ds.samples.reserve(count);
  const double lim = 1.0 / segments;
  for (int i = 0; i < count; ++i) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(i)));
    LocalSample s;
    s.target_coeffs = RVec(basis.m());
    for (int a = 0; a < basis.m(); ++a) s.target_coeffs[a] = rng.uniform(-lim, lim);
    s.input = embed_local(s.target_coeffs, basis);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

namespace {

json header_json(const char* kind, int n, int segments, int m, std::uint64_t seed) {
  json h;
  h["format_version"] = 1;
  h["kind"] = kind;
  h["n"] = n;
  h["N"] = segments;
  h["m"] = m;
  h["seed"] = seed;
  return h;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
  }
}

json check_header(std::ifstream& in, const std::string& path, const char* kind,
                  bool& empty) {
  std::string line;
  if (!std::getline(in, line)) {
    empty = true;  // zero-byte file decodes as an empty dataset
    return {};
  }
  empty = false;
  json h = parse_line(line, 1);
  if (!h.contains("format_version") || h["format_version"] != 1) {
    throw ParseError(path + ": unsupported format_version");
  }
  if (h.value("kind", "") != kind) {
    throw ParseError(path + ": dataset kind is '" + h.value("kind", "") +
                     "', expected '" + kind + "'");
  }
  return h;
}

}  // namespace

void save_dataset(const GlobalDataset& ds, const std::string& path) {
  auto out = open_out(path);
  out << header_json("global", ds.n, ds.segments, ds.m, ds.seed).dump() << "\n";
  for (const auto& s : ds.samples) {
    json j;
    j["seed"] = s.seed;
    j["lambda_norm"] = s.lambda_norm;
    j["u0_norm"] = s.u0_norm;
    j["input"] = matrix_to_json(s.input);
    json segs = json::array();
    for (const auto& u : s.target_segments) segs.push_back(matrix_to_json(u));
    j["segments"] = std::move(segs);
    out << j.dump() << "\n";
  }
}

void save_dataset(const LocalDataset& ds, const std::string& path) {
  auto out = open_out(path);
  out << header_json("local", ds.n, ds.segments, ds.m, ds.seed).dump() << "\n";
  for (const auto& s : ds.samples) {
    json j;
    j["input"] = matrix_to_json(s.input);
    j["coeffs"] = std::vector<double>(s.target_coeffs.begin(), s.target_coeffs.end());
    out << j.dump() << "\n";
  }
}

GlobalDataset load_global_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  bool empty = false;
  json h = check_header(in, path, "global", empty);
  GlobalDataset ds;
  if (empty) return ds;
  ds.n = h.at("n");
  ds.segments = h.at("N");
  ds.m = h.at("m");
  ds.seed = h.at("seed");
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, lineno);
    GlobalSample s;
    try {
      s.seed = j.at("seed");
      s.lambda_norm = j.at("lambda_norm");
      s.u0_norm = j.at("u0_norm");
      s.input = matrix_from_json(j.at("input"));
      for (const auto& seg : j.at("segments")) {
        s.target_segments.push_back(matrix_from_json(seg));
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad global sample: ") + e.what(), lineno);
    }
    if (static_cast<int>(s.target_segments.size()) != ds.segments) {
      throw ParseError("segment count != N", lineno);
    }
    // persisted-sample invariant: segments still multiply to the input
    Mat prod = Mat::Identity(s.input.rows(), s.input.cols());
    for (const auto& u : s.target_segments) prod = (u * prod).eval();
    if ((prod - s.input).norm() > 1e-9) {
      throw ParseError("segment product does not reproduce input matrix", lineno);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

LocalDataset load_local_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  bool empty = false;
  json h = check_header(in, path, "local", empty);
  LocalDataset ds;
  if (empty) return ds;
  ds.n = h.at("n");
  ds.segments = h.at("N");
  ds.m = h.at("m");
  ds.seed = h.at("seed");
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, lineno);
    LocalSample s;
    try {
      s.input = matrix_from_json(j.at("input"));
      const auto& c = j.at("coeffs");
      s.target_coeffs = RVec(c.size());
      for (std::size_t a = 0; a < c.size(); ++a) s.target_coeffs[a] = c[a].get<double>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad local sample: ") + e.what(), lineno);
    }
    if (s.target_coeffs.size() != ds.m) throw ParseError("coeff length != m", lineno);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace geoqc
