#include "geoqc/matrix_json.hpp"

#include "geoqc/errors.hpp"

namespace geoqc {

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row_re = nlohmann::json::array();
    nlohmann::json row_im = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) {
      row_re.push_back(m(r, c).real());
      row_im.push_back(m(r, c).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    throw ParseError("matrix object needs fields dim/re/im");
  }
  const int d = j.at("dim").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (d <= 0 || static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d) {
    throw ParseError("matrix dim does not match row counts");
  }
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(re[r].size()) != d || static_cast<int>(im[r].size()) != d) {
      throw ParseError("matrix row length does not match dim");
    }
    for (int c = 0; c < d; ++c) {
      m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
  }
  return m;
}

}  // namespace geoqc
