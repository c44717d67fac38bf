#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace netlmi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Dims = std::vector<int>;

constexpr double kZeroTol = 1e-12;
constexpr double kPdTol = 1e-9;
constexpr double kCondWarn = 1e12;

enum class Domain { CT, DT };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_zero_block(const Mat& m, double tol = kZeroTol) {
  return m.size() == 0 || m.cwiseAbs().maxCoeff() <= tol;
}

inline double inf_norm(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double min_eig(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline int dims_sum(const Dims& d) {
  int s = 0;
  for (int v : d) s += v;
  return s;
}

inline std::vector<int> offsets(const Dims& d) {
  std::vector<int> o(d.size() + 1, 0);
  for (size_t i = 0; i < d.size(); ++i) o[i + 1] = o[i] + d[i];
  return o;
}

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

}  // namespace netlmi
