#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace shapeopt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Error classes map one-to-one onto CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mat3 sym(const Mat3& a) { return 0.5 * (a + a.transpose()); }

// lambda tr(M) I + mu (M + M^T), the elastic map applied to a displacement gradient
inline Mat3 elastic_map(const Mat3& m, double lambda, double mu) {
  return lambda * m.trace() * Mat3::Identity() + mu * (m + m.transpose());
}

inline double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

// Zero-initialized map access for Eigen accumulators (the default Eigen
// constructor leaves coefficients uninitialized).
template <typename Map>
typename Map::mapped_type& zsum(Map& m, const typename Map::key_type& k) {
  auto it = m.find(k);
  if (it == m.end()) it = m.emplace(k, Map::mapped_type::Zero()).first;
  return it->second;
}

}  // namespace shapeopt
