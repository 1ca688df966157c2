#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lpnorm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exponent p given as a reduced fraction b/a (so 1/p = a/b), together with
/// its Holder conjugate q = b/(b-a). Most of the conic machinery requires
/// p to be an exact rational in (2, inf).
class RationalExponent {
 public:
  RationalExponent(std::int64_t b, std::int64_t a);

  /// Parses "b/a" ("3", "5/2") or a decimal that matches a fraction with
  /// denominator at most 64 to within 1e-9. Anything else is rejected.
  static RationalExponent parse(const std::string& text);

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  double value() const { return static_cast<double>(b_) / static_cast<double>(a_); }
  double conjugate() const { return static_cast<double>(b_) / static_cast<double>(b_ - a_); }
  bool greater_than_two() const { return b_ > 2 * a_; }
  std::string str() const;

 private:
  std::int64_t a_, b_;  // 1/p = a/b, gcd(a,b) = 1, b > a >= 1
};

/// Dense real tensor of order d >= 1 in row-major layout (last index fastest).
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> shape);  // zero-filled
  DenseTensor(std::vector<int> shape, std::vector<double> data);

  int order() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int mode) const { return shape_.at(mode); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double operator()(const std::vector<int>& index) const { return data_[offset(index)]; }
  double& operator()(const std::vector<int>& index) { return data_[offset(index)]; }

  std::int64_t offset(const std::vector<int>& index) const;
  std::int64_t stride(int mode) const;

  double frobenius_norm() const;
  double dot(const DenseTensor& other) const;

  nlohmann::json to_json() const;
  static DenseTensor from_json(const nlohmann::json& j);
  std::vector<std::uint8_t> to_binary() const;
  static DenseTensor from_binary(const std::vector<std::uint8_t>& bytes);

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

/// Split of the modes {0,...,d-1} into ordered row and column groups.
struct ModePartition {
  std::vector<int> row_modes;
  std::vector<int> col_modes;

  void validate(int order) const;
};

/// (sum_i |x_i|^p)^(1/p); max |x_i| for p = inf. Rejects p < 1.
double lp_norm(const Vec& x, double p);

/// Holder-dual direction: the unit-lp vector maximizing <x, w>; returns a
/// zero vector when w = 0. Requires p in (1, inf).
Vec lp_dual_vector(const Vec& w, double p);

/// Mode-k contraction with a vector: sum_i x_i T_i^(k), order drops by one.
DenseTensor mode_product(const DenseTensor& t, int mode, const Vec& x);

/// <T, x_0 (x) x_1 (x) ... (x) x_{d-1}>.
double multilinear_form(const DenseTensor& t, const std::vector<Vec>& xs);

/// Matrix unfolding; multi-indices enumerate row-major over the ordered mode
/// lists of the partition. Frobenius norm is preserved.
Mat unfold(const DenseTensor& t, const ModePartition& part);

/// Matrices obtained by fixing every mode except `mode_i` and `mode_j`,
/// ordered row-major over the fixed indices.
std::vector<Mat> slice_partition(const DenseTensor& t, int mode_i, int mode_j);

/// Reorders modes: out(i_{perm[0]}, ..., i_{perm[d-1]}) = t(i_0, ..., i_{d-1});
/// perm[k] is the source mode placed at position k.
DenseTensor permute_modes(const DenseTensor& t, const std::vector<int>& perm);

Mat outer(const Vec& x, const Vec& y);
Vec kron(const Vec& x, const Vec& y);
Vec append(const Vec& x, const Vec& y);

/// Set versions over Cartesian pairs, with exact-duplicate removal.
std::vector<Vec> kron_sets(const std::vector<Vec>& xs, const std::vector<Vec>& ys);
std::vector<Vec> append_sets(const std::vector<Vec>& xs, const std::vector<Vec>& ys);
std::vector<Vec> dedup_exact(std::vector<Vec> vs);

DenseTensor rank_one(const std::vector<Vec>& factors);
DenseTensor tensor_from_matrix(const Mat& m);

nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

}  // namespace lpnorm
