#include "lpnorm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace lpnorm {

namespace {

std::int64_t checked_product(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d < 1) throw Error("tensor dimensions must be >= 1");
    n *= d;
    if (n > (1LL << 40)) throw Error("tensor too large");
  }
  return n;
}

}  // namespace

RationalExponent::RationalExponent(std::int64_t b, std::int64_t a) : a_(a), b_(b) {
  if (a < 1 || b < 1) throw Error("exponent must be positive");
  if (b <= a) throw Error("exponent p = b/a must exceed 1");
  const std::int64_t g = std::gcd(a, b);
  a_ /= g;
  b_ /= g;
}

RationalExponent RationalExponent::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const std::int64_t b = std::stoll(text.substr(0, slash));
      const std::int64_t a = std::stoll(text.substr(slash + 1));
      return RationalExponent(b, a);
    }
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw Error("trailing characters in exponent '" + text + "'");
    for (std::int64_t den = 1; den <= 64; ++den) {
      const double num = v * static_cast<double>(den);
      const std::int64_t b = static_cast<std::int64_t>(std::llround(num));
      if (b >= 1 && std::abs(num - static_cast<double>(b)) <= 1e-9 * std::max(1.0, std::abs(num)))
        return RationalExponent(b, den);
    }
  } catch (const std::invalid_argument&) {
    throw Error("cannot parse exponent '" + text + "'");
  } catch (const std::out_of_range&) {
    throw Error("exponent '" + text + "' out of range");
  }
  throw Error("exponent '" + text +
              "' does not match an exact fraction with denominator <= 64; "
              "pass it as 'b/a'");
}

std::string RationalExponent::str() const {
  if (a_ == 1) return std::to_string(b_);
  return std::to_string(b_) + "/" + std::to_string(a_);
}

DenseTensor::DenseTensor(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw Error("tensor order must be >= 1");
  data_.assign(static_cast<size_t>(checked_product(shape_)), 0.0);
}

DenseTensor::DenseTensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw Error("tensor order must be >= 1");
  if (checked_product(shape_) != static_cast<std::int64_t>(data_.size()))
    throw Error("tensor data length does not match shape");
}

std::int64_t DenseTensor::stride(int mode) const {
  std::int64_t s = 1;
  for (int k = mode + 1; k < order(); ++k) s *= shape_[k];
  return s;
}

std::int64_t DenseTensor::offset(const std::vector<int>& index) const {
  if (static_cast<int>(index.size()) != order()) throw Error("index order mismatch");
  std::int64_t off = 0;
  for (int k = 0; k < order(); ++k) {
    if (index[k] < 0 || index[k] >= shape_[k]) throw Error("index out of range");
    off = off * shape_[k] + index[k];
  }
  return off;
}

double DenseTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double DenseTensor::dot(const DenseTensor& other) const {
  if (shape_ != other.shape_) throw Error("tensor shape mismatch in dot");
  double s = 0.0;
  for (size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
  return s;
}

nlohmann::json DenseTensor::to_json() const {
  return nlohmann::json{{"shape", shape_}, {"data", data_}};
}

DenseTensor DenseTensor::from_json(const nlohmann::json& j) {
  return DenseTensor(j.at("shape").get<std::vector<int>>(),
                     j.at("data").get<std::vector<double>>());
}

std::vector<std::uint8_t> DenseTensor::to_binary() const {
  // layout: u64 order, u64 dims..., f64 data..., all little-endian
  std::vector<std::uint8_t> out;
  out.reserve(8 * (1 + shape_.size() + data_.size()));
  auto push_u64 = [&out](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  push_u64(shape_.size());
  for (int d : shape_) push_u64(static_cast<std::uint64_t>(d));
  for (double v : data_) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    push_u64(bits);
  }
  return out;
}

DenseTensor DenseTensor::from_binary(const std::vector<std::uint8_t>& bytes) {
  size_t pos = 0;
  auto read_u64 = [&bytes, &pos]() {
    if (pos + 8 > bytes.size()) throw Error("truncated binary tensor");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  };
  const std::uint64_t order = read_u64();
  if (order == 0 || order > 32) throw Error("bad tensor order in binary form");
  std::vector<int> shape(order);
  for (auto& d : shape) d = static_cast<int>(read_u64());
  const std::int64_t n = checked_product(shape);
  std::vector<double> data(static_cast<size_t>(n));
  for (auto& v : data) {
    const std::uint64_t bits = read_u64();
    std::memcpy(&v, &bits, 8);
  }
  if (pos != bytes.size()) throw Error("trailing bytes in binary tensor");
  return DenseTensor(std::move(shape), std::move(data));
}

void ModePartition::validate(int order) const {
  if (row_modes.empty() || col_modes.empty()) throw Error("partition groups must be nonempty");
  std::vector<char> seen(order, 0);
  for (int m : row_modes) {
    if (m < 0 || m >= order || seen[m]) throw Error("invalid mode partition");
    seen[m] = 1;
  }
  for (int m : col_modes) {
    if (m < 0 || m >= order || seen[m]) throw Error("invalid mode partition");
    seen[m] = 1;
  }
  for (char c : seen)
    if (!c) throw Error("mode partition must cover all modes");
}

double lp_norm(const Vec& x, double p) {
  if (x.size() == 0) throw Error("lp_norm of empty vector");
  if (p < 1.0) throw Error("lp_norm requires p >= 1");
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  // scale out the max to avoid overflow for large p
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Vec lp_dual_vector(const Vec& w, double p) {
  if (p <= 1.0 || std::isinf(p)) throw Error("lp_dual_vector requires p in (1, inf)");
  const double q = p / (p - 1.0);
  Vec x = Vec::Zero(w.size());
  const double nq = lp_norm(w, q);
  if (nq == 0.0) return x;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double a = std::abs(w[i]) / nq;
    x[i] = (w[i] >= 0.0 ? 1.0 : -1.0) * std::pow(a, q - 1.0);
  }
  // x has unit lp norm and <x, w> = ||w||_q; renormalize defensively
  const double np = lp_norm(x, p);
  if (np > 0.0) x /= np;
  return x;
}

DenseTensor mode_product(const DenseTensor& t, int mode, const Vec& x) {
  const int d = t.order();
  if (mode < 0 || mode >= d) throw Error("mode out of range");
  if (x.size() != t.dim(mode)) throw Error("mode_product dimension mismatch");
  if (d == 1) {
    double s = 0.0;
    for (int i = 0; i < t.dim(0); ++i) s += x[i] * t.data()[i];
    return DenseTensor({1}, {s});
  }
  std::vector<int> out_shape;
  for (int k = 0; k < d; ++k)
    if (k != mode) out_shape.push_back(t.dim(k));
  DenseTensor out(out_shape);

  const std::int64_t inner = t.stride(mode);           // product of dims after `mode`
  const std::int64_t outer_count = t.size() / (inner * t.dim(mode));
  const auto& src = t.data();
  auto& dst = out.data();
  for (std::int64_t o = 0; o < outer_count; ++o) {
    const std::int64_t src_base = o * inner * t.dim(mode);
    const std::int64_t dst_base = o * inner;
    for (int i = 0; i < t.dim(mode); ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* s = src.data() + src_base + i * inner;
      double* dptr = dst.data() + dst_base;
      for (std::int64_t j = 0; j < inner; ++j) dptr[j] += xi * s[j];
    }
  }
  return out;
}

double multilinear_form(const DenseTensor& t, const std::vector<Vec>& xs) {
  if (static_cast<int>(xs.size()) != t.order()) throw Error("multilinear_form needs one vector per mode");
  DenseTensor cur = t;
  for (int k = 0; k < t.order(); ++k) cur = mode_product(cur, 0, xs[k]);
  return cur.data()[0];
}

Mat unfold(const DenseTensor& t, const ModePartition& part) {
  part.validate(t.order());
  std::int64_t rows = 1, cols = 1;
  for (int m : part.row_modes) rows *= t.dim(m);
  for (int m : part.col_modes) cols *= t.dim(m);
  Mat out(rows, cols);

  const int d = t.order();
  std::vector<int> index(d, 0);
  std::vector<std::int64_t> row_stride(part.row_modes.size()), col_stride(part.col_modes.size());
  {
    std::int64_t s = 1;
    for (int k = static_cast<int>(part.row_modes.size()) - 1; k >= 0; --k) {
      row_stride[k] = s;
      s *= t.dim(part.row_modes[k]);
    }
    s = 1;
    for (int k = static_cast<int>(part.col_modes.size()) - 1; k >= 0; --k) {
      col_stride[k] = s;
      s *= t.dim(part.col_modes[k]);
    }
  }
  const auto& data = t.data();
  for (std::int64_t off = 0; off < t.size(); ++off) {
    // decode row-major multi-index
    std::int64_t rem = off;
    for (int k = d - 1; k >= 0; --k) {
      index[k] = static_cast<int>(rem % t.dim(k));
      rem /= t.dim(k);
    }
    std::int64_t r = 0, c = 0;
    for (size_t k = 0; k < part.row_modes.size(); ++k) r += index[part.row_modes[k]] * row_stride[k];
    for (size_t k = 0; k < part.col_modes.size(); ++k) c += index[part.col_modes[k]] * col_stride[k];
    out(r, c) = data[off];
  }
  return out;
}

std::vector<Mat> slice_partition(const DenseTensor& t, int mode_i, int mode_j) {
  const int d = t.order();
  if (mode_i == mode_j) throw Error("slice_partition needs distinct modes");
  if (mode_i < 0 || mode_i >= d || mode_j < 0 || mode_j >= d) throw Error("mode out of range");

  std::vector<int> fixed;
  for (int k = 0; k < d; ++k)
    if (k != mode_i && k != mode_j) fixed.push_back(k);
  std::int64_t count = 1;
  for (int k : fixed) count *= t.dim(k);

  std::vector<Mat> slices;
  slices.reserve(count);
  std::vector<int> index(d, 0);
  for (std::int64_t f = 0; f < count; ++f) {
    std::int64_t rem = f;
    for (int k = static_cast<int>(fixed.size()) - 1; k >= 0; --k) {
      index[fixed[k]] = static_cast<int>(rem % t.dim(fixed[k]));
      rem /= t.dim(fixed[k]);
    }
    Mat m(t.dim(mode_i), t.dim(mode_j));
    for (int i = 0; i < t.dim(mode_i); ++i)
      for (int j = 0; j < t.dim(mode_j); ++j) {
        index[mode_i] = i;
        index[mode_j] = j;
        m(i, j) = t(index);
      }
    slices.push_back(std::move(m));
  }
  return slices;
}

DenseTensor permute_modes(const DenseTensor& t, const std::vector<int>& perm) {
  const int d = t.order();
  if (static_cast<int>(perm.size()) != d) throw Error("permutation order mismatch");
  std::vector<char> seen(d, 0);
  for (int m : perm) {
    if (m < 0 || m >= d || seen[m]) throw Error("invalid mode permutation");
    seen[m] = 1;
  }
  std::vector<int> out_shape(d);
  for (int k = 0; k < d; ++k) out_shape[k] = t.dim(perm[k]);
  DenseTensor out(out_shape);
  std::vector<int> src_index(d, 0), dst_index(d, 0);
  for (std::int64_t off = 0; off < t.size(); ++off) {
    std::int64_t rem = off;
    for (int k = d - 1; k >= 0; --k) {
      src_index[k] = static_cast<int>(rem % t.dim(k));
      rem /= t.dim(k);
    }
    for (int k = 0; k < d; ++k) dst_index[k] = src_index[perm[k]];
    out(dst_index) = t.data()[off];
  }
  return out;
}

Mat outer(const Vec& x, const Vec& y) { return x * y.transpose(); }

Vec kron(const Vec& x, const Vec& y) {
  Vec out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x[i] * y;
  return out;
}

Vec append(const Vec& x, const Vec& y) {
  Vec out(x.size() + y.size());
  out << x, y;
  return out;
}

std::vector<Vec> dedup_exact(std::vector<Vec> vs) {
  std::sort(vs.begin(), vs.end(), [](const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  vs.erase(std::unique(vs.begin(), vs.end(),
                       [](const Vec& a, const Vec& b) { return a.size() == b.size() && a == b; }),
           vs.end());
  return vs;
}

std::vector<Vec> kron_sets(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  std::vector<Vec> out;
  out.reserve(xs.size() * ys.size());
  for (const auto& x : xs)
    for (const auto& y : ys) out.push_back(kron(x, y));
  return dedup_exact(std::move(out));
}

std::vector<Vec> append_sets(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  std::vector<Vec> out;
  out.reserve(xs.size() * ys.size());
  for (const auto& x : xs)
    for (const auto& y : ys) out.push_back(append(x, y));
  return dedup_exact(std::move(out));
}

DenseTensor rank_one(const std::vector<Vec>& factors) {
  if (factors.empty()) throw Error("rank_one needs at least one factor");
  std::vector<int> shape;
  for (const auto& f : factors) shape.push_back(static_cast<int>(f.size()));
  DenseTensor t(shape);
  auto& data = t.data();
  std::vector<int> index(shape.size(), 0);
  for (std::int64_t off = 0; off < t.size(); ++off) {
    std::int64_t rem = off;
    double v = 1.0;
    for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
      index[k] = static_cast<int>(rem % shape[k]);
      rem /= shape[k];
    }
    for (size_t k = 0; k < factors.size(); ++k) v *= factors[k][index[k]];
    data[off] = v;
  }
  return t;
}

DenseTensor tensor_from_matrix(const Mat& m) {
  DenseTensor t({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.data()[i * m.cols() + j] = m(i, j);
  return t;
}

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const nlohmann::json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace lpnorm
