#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpnorm/tensor.hpp"

namespace lpnorm {

/// Sparse affine expression sum_i coeff_i * x_{var_i} + constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  static LinExpr var(int handle, double coeff = 1.0) {
    LinExpr e;
    e.terms.emplace_back(handle, coeff);
    return e;
  }

  LinExpr& operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [h, c] : o.terms) terms.emplace_back(h, -c);
    constant -= o.constant;
    return *this;
  }
  LinExpr& operator*=(double s) {
    for (auto& [h, c] : terms) c *= s;
    constant *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  double eval(const std::vector<double>& x) const {
    double v = constant;
    for (const auto& [h, c] : terms) v += c * x[h];
    return v;
  }
};

enum class Rel { LE, EQ, GE };

struct LinearConstraint {
  LinExpr lhs;
  Rel rel = Rel::LE;
  double rhs = 0.0;
};

/// ||body||_2 <= bound, all entries affine.
struct SocConstraint {
  LinExpr bound;
  std::vector<LinExpr> body;
};

/// M(x) is symmetric PSD; only the upper triangle is stored, column-major:
/// entries (i,j) with i <= j ordered by j, then i.
struct PsdConstraint {
  int side = 0;
  std::vector<LinExpr> upper;  // length side*(side+1)/2
};

inline int svec_size(int n) { return n * (n + 1) / 2; }
inline int svec_index(int i, int j, int /*n*/) {
  // i <= j, column-major upper triangle
  return j * (j + 1) / 2 + i;
}

/// Relocatable bundle of cone constraints over a mix of externally bound
/// handles and block-local auxiliary variables. Handles inside the block are
/// encoded as: value >= 0 -> index into the bound-handle list passed to
/// ConicProgram::add_block; value < 0 -> auxiliary slot ~value.
struct ConeBlock {
  static constexpr int aux(int i) { return ~i; }

  struct Soc3 {
    int w, x, y;  // ||(w, (x-y)/2)||_2 <= (x+y)/2
  };
  struct LinLe {
    int small, big;  // small <= big
  };

  int num_bound = 0;
  int num_aux = 0;
  std::vector<std::string> aux_names;
  std::vector<Soc3> socs;
  std::vector<LinLe> linear;
  std::vector<int> nonneg;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };

std::string to_string(SolveStatus s);

struct SolverStats {
  int iterations = 0;
  double wall_time_s = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  std::string message;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalTrouble;
  std::optional<double> objective;  // present iff status == Optimal
  std::vector<double> x;
  SolverStats stats;
};

/// Linear objective over free/nonnegative scalar variables subject to linear,
/// second-order-cone and semidefinite constraints. Append-only; checkpoints
/// allow rolling back trailing additions.
class ConicProgram {
 public:
  int add_var(bool nonneg = false, const std::string& name = {});
  std::vector<int> add_vars(int count, bool nonneg = false, const std::string& prefix = {});

  int num_vars() const { return static_cast<int>(nonneg_.size()); }
  bool is_nonneg(int handle) const { return nonneg_.at(handle); }
  void set_nonneg(int handle) { nonneg_.at(handle) = true; }

  void set_objective(LinExpr objective, bool maximize);
  const LinExpr& objective() const { return objective_; }
  bool maximize() const { return maximize_; }

  void add_linear(LinExpr lhs, Rel rel, double rhs);
  void add_soc(SocConstraint c);
  void add_psd(PsdConstraint c);

  /// PSD constraint from a dense symmetric matrix of affine expressions.
  void psd_embed(const std::vector<std::vector<LinExpr>>& symmetric_expr);

  /// Instantiates `block`, binding block handle i >= 0 to bound[i] and
  /// allocating fresh variables for the auxiliary slots. Returns the handles
  /// of the new auxiliary variables.
  std::vector<int> add_block(const ConeBlock& block, const std::vector<int>& bound);

  const std::vector<LinearConstraint>& linear() const { return linear_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }
  const std::vector<PsdConstraint>& psds() const { return psds_; }
  const std::vector<std::string>& var_names() const { return names_; }

  struct Checkpoint {
    size_t vars, lin, soc, psd;
  };
  Checkpoint checkpoint() const;
  void rollback(const Checkpoint& c);

  nlohmann::json to_json() const;
  static ConicProgram from_json(const nlohmann::json& j);

 private:
  void check_expr(const LinExpr& e) const;

  std::vector<bool> nonneg_;
  std::vector<std::string> names_;
  LinExpr objective_;
  bool maximize_ = false;
  std::vector<LinearConstraint> linear_;
  std::vector<SocConstraint> socs_;
  std::vector<PsdConstraint> psds_;
};

}  // namespace lpnorm
