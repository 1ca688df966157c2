#include "lpnorm/conic.hpp"

namespace lpnorm {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalTrouble: return "numerical-trouble";
  }
  return "unknown";
}

int ConicProgram::add_var(bool nonneg, const std::string& name) {
  nonneg_.push_back(nonneg);
  names_.push_back(name);
  return num_vars() - 1;
}

std::vector<int> ConicProgram::add_vars(int count, bool nonneg, const std::string& prefix) {
  std::vector<int> handles(count);
  for (int i = 0; i < count; ++i)
    handles[i] = add_var(nonneg, prefix.empty() ? prefix : prefix + "[" + std::to_string(i) + "]");
  return handles;
}

void ConicProgram::check_expr(const LinExpr& e) const {
  for (const auto& [h, c] : e.terms) {
    (void)c;
    if (h < 0 || h >= num_vars()) throw Error("constraint references unknown variable handle");
  }
}

void ConicProgram::set_objective(LinExpr objective, bool maximize) {
  check_expr(objective);
  objective_ = std::move(objective);
  maximize_ = maximize;
}

void ConicProgram::add_linear(LinExpr lhs, Rel rel, double rhs) {
  check_expr(lhs);
  linear_.push_back({std::move(lhs), rel, rhs});
}

void ConicProgram::add_soc(SocConstraint c) {
  check_expr(c.bound);
  for (const auto& e : c.body) check_expr(e);
  socs_.push_back(std::move(c));
}

void ConicProgram::add_psd(PsdConstraint c) {
  if (c.side < 1 || static_cast<int>(c.upper.size()) != svec_size(c.side))
    throw Error("malformed PSD constraint");
  for (const auto& e : c.upper) check_expr(e);
  psds_.push_back(std::move(c));
}

void ConicProgram::psd_embed(const std::vector<std::vector<LinExpr>>& m) {
  const int n = static_cast<int>(m.size());
  PsdConstraint c;
  c.side = n;
  c.upper.resize(svec_size(n));
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(m[j].size()) != n) throw Error("psd_embed needs a square matrix");
    for (int i = 0; i <= j; ++i) c.upper[svec_index(i, j, n)] = m[i][j];
  }
  add_psd(std::move(c));
}

std::vector<int> ConicProgram::add_block(const ConeBlock& block, const std::vector<int>& bound) {
  if (static_cast<int>(bound.size()) != block.num_bound)
    throw Error("add_block: bound handle count mismatch");
  std::vector<int> aux(block.num_aux);
  for (int i = 0; i < block.num_aux; ++i) {
    const std::string name =
        i < static_cast<int>(block.aux_names.size()) ? block.aux_names[i] : std::string{};
    aux[i] = add_var(false, name);
  }
  auto resolve = [&](int h) -> int {
    if (h >= 0) {
      if (h >= block.num_bound) throw Error("add_block: bad bound slot");
      return bound[h];
    }
    const int i = ~h;
    if (i >= block.num_aux) throw Error("add_block: bad aux slot");
    return aux[i];
  };
  for (const auto& soc : block.socs) {
    const int w = resolve(soc.w), x = resolve(soc.x), y = resolve(soc.y);
    SocConstraint c;
    c.bound = 0.5 * (LinExpr::var(x) + LinExpr::var(y));
    c.body = {LinExpr::var(w), 0.5 * (LinExpr::var(x) - LinExpr::var(y))};
    add_soc(std::move(c));
  }
  for (const auto& le : block.linear)
    add_linear(LinExpr::var(resolve(le.small)) - LinExpr::var(resolve(le.big)), Rel::LE, 0.0);
  for (int h : block.nonneg) set_nonneg(resolve(h));
  return aux;
}

ConicProgram::Checkpoint ConicProgram::checkpoint() const {
  return {nonneg_.size(), linear_.size(), socs_.size(), psds_.size()};
}

void ConicProgram::rollback(const Checkpoint& c) {
  if (c.vars > nonneg_.size() || c.lin > linear_.size() || c.soc > socs_.size() ||
      c.psd > psds_.size())
    throw Error("rollback to a checkpoint from a different program");
  nonneg_.resize(c.vars);
  names_.resize(c.vars);
  linear_.resize(c.lin);
  socs_.resize(c.soc);
  psds_.resize(c.psd);
}

namespace {

nlohmann::json expr_to_json(const LinExpr& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [h, c] : e.terms) terms.push_back({h, c});
  return nlohmann::json{{"terms", terms}, {"constant", e.constant}};
}

LinExpr expr_from_json(const nlohmann::json& j) {
  LinExpr e;
  e.constant = j.at("constant").get<double>();
  for (const auto& t : j.at("terms")) e.terms.emplace_back(t[0].get<int>(), t[1].get<double>());
  return e;
}

}  // namespace

nlohmann::json ConicProgram::to_json() const {
  nlohmann::json j;
  j["num_vars"] = num_vars();
  j["nonneg"] = std::vector<bool>(nonneg_.begin(), nonneg_.end());
  j["names"] = names_;
  j["maximize"] = maximize_;
  j["objective"] = expr_to_json(objective_);
  auto& lin = j["linear"] = nlohmann::json::array();
  for (const auto& c : linear_) {
    const char* rel = c.rel == Rel::LE ? "<=" : (c.rel == Rel::EQ ? "==" : ">=");
    lin.push_back({{"lhs", expr_to_json(c.lhs)}, {"rel", rel}, {"rhs", c.rhs}});
  }
  auto& socs = j["soc"] = nlohmann::json::array();
  for (const auto& c : socs_) {
    nlohmann::json body = nlohmann::json::array();
    for (const auto& e : c.body) body.push_back(expr_to_json(e));
    socs.push_back({{"bound", expr_to_json(c.bound)}, {"body", body}});
  }
  auto& psds = j["psd"] = nlohmann::json::array();
  for (const auto& c : psds_) {
    nlohmann::json upper = nlohmann::json::array();
    for (const auto& e : c.upper) upper.push_back(expr_to_json(e));
    psds.push_back({{"side", c.side}, {"upper", upper}});
  }
  return j;
}

ConicProgram ConicProgram::from_json(const nlohmann::json& j) {
  ConicProgram p;
  const auto nonneg = j.at("nonneg").get<std::vector<bool>>();
  const auto names = j.at("names").get<std::vector<std::string>>();
  for (size_t i = 0; i < nonneg.size(); ++i) p.add_var(nonneg[i], names[i]);
  p.set_objective(expr_from_json(j.at("objective")), j.at("maximize").get<bool>());
  for (const auto& c : j.at("linear")) {
    const std::string rel = c.at("rel").get<std::string>();
    p.add_linear(expr_from_json(c.at("lhs")),
                 rel == "<=" ? Rel::LE : (rel == "==" ? Rel::EQ : Rel::GE),
                 c.at("rhs").get<double>());
  }
  for (const auto& c : j.at("soc")) {
    SocConstraint soc;
    soc.bound = expr_from_json(c.at("bound"));
    for (const auto& e : c.at("body")) soc.body.push_back(expr_from_json(e));
    p.add_soc(std::move(soc));
  }
  for (const auto& c : j.at("psd")) {
    PsdConstraint psd;
    psd.side = c.at("side").get<int>();
    for (const auto& e : c.at("upper")) psd.upper.push_back(expr_from_json(e));
    p.add_psd(std::move(psd));
  }
  return p;
}

}  // namespace lpnorm
