#pragma once

// Small dense linear programs: maximize c.x subject to linear rows, x >= 0.
// Solved by a two-phase tableau simplex using Bland's rule, followed by a
// refactorization of the final basis to clean up the primal values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sinrflow/model.hpp"

namespace sinrflow {

enum class Sense { less_equal, greater_equal, equal };

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense;
  double rhs;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class LinearProgram {
 public:
  std::size_t add_variable(std::string name, double objective = 0.0) {
    names_.push_back(std::move(name));
    objective_.push_back(objective);
    return names_.size() - 1;
  }

  void set_objective(std::size_t var, double coef) { objective_.at(var) = coef; }

  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    for (const Term& t : terms)
      if (t.var >= names_.size())
        throw InvalidInstance("constraint " + name + " references an undeclared variable");
    constraints_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  }

  std::size_t num_variables() const { return names_.size(); }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  double evaluate(const Constraint& c, const std::vector<double>& x) const {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * x[t.var];
    return lhs;
  }

  // Largest bound violation of x (including x >= 0).
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const Constraint& c : constraints_) {
      const double lhs = evaluate(c, x);
      switch (c.sense) {
        case Sense::less_equal: worst = std::max(worst, lhs - c.rhs); break;
        case Sense::greater_equal: worst = std::max(worst, c.rhs - lhs); break;
        case Sense::equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
      }
    }
    return worst;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
};

// Human-readable dump, one constraint per line.
inline std::string to_text(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(17);
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) os << "0";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Term& t = terms[i];
      if (i > 0) os << (t.coef < 0 ? " - " : " + ");
      else if (t.coef < 0) os << "-";
      os << std::abs(t.coef) << " " << lp.variable_names()[t.var];
    }
  };
  std::vector<Term> obj;
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    if (lp.objective()[j] != 0.0) obj.push_back({j, lp.objective()[j]});
  os << "maximize: ";
  write_terms(obj);
  os << "\n";
  for (const Constraint& c : lp.constraints()) {
    os << c.name << ": ";
    write_terms(c.terms);
    os << (c.sense == Sense::less_equal ? " <= " : c.sense == Sense::greater_equal ? " >= " : " = ");
    os << c.rhs << "\n";
  }
  os << "bounds: all variables >= 0\n";
  return os.str();
}

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

class DenseSimplex {
 public:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;

  explicit DenseSimplex(const LinearProgram& lp) : lp_(lp) {
    rows_ = lp.constraints().size();
    nvars_ = lp.num_variables();

    // Normalize to rhs >= 0 and count auxiliary columns.
    std::vector<Sense> senses(rows_);
    std::vector<double> sign(rows_, 1.0);
    std::size_t slacks = 0, artificials = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Constraint& c = lp.constraints()[i];
      Sense s = c.sense;
      if (c.rhs < 0) {
        sign[i] = -1.0;
        if (s == Sense::less_equal) s = Sense::greater_equal;
        else if (s == Sense::greater_equal) s = Sense::less_equal;
      }
      senses[i] = s;
      if (s != Sense::equal) ++slacks;
      if (s != Sense::less_equal) ++artificials;
    }
    art_begin_ = nvars_ + slacks;
    cols_ = art_begin_ + artificials;
    a_.assign(rows_ * cols_, 0.0);
    b_.assign(rows_, 0.0);
    basis_.assign(rows_, 0);

    std::size_t next_slack = nvars_, next_art = art_begin_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Constraint& c = lp.constraints()[i];
      for (const Term& t : c.terms) at(i, t.var) += sign[i] * t.coef;
      b_[i] = sign[i] * c.rhs;
      switch (senses[i]) {
        case Sense::less_equal:
          at(i, next_slack) = 1.0;
          basis_[i] = next_slack++;
          break;
        case Sense::greater_equal:
          at(i, next_slack++) = -1.0;
          at(i, next_art) = 1.0;
          basis_[i] = next_art++;
          break;
        case Sense::equal:
          at(i, next_art) = 1.0;
          basis_[i] = next_art++;
          break;
      }
    }
    original_a_ = a_;
    original_b_ = b_;
  }

  LpSolution solve() {
    LpSolution sol;
    // Phase 1: maximize -sum(artificials).
    if (cols_ > art_begin_) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) cost[j] = -1.0;
      load_costs(cost);
      if (!iterate(cols_, sol.iterations)) throw NumericalFailure("phase 1 reported unbounded");
      double scale = 1.0;
      for (double v : original_b_) scale = std::max(scale, std::abs(v));
      if (-objective_ > 1e-9 * scale) {
        sol.status = LpStatus::infeasible;
        return sol;
      }
      drive_out_artificials();
    }
    // Phase 2.
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < nvars_; ++j) cost[j] = lp_.objective()[j];
    load_costs(cost);
    if (!iterate(art_begin_, sol.iterations)) {
      sol.status = LpStatus::unbounded;
      return sol;
    }

    std::vector<double> x = refactor_primal();
    sol.values.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nvars_));
    for (double& v : sol.values)
      if (std::abs(v) < 1e-12) v = 0.0;
    const double violation = lp_.max_violation(sol.values);
    if (violation > 1e-7) {
      std::ostringstream os;
      os << "simplex solution violates constraints by " << violation << " after "
         << sol.iterations << " pivots";
      throw NumericalFailure(os.str());
    }
    sol.status = LpStatus::optimal;
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < nvars_; ++j) sol.objective_value += lp_.objective()[j] * sol.values[j];
    return sol;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  // Reduced costs d_j = c_j - c_B B^-1 A_j for the current tableau.
  void load_costs(const std::vector<double>& cost) {
    cost_ = cost;
    reduced_ = cost;
    objective_ = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * at(i, j);
      objective_ += cb * b_[i];
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    double* prow = &a_[row * cols_];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] /= p;
    b_[row] /= p;
    prow[col] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      double* r = &a_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) r[j] -= f * prow[j];
      r[col] = 0.0;
      b_[i] -= f * b_[row];
      if (std::abs(b_[i]) < 1e-13) b_[i] = 0.0;
    }
    const double f = reduced_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= f * prow[j];
      reduced_[col] = 0.0;
      objective_ += f * b_[row];
    }
    basis_[row] = col;
  }

  // Bland's rule over columns [0, limit). Returns false on unboundedness.
  bool iterate(std::size_t limit, std::size_t& iterations) {
    const std::size_t cap = 50000 + 50 * (rows_ + cols_);
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
        if (reduced_[j] > kCostTol) {
          enter = j;
          break;
        }
      if (enter == limit) return true;

      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        const double aij = at(i, enter);
        if (aij <= kPivotTol) continue;
        const double ratio = std::max(0.0, b_[i]) / aij;
        // Ties (within rounding) go to the smallest basic variable index.
        const bool better = leave == rows_ || ratio < best - 1e-12;
        const bool tie = !better && ratio <= best + 1e-12 && basis_[i] < basis_[leave];
        if (better || tie) {
          best = better ? ratio : std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
      if (++iterations > cap) throw NumericalFailure("simplex iteration limit exceeded");
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin_) continue;
      std::size_t best = art_begin_;
      double mag = kPivotTol;
      for (std::size_t j = 0; j < art_begin_; ++j)
        if (std::abs(at(i, j)) > mag) mag = std::abs(at(i, j)), best = j;
      // A row without usable entries is redundant; its artificial stays at 0.
      if (best < art_begin_) pivot(i, best);
    }
  }

  // Solves B x_B = b on the original data with partial pivoting.
  std::vector<double> refactor_primal() const {
    const std::size_t n = rows_;
    std::vector<double> m(n * (n + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) m[i * (n + 1) + k] = original_a_[i * cols_ + basis_[k]];
      m[i * (n + 1) + n] = original_b_[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(m[r * (n + 1) + c]) > std::abs(m[p * (n + 1) + c])) p = r;
      if (std::abs(m[p * (n + 1) + c]) < 1e-14) throw NumericalFailure("singular final basis");
      if (p != c)
        for (std::size_t k = 0; k <= n; ++k) std::swap(m[p * (n + 1) + k], m[c * (n + 1) + k]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = m[r * (n + 1) + c] / m[c * (n + 1) + c];
        if (f == 0.0) continue;
        for (std::size_t k = c; k <= n; ++k) m[r * (n + 1) + k] -= f * m[c * (n + 1) + k];
      }
    }
    std::vector<double> x(cols_, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = m[k * (n + 1) + n] / m[k * (n + 1) + k];
      x[basis_[k]] = v < 0.0 && v > -1e-9 ? 0.0 : v;
    }
    return x;
  }

  const LinearProgram& lp_;
  std::size_t rows_ = 0, nvars_ = 0, cols_ = 0, art_begin_ = 0;
  std::vector<double> a_, b_, original_a_, original_b_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_, reduced_;
  double objective_ = 0.0;
};

}  // namespace detail

// Deterministic: identical programs give identical solutions.
inline LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.constraints().empty()) {
    LpSolution sol;
    for (double c : lp.objective())
      if (c > 0.0) {
        sol.status = LpStatus::unbounded;
        return sol;
      }
    sol.status = LpStatus::optimal;
    sol.values.assign(lp.num_variables(), 0.0);
    return sol;
  }
  return detail::DenseSimplex(lp).solve();
}

}  // namespace sinrflow
