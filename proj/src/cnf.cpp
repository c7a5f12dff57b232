#include "rscavity/cnf.hpp"

#include <algorithm>
#include <mutex>

#include "rscavity/error.hpp"

namespace rscavity {

struct Formula::Index {
  std::once_flag once;
  std::vector<Occurrences> occ;  // occ[var - 1]
};

Literal Literal::from_int(std::int64_t v) {
  if (v == 0) throw InputError("literal 0 is not a literal");
  return {static_cast<std::uint32_t>(v > 0 ? v : -v), v > 0 ? 1 : -1};
}

Formula::Formula(unsigned k, std::uint32_t n, std::vector<Clause> clauses, Width width)
    : k_(k), n_(n), width_(width), clauses_(std::move(clauses)), index_(std::make_shared<Index>()) {
  if (k_ < 2) throw InputError("clause width k must be at least 2");
  std::vector<std::uint32_t> seen(static_cast<std::size_t>(n_) + 1, 0);
  for (std::size_t c = 0; c < clauses_.size(); ++c) {
    const Clause& cl = clauses_[c];
    if (width_ == Width::exact && cl.size() != k_) {
      throw InputError("clause " + std::to_string(c) + " has width " + std::to_string(cl.size()) +
                       ", expected " + std::to_string(k_));
    }
    for (const Literal& l : cl) {
      if (l.var < 1 || l.var > n_) {
        throw InputError("clause " + std::to_string(c) + " mentions variable " + std::to_string(l.var) +
                         " outside 1.." + std::to_string(n_));
      }
      if (l.sign != 1 && l.sign != -1) throw InputError("literal sign must be +1 or -1");
      if (seen[l.var] == c + 1) {
        throw InputError("clause " + std::to_string(c) + " contains variable " + std::to_string(l.var) +
                         " twice");
      }
      seen[l.var] = static_cast<std::uint32_t>(c + 1);
    }
  }
}

const Formula::Index& Formula::index() const {
  std::call_once(index_->once, [this] {
    index_->occ.assign(n_, {});
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      for (const Literal& l : clauses_[c]) {
        auto& o = index_->occ[l.var - 1];
        (l.sign > 0 ? o.positive : o.negative).push_back(c);
      }
    }
  });
  return *index_;
}

void Formula::check_var(std::uint32_t var) const {
  if (var < 1 || var > n_) {
    throw InputError("variable " + std::to_string(var) + " outside 1.." + std::to_string(n_));
  }
}

const Occurrences& Formula::occurrences(std::uint32_t var) const {
  check_var(var);
  return index().occ[var - 1];
}

bool Formula::is_pure(std::uint32_t var) const {
  const Occurrences& o = occurrences(var);
  return o.positive.empty() || o.negative.empty();
}

int Formula::sign_in(std::size_t c, std::uint32_t var) const {
  for (const Literal& l : clauses_[c]) {
    if (l.var == var) return l.sign;
  }
  return 0;
}

Formula Formula::assign(std::uint32_t var, int s) const {
  check_var(var);
  if (s != 1 && s != -1) throw InputError("assignment value must be +1 or -1");
  std::vector<Clause> out;
  out.reserve(clauses_.size());
  for (const Clause& cl : clauses_) {
    const auto hit = std::find_if(cl.begin(), cl.end(), [var](const Literal& l) { return l.var == var; });
    if (hit == cl.end()) {
      out.push_back(cl);
    } else if (hit->sign != s) {
      Clause stripped;
      stripped.reserve(cl.size() - 1);
      for (const Literal& l : cl) {
        if (l.var != var) stripped.push_back(l);
      }
      out.push_back(std::move(stripped));
    }
  }
  return Formula(k_, n_, std::move(out), Width::reduced);
}

bool same_clause_multiset(const Formula& a, const Formula& b) {
  if (a.num_clauses() != b.num_clauses()) return false;
  auto canon = [](const Formula& f) {
    std::vector<Clause> cs = f.clauses();
    for (auto& c : cs) std::sort(c.begin(), c.end());
    std::sort(cs.begin(), cs.end());
    return cs;
  };
  return canon(a) == canon(b);
}

}  // namespace rscavity
