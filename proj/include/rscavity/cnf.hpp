#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rscavity {

/// A literal s·x: variable index (1-based) and sign +1 / -1.
struct Literal {
  std::uint32_t var = 1;
  int sign = 1;

  Literal negated() const { return {var, -sign}; }

  /// DIMACS integer encoding.
  std::int64_t to_int() const { return sign * static_cast<std::int64_t>(var); }
  static Literal from_int(std::int64_t v);

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// ∂⁺x and ∂⁻x: indices of clauses containing x positively / negatively.
struct Occurrences {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
};

/// Whether every clause must have exactly k literals.
enum class Width { exact, reduced };

/// An immutable CNF formula over variables 1..n.
///
/// Clause order and literal order are preserved as given; tie-breaking in
/// the pure-literal machinery depends on them. No clause may mention a
/// variable twice. Formulas of Width::reduced (the result of assign(), or a
/// DIMACS file with mixed widths) may contain clauses of any length,
/// including the empty clause.
///
/// The variable-to-clause index is built on first use and shared between
/// copies; concurrent read-only use is safe.
class Formula {
 public:
  Formula(unsigned k, std::uint32_t n, std::vector<Clause> clauses, Width width = Width::exact);

  unsigned k() const { return k_; }
  std::uint32_t num_vars() const { return n_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  bool reduced() const { return width_ == Width::reduced; }
  Width width() const { return width_; }

  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_[i]; }

  /// Throws InputError unless 1 <= var <= n.
  const Occurrences& occurrences(std::uint32_t var) const;

  /// True iff ∂⁺x or ∂⁻x is empty (an absent variable is pure).
  bool is_pure(std::uint32_t var) const;

  /// Φ[x↦s]: drops clauses satisfied by s·x and strips ¬(s·x) from the rest.
  Formula assign(std::uint32_t var, int s) const;

  /// Sign of `var` in clause `c`, or 0 if absent.
  int sign_in(std::size_t c, std::uint32_t var) const;

 private:
  struct Index;
  const Index& index() const;
  void check_var(std::uint32_t var) const;

  unsigned k_;
  std::uint32_t n_;
  Width width_;
  std::vector<Clause> clauses_;
  std::shared_ptr<Index> index_;
};

/// Clauses compared as a multiset (each clause taken with sorted literals).
bool same_clause_multiset(const Formula& a, const Formula& b);

// ---------------------------------------------------------------- DIMACS I/O

enum class DimacsMode {
  strict,   ///< repeated variables and clause-count mismatches are errors
  lenient,  ///< duplicate literals merged, tautologies dropped, counts not checked
};

/// Reads `p cnf n m` followed by 0-terminated clauses; `c` lines are comments.
/// k is the common clause width (Width::exact) or the maximum width when the
/// widths differ (Width::reduced). Throws ParseError with the line number.
Formula read_dimacs(std::istream& in, DimacsMode mode = DimacsMode::strict);
Formula read_dimacs_file(const std::string& path, DimacsMode mode = DimacsMode::strict);

void write_dimacs(std::ostream& out, const Formula& f);
std::string to_dimacs(const Formula& f);

}  // namespace rscavity
