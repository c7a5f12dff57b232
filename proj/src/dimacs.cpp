#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rscavity/cnf.hpp"
#include "rscavity/error.hpp"

namespace rscavity {

namespace {

std::int64_t parse_int(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Formula read_dimacs(std::istream& in, DimacsMode mode) {
  const bool strict = mode == DimacsMode::strict;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<Clause> clauses;
  Clause current;
  std::size_t current_line = 0;

  auto finish_clause = [&](std::size_t at) {
    if (current.empty()) throw ParseError(at, "empty clause");
    std::vector<Literal> sorted = current;
    std::sort(sorted.begin(), sorted.end());
    bool tautology = false;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].var != sorted[i - 1].var) continue;
      if (strict) throw ParseError(at, "repeated variable " + std::to_string(sorted[i].var));
      if (sorted[i].sign != sorted[i - 1].sign) tautology = true;
    }
    if (!strict) {
      // merge duplicate literals, keeping first-occurrence order
      Clause dedup;
      for (const Literal& l : current) {
        if (std::find(dedup.begin(), dedup.end(), l) == dedup.end()) dedup.push_back(l);
      }
      current = std::move(dedup);
    }
    if (!tautology) clauses.push_back(std::move(current));
    current.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    const auto first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    if (sv.front() == 'c') continue;
    if (sv.front() == '%') break;  // SATLIB trailer
    if (sv.front() == 'p') {
      if (have_header) throw ParseError(lineno, "duplicate header");
      std::istringstream hs{std::string(sv)};
      std::string p, fmt;
      if (!(hs >> p >> fmt >> n >> m) || p != "p" || fmt != "cnf" || n < 0 || m < 0) {
        throw ParseError(lineno, "malformed header, expected 'p cnf <vars> <clauses>'");
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "clause before 'p cnf' header");
    std::size_t pos = 0;
    while (pos < sv.size()) {
      while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t' || sv[pos] == '\r')) ++pos;
      if (pos >= sv.size()) break;
      std::size_t end = pos;
      while (end < sv.size() && sv[end] != ' ' && sv[end] != '\t' && sv[end] != '\r') ++end;
      const std::int64_t v = parse_int(sv.substr(pos, end - pos), lineno);
      pos = end;
      if (v == 0) {
        finish_clause(lineno);
        continue;
      }
      if (std::abs(v) > n) {
        throw ParseError(lineno, "literal " + std::to_string(v) + " exceeds declared variable count " +
                                     std::to_string(n));
      }
      if (current.empty()) current_line = lineno;
      current.push_back(Literal::from_int(v));
    }
  }
  if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing 'p cnf' header");
  if (!current.empty()) {
    if (strict) throw ParseError(current_line, "clause not terminated by 0");
    finish_clause(current_line);
  }
  if (strict && static_cast<std::int64_t>(clauses.size()) != m) {
    throw ParseError(lineno, "header declares " + std::to_string(m) + " clauses, found " +
                                 std::to_string(clauses.size()));
  }

  std::size_t min_w = clauses.empty() ? 0 : clauses.front().size();
  std::size_t max_w = min_w;
  for (const Clause& c : clauses) {
    min_w = std::min(min_w, c.size());
    max_w = std::max(max_w, c.size());
  }
  const bool uniform = !clauses.empty() && min_w == max_w && max_w >= 2;
  const unsigned k = static_cast<unsigned>(std::max<std::size_t>(2, max_w));
  return Formula(k, static_cast<std::uint32_t>(n), std::move(clauses),
                 uniform ? Width::exact : Width::reduced);
}

Formula read_dimacs_file(const std::string& path, DimacsMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_dimacs(in, mode);
}

void write_dimacs(std::ostream& out, const Formula& f) {
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const Clause& c : f.clauses()) {
    for (const Literal& l : c) out << l.to_int() << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const Formula& f) {
  std::ostringstream os;
  write_dimacs(os, f);
  return os.str();
}

}  // namespace rscavity
