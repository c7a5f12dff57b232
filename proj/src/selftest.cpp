#include "rscavity/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "rscavity/exact.hpp"
#include "rscavity/gen.hpp"
#include "rscavity/popdyn.hpp"
#include "rscavity/pulp.hpp"
#include "rscavity/rng.hpp"
#include "rscavity/thresholds.hpp"
#include "rscavity/uniqueness.hpp"

namespace rscavity {

namespace {

struct TableRow {
  unsigned k;
  double giant, ms, con, pure;
};

// Four-decimal reference values.
constexpr TableRow kTable[] = {
    {2, 1.0000, 1.1625, 2.0000, 2.0000},
    {3, 0.5000, 0.8792, 1.3431, 4.9108},
    {4, 0.3333, 0.8695, 1.2451, 6.1782},
    {5, 0.2500, 0.9236, 1.2635, 7.0178},
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

class Runner {
 public:
  void check(const std::string& name, const std::function<std::string(bool&)>& body) {
    SelftestCheck c{name, true, ""};
    try {
      c.detail = body(c.pass);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    report.checks.push_back(std::move(c));
  }
  SelftestReport report;
};

}  // namespace

bool SelftestReport::ok() const {
  for (const SelftestCheck& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

std::string SelftestReport::text() const {
  std::ostringstream os;
  for (const SelftestCheck& c : checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  return os.str();
}

std::string SelftestReport::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stream_tag(text())));
  return buf;
}

SelftestReport run_selftest(const SelftestOptions& options) {
  Runner r;
  const std::uint64_t seed = options.seed;
  TableRow k3 = kTable[1];
  if (options.fault == "threshold-constant") k3.con += 0.01;
  const TableRow rows[] = {kTable[0], k3, kTable[2], kTable[3]};

  for (const char* which : {"giant", "ms", "con", "pure"}) {
    r.check(std::string("table1.d_") + which, [&](bool& pass) {
      double worst = 0.0;
      for (const TableRow& row : rows) {
        double got = 0.0, want = 0.0;
        const std::string w = which;
        if (w == "giant") got = d_giant(row.k), want = row.giant;
        if (w == "ms") got = d_ms(row.k).value, want = row.ms;
        if (w == "con") got = d_con(row.k).value, want = row.con;
        if (w == "pure") got = d_pure(row.k).value, want = row.pure;
        worst = std::max(worst, std::fabs(got - want));
      }
      pass = worst <= 5e-5;
      return fmt("max deviation %.3g", worst);
    });
  }

  r.check("thresholds.ordering", [&](bool& pass) {
    for (unsigned k = 2; k <= 12; ++k) {
      const double g = d_giant(k), ms = d_ms(k).value, con = d_con(k).value, pure = d_pure(k).value;
      if (!(g < ms && ms < con && con <= pure + 1e-12)) {
        pass = false;
        return "violated at k=" + std::to_string(k);
      }
    }
    return std::string("giant < ms < con <= pure for k=2..12");
  });

  r.check("thresholds.moment_bounds", [&](bool& pass) {
    for (unsigned k = 3; k <= 5; ++k) {
      for (int i = 0; i <= 100; ++i) {
        const MomentBounds b = moment_bounds(5.0 * i / 100.0, k);
        if (b.second_moment > b.first_moment + 1e-12) {
          pass = false;
          return "second > first at k=" + std::to_string(k);
        }
      }
    }
    return std::string("second <= first on grid");
  });

  r.check("exact.small_counts", [&](bool& pass) {
    const Formula one(3, 3, {{{1, 1}, {2, 1}, {3, 1}}});
    std::vector<Clause> all8;
    for (int m = 0; m < 8; ++m) all8.push_back({{1, m & 1 ? 1 : -1}, {2, m & 2 ? 1 : -1}, {3, m & 4 ? 1 : -1}});
    const bool ok = count(one).count == 7 && count(Formula(3, 3, all8)).count == 0 &&
                    count(Formula(3, 5, {})).count == 32;
    pass = ok;
    return std::string("Z = 7, 0, 32");
  });

  r.check("exact.tree_recursion", [&](bool& pass) {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 30; ++t) {
      const GWTree tree = sample_gw_tree(1.2, 3, 2, derive_seed(seed, "selftest.tree", t));
      const TreeFormula tf = tree_to_formula(tree);
      const CountResult z = count(tf.formula);
      const TreeCountTable table = tree_count(tree);
      if (table.total() != z.count) {
        pass = false;
        return "root total differs from enumeration on tree " + std::to_string(t);
      }
      const double exact = marginals(tf.formula).value.front();
      worst = std::max(worst, std::fabs(eta_tree(tree, BoundaryMode::zero()).root_marginal() - exact));
    }
    pass = worst < 1e-10;
    return fmt("max |marginal error| %.3g over 30 trees", worst);
  });

  r.check("pulp.closure_bound", [&](bool& pass) {
    std::size_t closures = 0;
    for (std::uint64_t t = 0; t < 30; ++t) {
      const std::uint64_t s = derive_seed(seed, "selftest.pulp", t);
      const Formula f = sample_formula(1.0, 3, 14, s);
      Stream rng(s, "assume");
      const Literal a{static_cast<std::uint32_t>(1 + rng.below(14)), rng.sign()};
      Literal b{static_cast<std::uint32_t>(1 + rng.below(14)), rng.sign()};
      if (b.var == a.var) b.sign = a.sign;
      const std::vector<Literal> init = {a, b};
      const ClosureResult res = pulp(f, init);
      if (res.contradiction) continue;
      ++closures;
      if (!verify_closure(f, init, res.closure)) {
        pass = false;
        return "closure check failed on instance " + std::to_string(t);
      }
      const BigInt lhs = count(f).count;
      const BigInt rhs = (BigInt(1) << res.closure.size()) * count_conditioned(f, init).count;
      if (lhs > rhs) {
        pass = false;
        return "Z > 2^|closure| Z(L) on instance " + std::to_string(t);
      }
    }
    return std::to_string(closures) + " closures verified";
  });

  r.check("pulp.elimination_example", [&](bool& pass) {
    const Formula f(3, 6, {{{1, 1}, {2, 1}, {3, 1}}, {{1, -1}, {4, 1}, {5, 1}}, {{2, -1}, {5, 1}, {6, 1}},
                           {{3, -1}, {6, 1}, {4, 1}}});
    const EliminationTrace tr = eliminate(f);
    pass = tr.round_of_clause == std::vector<Round>{2, 1, 1, 1} && height(f, 1, 1) == 1 && height(f, 1, -1) == 2;
    return std::string("rounds 2,1,1,1; heights 1,2");
  });

  r.check("popdyn.bp_symmetry", [&](bool& pass) {
    const IterateResult it = iterate(1.0, 3, 20000, 5, seed);
    const double mean = it.population.mean();
    const double se = it.population.std_error();
    pass = std::fabs(mean - 0.5) < 4.0 * se + 1e-12;
    return fmt("mean %.5f, se %.2g", mean, se);
  });

  r.check("popdyn.bethe_d0", [&](bool& pass) {
    const BetheEstimate e = bethe(Population::constant(100, 0.5), 0.0, 3, 1000, seed);
    pass = std::fabs(e.value - std::numbers::ln2) < 1e-12;
    return fmt("value %.15f", e.value);
  });

  r.check("uniqueness.extremal_satisfies", [&](bool& pass) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      const GWTree tree = sample_gw_tree(1.5, 3, 3, derive_seed(seed, "selftest.tau", t));
      const NodeAssignment tau = extremal_boundary(tree);
      const TreeFormula tf = tree_to_formula(tree);
      for (const Clause& c : tf.formula.clauses()) {
        bool sat = false;
        for (const Literal& l : c) sat |= tau[tf.node_of_var[l.var - 1]] == l.sign;
        if (!sat) {
          pass = false;
          return "unsatisfied clause in tree " + std::to_string(t);
        }
      }
    }
    return std::string("100 trees");
  });

  r.check("uniqueness.psi_phi", [&](bool& pass) {
    const PsiPhi a = psi_phi(1.0, 0.3);
    const PsiPhi b = psi_phi(0.5, 0.5);
    pass = std::fabs(a.psi - 0.3) < 1e-15 && std::fabs(b.phi - b.phi_max) < 1e-15 &&
           std::fabs(b.phi_max - 1.0 / 3.0) < 1e-15;
    return fmt("psi_1(0.3)=%.3f, phi_max(1/2)=%.6f", a.psi, b.phi_max);
  });

  r.check("uniqueness.contraction_constant", [&](bool& pass) {
    const double c = contraction_constant(1.0, 3);
    pass = std::fabs(c - 0.696735) < 5e-7 && std::fabs(contraction_constant(d_con(3).value, 3) - 1.0) < 1e-10;
    return fmt("c(1,3) = %.6f", c);
  });

  return r.report;
}

}  // namespace rscavity
