#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <new>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli/manifest.hpp"
#include "rscavity/cnf.hpp"
#include "rscavity/error.hpp"
#include "rscavity/exact.hpp"
#include "rscavity/gen.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/popdyn.hpp"
#include "rscavity/pulp.hpp"
#include "rscavity/rng.hpp"
#include "rscavity/selftest.hpp"
#include "rscavity/thresholds.hpp"
#include "rscavity/uniqueness.hpp"

namespace rscavity::cli {

namespace {

using nlohmann::json;

struct Output {
  std::string data;
  std::string summary;       // printed instead of data when data goes to --out
  std::string summary_path;  // optional file holding `summary`
  int exit_code = 0;
};

Output data_only(std::string data) {
  Output o;
  o.data = std::move(data);
  return o;
}

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string out_path;
  std::function<Output(RunManifest&)> produce;
};

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// shortest round-trip form
std::string short_num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

long long parse_int(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw InputError("bad " + what + ": '" + raw + "'");
  }
  return v;
}

// "−1,4" (ASCII or U+2212 minus) -> literals.
std::vector<Literal> parse_literals(std::string s) {
  for (std::size_t pos; (pos = s.find("\xE2\x88\x92")) != std::string::npos;) s.replace(pos, 3, "-");
  std::vector<Literal> lits;
  if (trim(s).empty()) return lits;
  for (const std::string& part : split(s, ',')) {
    const long long v = parse_int(part, "literal");
    if (v == 0) throw InputError("literal 0 is not allowed");
    lits.push_back(Literal::from_int(v));
  }
  return lits;
}

// "3", "2..8" or "2-8".
std::vector<unsigned> parse_k_range(const std::string& s) {
  std::string lo = s, hi = s;
  if (auto p = s.find(".."); p != std::string::npos) {
    lo = s.substr(0, p);
    hi = s.substr(p + 2);
  } else if (auto q = s.find('-'); q != std::string::npos && q > 0) {
    lo = s.substr(0, q);
    hi = s.substr(q + 1);
  }
  const long long a = parse_int(lo, "k range"), b = parse_int(hi, "k range");
  if (a < 2 || b < a || b > 64) throw InputError("k range must satisfy 2 <= lo <= hi <= 64");
  std::vector<unsigned> ks;
  for (long long k = a; k <= b; ++k) ks.push_back(static_cast<unsigned>(k));
  return ks;
}

std::vector<std::uint32_t> parse_n_list(const std::string& s) {
  std::vector<std::uint32_t> ns;
  for (const std::string& part : split(s, ',')) {
    const long long v = parse_int(part, "n");
    if (v < 1 || v > 1'000'000) throw InputError("n must lie in 1..1000000");
    ns.push_back(static_cast<std::uint32_t>(v));
  }
  return ns;
}

double parse_beta(const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw InputError("bad beta: '" + s + "'");
  return v;
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InputError("grid needs step > 0 and d-max >= d-min");
  const long long count = std::llround(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> g;
  // grid points snapped to 12 decimals so 3 * 0.2 prints as 0.6
  for (long long i = 0; i <= count; ++i) g.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  return g;
}

json report_json(const ThresholdReport& r) {
  return {{"value", r.value},           {"solver", to_string(r.solver)}, {"residual", r.residual},
          {"iterations", r.iterations}, {"bracket_lo", r.bracket_lo},   {"bracket_hi", r.bracket_hi}};
}

json literals_json(const std::vector<Literal>& lits) {
  json a = json::array();
  for (const Literal& l : lits) a.push_back(l.to_int());
  return a;
}

std::string gap_csv(const std::vector<GapStats>& stats) {
  std::ostringstream os;
  os << "depth,mean_gap,q95,std_error,min_gap,negative\n";
  for (const GapStats& g : stats) {
    os << g.depth << ',' << num(g.mean) << ',' << num(g.q95) << ',' << num(g.std_error) << ',' << num(g.min)
       << ',' << g.negative << '\n';
  }
  return os.str();
}

DimacsMode mode_of(bool lenient) { return lenient ? DimacsMode::lenient : DimacsMode::strict; }

// Parameters recorded in the manifest: every option of the leaf command
// except --out and --threads, explicit or defaulted.
void fill_manifest(const CLI::App* app, RunManifest& m) {
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out" || name == "threads") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    if (name == "seed") {
      m.has_seed = true;
      m.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
    }
    m.parameters.emplace_back(name, value);
  }
  std::sort(m.parameters.begin(), m.parameters.end());
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << data;
  if (!f) throw InputError("write failed for " + path);
}

class Registry {
 public:
  template <class Opts>
  std::shared_ptr<Opts> add(CLI::App* sub, const std::string& name,
                            std::function<Output(Opts&, RunManifest&)> fn) {
    auto opts = std::make_shared<Opts>();
    auto cmd = std::make_shared<Command>();
    cmd->app = sub;
    cmd->name = name;
    sub->add_option("--out", cmd->out_path, "Write data to this file (plus a .manifest.json sidecar)");
    if (fn) cmd->produce = [opts, fn](RunManifest& m) { return fn(*opts, m); };
    commands_.push_back(cmd);
    return opts;
  }

  const std::string* last_out_path() const { return &commands_.back()->out_path; }
  void set_last(std::function<Output(RunManifest&)> produce) { commands_.back()->produce = std::move(produce); }

  std::shared_ptr<Command> selected() const {
    for (const auto& c : commands_) {
      if (c->app->parsed()) {
        bool leaf = true;
        for (const CLI::App* child : c->app->get_subcommands({})) leaf = leaf && !child->parsed();
        if (leaf) return c;
      }
    }
    return nullptr;
  }

 private:
  std::vector<std::shared_ptr<Command>> commands_;
};

// ---- option blocks -------------------------------------------------------

struct ThresholdsOpts {
  unsigned k = 3;
  std::string all_k;
  std::string format = "csv";
};
struct Table1Opts {
  unsigned max_k = 5;
};
struct Figure1Opts {
  unsigned k = 3;
  double d_min = 0.0, d_max = 1.2, step = 0.2;
  std::size_t pop = 100000, mc = 100000;
  unsigned iters = 25;
  std::uint64_t seed = 1;
};
struct PopdynOpts {
  unsigned k = 3;
  double d = 1.0;
  std::size_t pop = 1000000;
  unsigned iters = 25;
  std::uint64_t seed = 1;
};
struct BetheOpts {
  std::string pop;
  unsigned k = 3;
  double d = 1.0;
  std::size_t mc = 1000000;
  std::string beta = "inf";
  std::uint64_t seed = 1;
  const CLI::Option* k_opt = nullptr;
  const CLI::Option* d_opt = nullptr;
};
struct CountOpts {
  std::string cnf, assume;
  bool lenient = false;
  unsigned cap = kDefaultComponentCap;
};
struct VerifyOpts {
  unsigned k = 3;
  double d = 1.0;
  std::string n = "12,16,20";
  std::size_t samples = 200, pop = 100000, mc = 100000;
  unsigned iters = 25, cap = kDefaultComponentCap;
  std::uint64_t seed = 1;
};
struct PulpRunOpts {
  std::string cnf, assume;
  bool lenient = false;
  unsigned cap = kDefaultComponentCap;
};
struct PulpHeightsOpts {
  std::string cnf;
  bool lenient = false;
};
struct PulpTailOpts {
  unsigned k = 3, hmax = 4, depth = 6;
  double d = 1.0;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
};
struct TreeMarginalOpts {
  unsigned k = 3, depth = 3;
  double d = 1.0;
  std::uint64_t seed = 1;
};
struct GapOpts {
  unsigned k = 3, depth = 4;
  double d = 1.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
};
struct ContractionOpts {
  unsigned k = 3;
  double d = 1.0, trunc = 50.0;
  std::size_t pop = 100000, trials = 20;
  std::uint64_t seed = 1;
};
struct IncrementOpts {
  unsigned k = 3, iters = 25, cap = kDefaultComponentCap;
  double d = 1.0;
  std::uint32_t n = 18;
  std::size_t samples = 200, pop = 100000, mc = 100000;
  std::uint64_t seed = 1;
};
struct SelftestOpts {
  std::uint64_t seed = 1;
  std::string fault;
};
struct GenFormulaOpts {
  unsigned k = 3;
  double d = 1.0;
  std::uint32_t n = 20;
  std::uint64_t seed = 1;
};
struct GenTreeOpts {
  unsigned k = 3, depth = 3;
  double d = 1.0;
  std::uint64_t seed = 1;
};

// ---- commands ------------------------------------------------------------

Output cmd_thresholds(ThresholdsOpts& o, RunManifest& m) {
  const std::vector<unsigned> ks = o.all_k.empty() ? std::vector<unsigned>{o.k} : parse_k_range(o.all_k);
  if (ks.front() < 2) throw InputError("k must be at least 2");
  if (o.format == "json") {
    json rows = json::array();
    for (unsigned k : ks) {
      json r = {{"k", k},
                {"d_giant", report_json(d_giant_report(k))},
                {"d_ms", report_json(d_ms(k))},
                {"d_con", report_json(d_con(k))},
                {"d_pure", report_json(d_pure(k))}};
      r["d_sat_ref"] = has_d_sat_reference(k) ? json(d_sat_reference(k).value) : json(nullptr);
      rows.push_back(r);
    }
    return data_only(finish_json({{"thresholds", rows}}, m));
  }
  std::ostringstream os;
  os << "k,d_giant,d_ms,d_con,d_pure,d_sat_ref\n";
  for (unsigned k : ks) {
    os << k << ',' << num(d_giant(k)) << ',' << num(d_ms(k).value) << ',' << num(d_con(k).value) << ','
       << num(d_pure(k).value) << ',' << (has_d_sat_reference(k) ? num(d_sat_reference(k).value) : "NA") << '\n';
  }
  return data_only(finish_csv(os.str(), m));
}

Output cmd_table1(Table1Opts& o, RunManifest& m) {
  if (o.max_k < 2) throw InputError("max-k must be at least 2");
  std::ostringstream os;
  os << "k,d_giant,d_ms,d_con,d_pure,d_sat\n";
  for (unsigned k = 2; k <= o.max_k; ++k) {
    os << k << ',' << fixed4(d_giant(k)) << ',' << fixed4(d_ms(k).value) << ',' << fixed4(d_con(k).value) << ','
       << fixed4(d_pure(k).value) << ',' << (has_d_sat_reference(k) ? d_sat_reference(k).display : "NA") << '\n';
  }
  return data_only(finish_csv(os.str(), m));
}

Output cmd_figure1(Figure1Opts& o, RunManifest& m) {
  if (o.k < 3) throw InputError("figure1 needs k >= 3");
  const std::vector<double> ds = grid(o.d_min, o.d_max, o.step);
  std::ostringstream os;
  os << "d,bethe,bethe_se,first_moment,second_moment\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const FixedPointBethe b = bethe_of_fixed_point(ds[i], o.k, o.pop, o.iters, o.mc, derive_seed(o.seed, "figure1", i));
    const MomentBounds mb = moment_bounds(ds[i], o.k);
    os << short_num(ds[i]) << ',' << num(b.estimate.value) << ',' << num(b.estimate.std_error) << ','
       << num(mb.first_moment) << ',' << num(mb.second_moment) << '\n';
  }
  return data_only(finish_csv(os.str(), m));
}

Output cmd_popdyn(PopdynOpts& o, RunManifest& m, const std::string& out_path) {
  if (out_path.empty()) throw InputError("popdyn requires --out");
  const IterateResult r = iterate(o.d, o.k, o.pop, o.iters, o.seed);
  std::ostringstream bin(std::ios::binary);
  write_population(bin, r.population);
  Output out;
  out.data = bin.str();
  m.digest = fnv_digest(out.data);
  json s = {{"k", o.k},
            {"d", o.d},
            {"pop", o.pop},
            {"iters", o.iters},
            {"mean", r.population.mean()},
            {"w1_trace", r.w1_trace},
            {"format", "float64-le"},
            {"manifest", m.to_json()}};
  out.summary = s.dump(2) + "\n";
  out.summary_path = out_path + ".json";
  return out;
}

void set_parameter(RunManifest& m, const std::string& name, const std::string& value) {
  for (auto& [key, v] : m.parameters) {
    if (key == name) v = value;
  }
}

// k and d not given on the command line come from the popdyn summary next to the file.
void resolve_population_params(BetheOpts& o, RunManifest& m) {
  const bool need_k = o.k_opt->count() == 0, need_d = o.d_opt->count() == 0;
  if (!need_k && !need_d) return;
  std::ifstream in(o.pop + ".json");
  if (!in) return;
  json s;
  try {
    s = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("unreadable population summary " + o.pop + ".json: " + e.what());
  }
  if (need_k && s.contains("k")) {
    o.k = s["k"].get<unsigned>();
    set_parameter(m, "k", std::to_string(o.k));
  }
  if (need_d && s.contains("d")) {
    o.d = s["d"].get<double>();
    set_parameter(m, "d", num(o.d));
  }
}

Output cmd_bethe(BetheOpts& o, RunManifest& m) {
  resolve_population_params(o, m);
  const Population pop = read_population_file(o.pop);
  const double beta = parse_beta(o.beta);
  const BetheEstimate e = bethe_beta(pop, o.d, o.k, beta, o.mc, o.seed);
  json j = {{"value", e.value},
            {"std_error", e.std_error},
            {"mc", e.mc_samples},
            {"variable_term", e.variable_term},
            {"clause_term", e.clause_term},
            {"coefficient", e.coefficient},
            {"degenerate", e.degenerate},
            {"population_size", pop.size()}};
  j["beta"] = std::isinf(beta) ? json("inf") : json(beta);
  return data_only(finish_json(j, m));
}

Output cmd_count(CountOpts& o, RunManifest& m) {
  const Formula f = read_dimacs_file(o.cnf, mode_of(o.lenient));
  const std::vector<Literal> lits = parse_literals(o.assume);
  const CountResult r = lits.empty() ? count(f, o.cap) : count_conditioned(f, lits, o.cap);
  json j = {{"n", f.num_vars()},
            {"m", f.num_clauses()},
            {"k", f.k()},
            {"count", r.count.str()},
            {"isolated", r.isolated},
            {"components", r.components}};
  j["log_count"] = r.count == 0 ? json("-inf") : json(r.log_count);
  if (!lits.empty()) j["assume"] = literals_json(lits);
  return data_only(finish_json(j, m));
}

Output cmd_verify(VerifyOpts& o, RunManifest& m) {
  const std::vector<std::uint32_t> ns = parse_n_list(o.n);
  const FixedPointBethe b = bethe_of_fixed_point(o.d, o.k, o.pop, o.iters, o.mc, derive_seed(o.seed, "verify.bethe"));
  json rows = json::array();
  std::vector<double> gaps;
  for (std::uint32_t n : ns) {
    const FreeEntropySample s =
        free_entropy_experiment(o.d, o.k, n, o.samples, derive_seed(o.seed, "verify.n", n), o.cap);
    const double gap = s.mean - b.estimate.value;
    gaps.push_back(std::fabs(gap));
    rows.push_back({{"n", n},
                    {"mean", s.mean},
                    {"std_error", s.std_error},
                    {"gap", gap},
                    {"abs_gap", std::fabs(gap)},
                    {"satisfiable", s.satisfiable},
                    {"sat_rate", static_cast<double>(s.satisfiable) / static_cast<double>(s.samples)}});
  }
  bool shrinking = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) shrinking = shrinking && gaps[i] < gaps[i - 1];
  json j = {{"bethe", {{"value", b.estimate.value}, {"std_error", b.estimate.std_error}}},
            {"rows", rows},
            {"gap_shrinking", shrinking}};
  return data_only(finish_json(j, m));
}

Output cmd_pulp_run(PulpRunOpts& o, RunManifest& m) {
  const Formula f = read_dimacs_file(o.cnf, mode_of(o.lenient));
  const std::vector<Literal> lits = parse_literals(o.assume);
  const ClosureResult r = pulp(f, lits);
  json trace = json::array();
  for (const PulpStep& s : r.trace) trace.push_back({{"clause", s.clause}, {"literal", s.added.to_int()}});
  json j = {{"assume", literals_json(lits)},
            {"contradiction", r.contradiction},
            {"closure", literals_json(r.closure)},
            {"closure_size", r.size(f.num_vars())},
            {"trace", trace}};
  if (r.contradiction_clause) j["contradiction_clause"] = *r.contradiction_clause;
  if (!r.contradiction) {
    const ClosureCheck c = check_closure(f, lits, r.closure);
    j["check"] = {{"superset", c.superset}, {"pulp1", c.pulp1}, {"pulp2", c.pulp2}};
    if (!c.ok()) throw InvariantError("closure fails PULP1/PULP2");
    try {
      const CountResult z = count(f, o.cap);
      const CountResult zl = count_conditioned(f, lits, o.cap);
      const BigInt bound = (BigInt(1) << r.closure.size()) * zl.count;
      const bool holds = z.count <= bound;
      j["bound"] = {{"z", z.count.str()}, {"z_assumed", zl.count.str()}, {"bound", bound.str()}, {"holds", holds}};
      if (!holds) throw InvariantError("Z exceeds 2^|closure| * Z(assumed)");
    } catch (const ResourceError& e) {
      j["bound"] = {{"skipped", e.what()}};
    }
  }
  return data_only(finish_json(j, m));
}

Output cmd_pulp_heights(PulpHeightsOpts& o, RunManifest& m) {
  const Formula f = read_dimacs_file(o.cnf, mode_of(o.lenient));
  HeightOracle h(f);
  auto show = [](Round r) { return r == kNever ? std::string("inf") : std::to_string(r); };
  std::ostringstream os;
  os << "var,h_plus,h_minus\n";
  for (std::uint32_t x = 1; x <= f.num_vars(); ++x) os << x << ',' << show(h(x, 1)) << ',' << show(h(x, -1)) << '\n';
  return data_only(finish_csv(os.str(), m));
}

Output cmd_pulp_tail(PulpTailOpts& o, RunManifest& m) {
  const HeightTail t = tree_height_tail_mc(o.d, o.k, o.hmax, o.depth, o.trials, o.seed);
  std::ostringstream os;
  os << "h,analytic,mc_plus,mc_minus,sigma\n";
  for (unsigned h = 0; h <= o.hmax; ++h) {
    os << h << ',' << num(t.analytic[h]) << ',' << num(t.empirical(h, 1)) << ',' << num(t.empirical(h, -1)) << ','
       << num(t.sigma(h)) << '\n';
  }
  return data_only(finish_csv(os.str(), m));
}

Output cmd_tree_marginal(TreeMarginalOpts& o, RunManifest& m) {
  const GWTree tree = sample_gw_tree(o.d, o.k, o.depth, o.seed);
  const TreeCountTable free_counts = tree_count(tree);
  const NodeAssignment tau = extremal_boundary(tree);
  const TreeCountTable pinned = tree_count(tree, tau);
  const EtaTable bp = eta_tree(tree, BoundaryMode::zero());
  const EtaTable cond = eta_tree(tree, BoundaryMode::plus_infinity());
  const Rational exact = free_counts.root_marginal();
  const Rational exact_cond = pinned.root_marginal();
  json j = {{"variables", tree.num_variables()},
            {"clauses", tree.num_clauses()},
            {"exact_marginal", exact.str()},
            {"exact_marginal_value", static_cast<double>(exact)},
            {"bp_marginal", bp.root_marginal()},
            {"conditioned_exact", exact_cond.str()},
            {"conditioned_exact_value", static_cast<double>(exact_cond)},
            {"conditioned_bp", cond.root_marginal()},
            {"eta_root", cond.root().str()}};
  return data_only(finish_json(j, m));
}

Output cmd_gap(GapOpts& o, RunManifest& m) {
  return data_only(finish_csv(gap_csv(boundary_influence_experiment(o.d, o.k, o.depth, o.trials, o.seed)), m));
}

Output cmd_contraction(ContractionOpts& o, RunManifest& m) {
  const ContractionEstimate e = contraction_estimate(o.d, o.k, o.pop, o.trials, o.seed, o.trunc);
  json j = {{"max_ratio", e.max_ratio}, {"mean_ratio", e.mean_ratio}, {"constant", e.constant},
            {"trials", e.trials},       {"skipped", e.skipped},       {"ratios", e.ratios},
            {"below_constant", e.max_ratio <= e.constant}};
  return data_only(finish_json(j, m));
}

Output cmd_increment(IncrementOpts& o, RunManifest& m) {
  const IncrementEstimate e = rs_increment_experiment(o.d, o.k, o.n, o.samples, o.seed, o.cap);
  const FixedPointBethe b =
      bethe_of_fixed_point(o.d, o.k, o.pop, o.iters, o.mc, derive_seed(o.seed, "increment.bethe"));
  const double z = e.std_error > 0 ? (e.mean - b.estimate.value) / e.std_error : 0.0;
  json j = {{"mean", e.mean},
            {"std_error", e.std_error},
            {"samples", e.samples},
            {"unsat_extended", e.unsat_extended},
            {"unsat_augmented", e.unsat_augmented},
            {"above_log2", e.above_log2},
            {"bethe", {{"value", b.estimate.value}, {"std_error", b.estimate.std_error}}},
            {"z_score", z}};
  return data_only(finish_json(j, m));
}

Output cmd_selftest(SelftestOpts& o, RunManifest& m) {
  if (!o.fault.empty() && o.fault != "threshold-constant") throw InputError("unknown fault '" + o.fault + "'");
  const SelftestReport r = run_selftest({o.seed, o.fault});
  Output out;
  out.data = r.text() + "digest: " + r.digest() + "\n" + (r.ok() ? "selftest: PASS\n" : "selftest: FAIL\n");
  m.digest = r.digest();
  out.exit_code = r.ok() ? 0 : 4;
  return out;
}

Output cmd_gen_formula(GenFormulaOpts& o, RunManifest&) {
  return data_only(to_dimacs(sample_formula(o.d, o.k, o.n, o.seed)));
}

Output cmd_gen_tree(GenTreeOpts& o, RunManifest&) {
  std::ostringstream os;
  write_tree(os, sample_gw_tree(o.d, o.k, o.depth, o.seed));
  return data_only(os.str());
}

template <class T>
void add_seed(CLI::App* sub, T& o) {
  sub->add_option("--seed", o.seed, "Random seed");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replica-symmetric random k-SAT toolkit", "rscavity"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));
  std::size_t threads = 0;
  CLI::Option* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = default)");
  Registry reg;

  {
    auto* sub = app.add_subcommand("thresholds", "Threshold formulas d_giant, d_MS, d_con, d_pure");
    auto o = reg.add<ThresholdsOpts>(sub, "thresholds", cmd_thresholds);
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    sub->add_option("--all-k", o->all_k, "Range lo..hi instead of --k");
    sub->add_option("--format", o->format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  {
    auto* sub = app.add_subcommand("table1", "Threshold table, four decimals");
    auto o = reg.add<Table1Opts>(sub, "table1", cmd_table1);
    sub->add_option("--max-k", o->max_k, "Last row")->check(CLI::Range(2u, 64u));
  }
  {
    auto* sub = app.add_subcommand("figure1", "Bethe free entropy against the moment bounds");
    auto o = reg.add<Figure1Opts>(sub, "figure1", cmd_figure1);
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(3u, 64u));
    sub->add_option("--d-min", o->d_min, "First density");
    sub->add_option("--d-max", o->d_max, "Last density");
    sub->add_option("--step", o->step, "Grid step");
    sub->add_option("--pop", o->pop, "Population size")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o->iters, "BP sweeps");
    sub->add_option("--mc", o->mc, "Monte Carlo samples for the Bethe functional")->check(CLI::PositiveNumber);
    add_seed(sub, *o);
  }
  {
    auto* sub = app.add_subcommand("popdyn", "Population dynamics for the BP fixed point");
    auto o = reg.add<PopdynOpts>(sub, "popdyn", nullptr);
    const std::string* out_path = reg.last_out_path();
    reg.set_last([o, out_path](RunManifest& m) { return cmd_popdyn(*o, m, *out_path); });
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    sub->add_option("--d", o->d, "Density");
    sub->add_option("--pop", o->pop, "Population size")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o->iters, "BP sweeps");
    add_seed(sub, *o);
  }
  {
    auto* sub = app.add_subcommand("bethe", "Bethe free entropy of a stored population");
    auto o = reg.add<BetheOpts>(sub, "bethe", cmd_bethe);
    sub->add_option("--pop", o->pop, "Population file (float64 little-endian)")->required();
    o->k_opt = sub->add_option("--k", o->k, "Clause length (default: from <pop>.json, else 3)")->check(CLI::Range(2u, 64u));
    o->d_opt = sub->add_option("--d", o->d, "Density (default: from <pop>.json, else 1)");
    sub->add_option("--mc", o->mc, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--beta", o->beta, "Inverse temperature, or inf");
    add_seed(sub, *o);
  }
  {
    auto* sub = app.add_subcommand("count", "Exact model count of a DIMACS formula");
    auto o = reg.add<CountOpts>(sub, "count", cmd_count);
    sub->add_option("--cnf", o->cnf, "DIMACS file")->required();
    sub->add_option("--assume", o->assume, "Comma-separated literals to condition on");
    sub->add_flag("--lenient", o->lenient, "Accept repeated literals and tautologies");
    sub->add_option("--cap", o->cap, "Largest component enumerated");
  }
  {
    auto* sub = app.add_subcommand("verify", "Exact (1/n) log Z against the Bethe prediction");
    auto o = reg.add<VerifyOpts>(sub, "verify", cmd_verify);
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    sub->add_option("--d", o->d, "Density");
    sub->add_option("--n", o->n, "Comma-separated variable counts");
    sub->add_option("--samples", o->samples, "Formulas per n")->check(CLI::PositiveNumber);
    sub->add_option("--pop", o->pop, "Population size")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o->iters, "BP sweeps");
    sub->add_option("--mc", o->mc, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--cap", o->cap, "Largest component enumerated");
    add_seed(sub, *o);
  }
  {
    auto* pulp_cmd = app.add_subcommand("pulp", "Pure-literal closure tools");
    pulp_cmd->require_subcommand(1);
    auto* run_cmd = pulp_cmd->add_subcommand("run", "Closure of an assumption set");
    auto r = reg.add<PulpRunOpts>(run_cmd, "pulp run", cmd_pulp_run);
    run_cmd->add_option("--cnf", r->cnf, "DIMACS file")->required();
    run_cmd->add_option("--assume", r->assume, "Comma-separated literals, e.g. --assume=-1,4");
    run_cmd->add_flag("--lenient", r->lenient, "Accept repeated literals and tautologies");
    run_cmd->add_option("--cap", r->cap, "Largest component enumerated for the count bound");
    auto* heights_cmd = pulp_cmd->add_subcommand("heights", "Height table of every variable");
    auto h = reg.add<PulpHeightsOpts>(heights_cmd, "pulp heights", cmd_pulp_heights);
    heights_cmd->add_option("--cnf", h->cnf, "DIMACS file")->required();
    heights_cmd->add_flag("--lenient", h->lenient, "Accept repeated literals and tautologies");
    auto* tail_cmd = pulp_cmd->add_subcommand("tail", "Root height tail on Galton-Watson trees");
    auto t = reg.add<PulpTailOpts>(tail_cmd, "pulp tail", cmd_pulp_tail);
    tail_cmd->add_option("--k", t->k, "Clause length")->check(CLI::Range(2u, 64u));
    tail_cmd->add_option("--d", t->d, "Density");
    tail_cmd->add_option("--hmax", t->hmax, "Largest height reported");
    tail_cmd->add_option("--depth", t->depth, "Tree depth");
    tail_cmd->add_option("--trials", t->trials, "Trees")->check(CLI::PositiveNumber);
    add_seed(tail_cmd, *t);
  }
  auto add_gap = [&](CLI::App* parent, const std::string& name) {
    auto* sub = parent->add_subcommand("boundary-gap", "Extremal-boundary influence on the root marginal");
    auto o = reg.add<GapOpts>(sub, name, cmd_gap);
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    sub->add_option("--d", o->d, "Density");
    sub->add_option("--depth", o->depth, "Largest depth")->check(CLI::Range(1u, 64u));
    sub->add_option("--trials", o->trials, "Trees per depth")->check(CLI::PositiveNumber);
    add_seed(sub, *o);
  };
  {
    auto* tree_cmd = app.add_subcommand("tree", "Galton-Watson tree experiments");
    tree_cmd->require_subcommand(1);
    auto* marg = tree_cmd->add_subcommand("marginal", "Exact and BP root marginals of one tree");
    auto o = reg.add<TreeMarginalOpts>(marg, "tree marginal", cmd_tree_marginal);
    marg->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    marg->add_option("--d", o->d, "Density");
    marg->add_option("--depth", o->depth, "Tree depth");
    add_seed(marg, *o);
    add_gap(tree_cmd, "tree boundary-gap");
  }
  {
    auto* uniq_cmd = app.add_subcommand("uniq", "Gibbs uniqueness machinery");
    uniq_cmd->require_subcommand(1);
    auto* con = uniq_cmd->add_subcommand("contraction", "Empirical contraction ratio of the typed operator");
    auto o = reg.add<ContractionOpts>(con, "uniq contraction", cmd_contraction);
    con->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    con->add_option("--d", o->d, "Density");
    con->add_option("--pop", o->pop, "Population size")->check(CLI::PositiveNumber);
    con->add_option("--trials", o->trials, "Random pairs")->check(CLI::PositiveNumber);
    con->add_option("--trunc", o->trunc, "Clip samples to [-M, M] in the metric");
    add_seed(con, *o);
    add_gap(uniq_cmd, "uniq boundary-gap");
  }
  {
    auto* sub = app.add_subcommand("increment", "Free-entropy increment on coupled formulas");
    auto o = reg.add<IncrementOpts>(sub, "increment", cmd_increment);
    sub->add_option("--k", o->k, "Clause length")->check(CLI::Range(2u, 64u));
    sub->add_option("--d", o->d, "Density");
    sub->add_option("--n", o->n, "Variables")->check(CLI::Range(1u, 1000000u));
    sub->add_option("--samples", o->samples, "Coupled samples")->check(CLI::PositiveNumber);
    sub->add_option("--pop", o->pop, "Population size")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o->iters, "BP sweeps");
    sub->add_option("--mc", o->mc, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--cap", o->cap, "Largest component enumerated");
    add_seed(sub, *o);
  }
  {
    auto* sub = app.add_subcommand("selftest", "Invariant checks across all modules");
    auto o = reg.add<SelftestOpts>(sub, "selftest", cmd_selftest);
    add_seed(sub, *o);
    sub->add_option("--inject-fault", o->fault, "threshold-constant");
  }
  {
    auto* gen_cmd = app.add_subcommand("generate", "Sample instances");
    gen_cmd->require_subcommand(1);
    auto* formula = gen_cmd->add_subcommand("formula", "Random k-CNF in DIMACS");
    auto f = reg.add<GenFormulaOpts>(formula, "generate formula", cmd_gen_formula);
    formula->add_option("--k", f->k, "Clause length")->check(CLI::Range(2u, 64u));
    formula->add_option("--d", f->d, "Density");
    formula->add_option("--n", f->n, "Variables");
    add_seed(formula, *f);
    auto* tree = gen_cmd->add_subcommand("tree", "Galton-Watson tree");
    auto t = reg.add<GenTreeOpts>(tree, "generate tree", cmd_gen_tree);
    tree->add_option("--k", t->k, "Clause length")->check(CLI::Range(2u, 64u));
    tree->add_option("--d", t->d, "Density");
    tree->add_option("--depth", t->depth, "Tree depth");
    add_seed(tree, *t);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (threads_opt->count() > 0) set_max_threads(threads);

  const std::shared_ptr<Command> cmd = reg.selected();
  if (!cmd) throw InputError("no command selected");

  RunManifest manifest;
  manifest.command = cmd->name;
  fill_manifest(cmd->app, manifest);

  const auto t0 = std::chrono::steady_clock::now();
  const Output result = cmd->produce(manifest);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (cmd->out_path.empty()) {
    out << result.data;
  } else {
    write_file(cmd->out_path, result.data);
    write_sidecar(cmd->out_path, manifest, wall);
    if (!result.summary_path.empty()) write_file(result.summary_path, result.summary);
    if (!result.summary.empty()) {
      out << result.summary;
    } else {
      out << "wrote " << cmd->out_path << '\n';
    }
  }
  return result.exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << '\n';
    return 3;
  } catch (const std::bad_alloc&) {
    err << "resource cap: out of memory\n";
    return 3;
  } catch (const InvariantError& e) {
    err << "invariant failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "invariant failure: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace rscavity::cli
