// bann: batch front-end for the annihilation laboratory.
//
// Every subcommand renders its complete output into memory first and writes
// it in one go, so a failing run never leaves a partial file behind.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bann/checks.hpp"
#include "bann/engine.hpp"
#include "bann/estimators.hpp"
#include "bann/exactpoly.hpp"
#include "bann/explorer.hpp"
#include "bann/lattice.hpp"
#include "bann/parallel.hpp"
#include "bann/report.hpp"
#include "bann/reversal.hpp"

using namespace bann;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSelftest = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::vector<double> p;
  std::string p_grid;
  std::size_t k = 0;
  std::vector<std::size_t> k_schedule;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  std::string format = "csv";
  // Subcommand specific.
  std::size_t kmax = 3;
  std::string tol = "1/1000000";
  std::size_t iters = 10;
  std::size_t budget = kDefaultExtensionBudget;
  std::string estimators = "q,r,theta";
  std::string mode = "continuous";
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--p-grid expects lo:hi:step");
  double lo, hi, step;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    step = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--p-grid: malformed number in `" + text + "`");
  }
  if (!(step > 0.0) || !(hi >= lo)) throw UsageError("--p-grid needs step > 0 and hi >= lo");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    // Round away accumulated binary noise so grid values print cleanly.
    const double v = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    if (v > hi + 1e-12) break;
    out.push_back(v);
    if (out.size() > 100000) throw UsageError("--p-grid has too many points");
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Command {
 public:
  Command(CLI::App& app, std::string name, std::string description, Flags& flags)
      : flags_(flags), name_(std::move(name)) {
    sub_ = app.add_subcommand(name_, std::move(description));
  }
  CLI::App* sub() const { return sub_; }
  const std::string& name() const { return name_; }

  Command& p_flags() {
    sub_->add_option("--p", flags_.p, "Stationary probability (repeatable)")->check(CLI::Range(0.0, 1.0));
    sub_->add_option("--p-grid", flags_.p_grid, "Grid lo:hi:step of p values");
    return *this;
  }
  Command& k_flags() {
    sub_->add_option("--k", flags_.k, "Window size (particles)");
    sub_->add_option("--k-schedule", flags_.k_schedule, "Comma-separated window sizes")->delimiter(',');
    return *this;
  }
  Command& trial_flags() {
    sub_->add_option("--trials", flags_.trials, "Number of trials")->required();
    sub_->add_option("--seed", flags_.seed, "Master seed")->required();
    return *this;
  }
  Command& output_flags() {
    sub_->add_option("--workers", flags_.workers, "Worker threads")->check(CLI::Range(1, 1024));
    sub_->add_option("--out", flags_.out, "Output file (default: standard output)");
    sub_->add_option("--format", flags_.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    return *this;
  }

 private:
  Flags& flags_;
  std::string name_;
  CLI::App* sub_ = nullptr;
};

RunSpec make_spec(const std::string& subcommand, const Flags& f) {
  RunSpec spec;
  spec.subcommand = subcommand;
  spec.p_values = f.p;
  if (!f.p_grid.empty()) {
    const auto grid = parse_grid(f.p_grid);
    spec.p_values.insert(spec.p_values.end(), grid.begin(), grid.end());
  }
  if (f.k) spec.ks.push_back(f.k);
  spec.ks.insert(spec.ks.end(), f.k_schedule.begin(), f.k_schedule.end());
  spec.trials = f.trials;
  spec.seed = f.seed;
  spec.workers = f.workers;
  spec.out = f.out;
  spec.format = f.format;
  return spec;
}

void require_p(const RunSpec& spec, bool open_unit = false) {
  if (spec.p_values.empty()) throw UsageError(spec.subcommand + ": give --p or --p-grid");
  for (double p : spec.p_values) {
    if (!(p > 0.0 && p <= 1.0)) throw UsageError("p values must lie in (0, 1]");
    if (open_unit && p == 1.0) throw UsageError(spec.subcommand + ": p must lie in (0, 1)");
  }
}

void require_k(const RunSpec& spec, std::size_t min_k = 1) {
  if (spec.ks.empty()) throw UsageError(spec.subcommand + ": give --k or --k-schedule");
  for (std::size_t k : spec.ks) {
    if (k < min_k) throw UsageError(spec.subcommand + ": k must be at least " + std::to_string(min_k));
  }
}

void require_trials(const RunSpec& spec) {
  if (spec.trials == 0) throw UsageError("--trials must be at least 1");
}

Mode parse_mode(const std::string& m) {
  if (m == "continuous") return Mode::Continuous;
  if (m == "lattice") return Mode::Lattice;
  throw UsageError("--mode must be continuous or lattice");
}

std::string run_simulate(RunSpec& spec, const Flags& f) {
  require_p(spec);
  require_k(spec);
  require_trials(spec);
  const auto wanted = split(f.estimators, ',');
  for (const auto& w : wanted) {
    if (w != "q" && w != "r" && w != "theta" && w != "leftmovers") {
      throw UsageError("--estimators takes a list from q,r,theta,leftmovers");
    }
  }
  spec.options["estimators"] = f.estimators;
  auto has = [&](const char* name) { return std::find(wanted.begin(), wanted.end(), name) != wanted.end(); };

  std::vector<Estimate> rows;
  Json extra = Json::array();
  for (double p : spec.p_values) {
    const ModelParams mp{p};
    if (has("q")) {
      if (spec.ks.size() > 1) {
        const QkCurve curve = qk_schedule(mp, spec.ks, spec.trials, spec.seed, spec.workers);
        rows.insert(rows.end(), curve.estimates.begin(), curve.estimates.end());
        extra.push_back({{"p", p}, {"monotonicity_violations", curve.monotonicity_violations}});
      } else {
        rows.push_back(estimate_qk(mp, spec.ks[0], spec.trials, spec.seed, spec.workers));
      }
    }
    for (std::size_t k : spec.ks) {
      if (has("r") && k >= 2) rows.push_back(estimate_r(mp, k, spec.trials, spec.seed, spec.workers));
      if (has("theta")) {
        const ThetaEstimate t = estimate_theta(mp, k, spec.trials, spec.seed, spec.workers);
        rows.push_back(t.lower);
        rows.push_back(t.upper);
      }
      if (has("leftmovers")) {
        const LeftmoverDistribution d = leftmover_count_distribution(mp, k, spec.trials, spec.seed, spec.workers);
        Estimate e;
        e.estimator = "leftmover_mean";
        e.value = d.mean;
        e.std_error = d.mean_stderr;
        e.n_trials = d.trials;
        e.master_seed = spec.seed;
        e.p = p;
        e.k = k;
        rows.push_back(e);
        extra.push_back({{"p", p}, {"k", k}, {"leftmovers", to_json(d)}});
      }
    }
  }
  std::ostringstream os;
  if (spec.format == "json") {
    Json j = envelope(spec, "estimates");
    Json list = Json::array();
    for (const auto& e : rows) list.push_back(to_json(e));
    j["estimates"] = list;
    j["details"] = extra;
    os << j.dump(2) << '\n';
  } else {
    write_csv_preamble(os, spec);
    write_estimate_header(os);
    for (const auto& e : rows) write_estimate_row(os, e);
  }
  return os.str();
}

std::string run_identities(RunSpec& spec) {
  require_p(spec, true);
  require_k(spec, 2);
  require_trials(spec);
  std::vector<IdentityReport> reports;
  for (double p : spec.p_values) {
    for (std::size_t k : spec.ks) reports.push_back(check_identities(p, k, spec.trials, spec.seed, spec.workers));
  }
  std::ostringstream os;
  if (spec.format == "json") {
    Json j = envelope(spec, "identity_reports");
    Json list = Json::array();
    for (const auto& r : reports) list.push_back(to_json(r));
    j["reports"] = list;
    os << j.dump(2) << '\n';
  } else {
    write_csv_preamble(os, spec);
    os << "p,k,trials,seed,identity,lhs,rhs,stderr,z,pass,censored_fraction\n";
    for (const auto& r : reports) {
      for (const auto& c : r.checks) {
        os << format_double(r.p) << ',' << r.k << ',' << r.trials << ',' << r.seed << ',' << c.name << ','
           << format_double(c.lhs) << ',' << format_double(c.rhs) << ',' << format_double(c.std_error) << ','
           << format_double(c.z) << ',' << (c.pass ? 1 : 0) << ',' << format_double(r.censored_fraction) << '\n';
      }
    }
  }
  return os.str();
}

std::string run_scan_pc(RunSpec& spec, const Flags& f) {
  if (f.kmax == 0 || f.kmax > kSymbolicCap) {
    throw UsageError("--kmax must lie in 1.." + std::to_string(kSymbolicCap));
  }
  Rational tol;
  try {
    tol = parse_rational(f.tol);
  } catch (const Error& e) {
    throw UsageError(std::string("--tol: ") + e.what());
  }
  if (tol <= 0) throw UsageError("--tol must be positive");
  spec.options["kmax"] = std::to_string(f.kmax);
  spec.options["tol"] = to_string(tol);
  const auto rows = pc_upper_bound_scan(f.kmax, tol, spec.workers);
  std::ostringstream os;
  if (spec.format == "json") {
    Json j = envelope(spec, "root_table");
    Json list = Json::array();
    for (const auto& r : rows) {
      Json row{{"k", r.k}};
      if (r.root) {
        row["lo"] = to_string(r.root->lo);
        row["hi"] = to_string(r.root->hi);
        row["lo_decimal"] = to_double(r.root->lo);
        row["hi_decimal"] = to_double(r.root->hi);
      } else {
        row["lo"] = nullptr;
        row["hi"] = nullptr;
      }
      list.push_back(row);
    }
    j["rows"] = list;
    os << j.dump(2) << '\n';
  } else {
    write_csv_preamble(os, spec);
    write_root_table(os, rows);
  }
  return os.str();
}

std::string run_polynomial(RunSpec& spec) {
  require_k(spec);
  for (std::size_t k : spec.ks) {
    if (k > kSymbolicCap) throw UsageError("polynomial: k must be at most " + std::to_string(kSymbolicCap));
  }
  std::ostringstream os;
  Json list = Json::array();
  if (spec.format != "json") {
    write_csv_preamble(os, spec);
    os << "quantity,k,coefficients,latex\n";
  }
  for (std::size_t k : spec.ks) {
    const ExactTables t = exact_tables(k, spec.workers);
    const std::pair<const char*, const RationalPoly*> items[] = {{"E[N_k]", &t.expected_n}, {"q_k", &t.q}};
    for (const auto& [name, poly] : items) {
      if (spec.format == "json") {
        list.push_back({{"quantity", name}, {"k", k}, {"coefficients", poly->to_fraction_list()}, {"latex", poly->to_latex()}});
      } else {
        os << name << ',' << k << ",\"" << poly->to_fraction_list() << "\",\"" << poly->to_latex() << "\"\n";
      }
    }
  }
  if (spec.format == "json") {
    Json j = envelope(spec, "polynomials");
    j["polynomials"] = list;
    os << j.dump(2) << '\n';
  }
  return os.str();
}

std::string run_explore(RunSpec& spec, const Flags& f) {
  require_p(spec);
  require_k(spec);
  if (spec.ks.size() != 1) throw UsageError("explore: give a single --k");
  if (spec.trials == 0) spec.trials = 1;
  if (f.iters == 0) throw UsageError("--iters must be positive");
  spec.options["iters"] = std::to_string(f.iters);
  spec.options["budget"] = std::to_string(f.budget);
  const std::size_t k = spec.ks[0];
  std::ostringstream os;
  Json traces = Json::array();
  if (spec.format != "json") write_csv_preamble(os, spec);
  for (double p : spec.p_values) {
    const ModelParams mp{p};
    const auto results = map_trials<ExplorationTrace>(spec.trials, spec.workers, [&](std::uint64_t t) {
      return explore_blocks(mp, k, f.iters, derive_stream(spec.seed, t), f.budget);
    });
    for (std::size_t t = 0; t < results.size(); ++t) {
      const bool cert = survival_certificate(results[t], k);
      if (spec.format == "json") {
        Json j = to_json(results[t]);
        j["p"] = p;
        j["trace"] = t;
        j["certificate"] = cert;
        traces.push_back(j);
      } else {
        os << "# p=" << format_double(p) << " trace=" << t << " certificate=" << (cert ? 1 : 0) << '\n';
        write_trace_csv(os, results[t]);
      }
    }
  }
  if (spec.format == "json") {
    Json j = envelope(spec, "exploration_traces");
    j["traces"] = traces;
    os << j.dump(2) << '\n';
  }
  return os.str();
}

std::string run_reversal(RunSpec& spec, const Flags& f) {
  require_p(spec);
  require_k(spec, 2);
  require_trials(spec);
  const Mode mode = parse_mode(f.mode);
  spec.options["mode"] = f.mode;
  std::ostringstream os;
  Json reports = Json::array();
  if (spec.format != "json") {
    write_csv_preamble(os, spec);
    os << "p,k,trials,in_a,in_b,censored,forward_fail,backward_fail,conditioned,halving_freq,halving_z,"
          "base,base_z,ks_p_value\n";
  }
  for (double p : spec.p_values) {
    for (std::size_t k : spec.ks) {
      const ModelParams mp{p, mode};
      const BijectionTally t = bijection_run(mp, k, spec.trials, spec.seed, spec.workers);
      const HalvingReport h = verify_halving(mp, k, spec.trials, spec.seed, spec.workers);
      if (spec.format == "json") {
        reports.push_back({{"bijection", to_json(t)}, {"halving", to_json(h)}});
      } else {
        os << format_double(p) << ',' << k << ',' << spec.trials << ',' << t.in_a << ',' << t.in_b << ','
           << t.censored << ',' << t.forward_fail << ',' << t.backward_fail << ',' << h.conditioned << ','
           << format_double(h.halving.lhs) << ',' << format_double(h.halving.z) << ','
           << format_double(h.base.lhs) << ',' << format_double(h.base.z) << ','
           << format_double(h.distance_test.p_value) << '\n';
      }
    }
  }
  if (spec.format == "json") {
    Json j = envelope(spec, "reversal_reports");
    j["reports"] = reports;
    os << j.dump(2) << '\n';
  }
  return os.str();
}

std::string run_lattice(RunSpec& spec) {
  require_p(spec);
  require_k(spec, 2);
  require_trials(spec);
  std::ostringstream os;
  Json list = Json::array();
  if (spec.format != "json") {
    write_csv_preamble(os, spec);
    write_lattice_header(os);
  }
  for (double p : spec.p_values) {
    for (std::size_t k : spec.ks) {
      const LatticeStats s = lattice_run(p, k, spec.trials, spec.seed, spec.workers);
      if (spec.format == "json") {
        const LatticeComparison c = compare_with_continuous(s);
        Json j = to_json(s);
        j["identities"] = to_json(verify_lattice_identity(s));
        j["comparison"] = {{"r_gap_z", c.r_gap_z},
                           {"psi_margin_z", c.psi_margin_z},
                           {"theta_continuous", c.theta_continuous},
                           {"dichotomy_consistent", c.dichotomy_consistent}};
        list.push_back(j);
      } else {
        write_lattice_row(os, s);
      }
    }
  }
  if (spec.format == "json") {
    Json j = envelope(spec, "lattice");
    j["runs"] = list;
    os << j.dump(2) << '\n';
  }
  return os.str();
}

std::string render_selftest(const RunSpec& spec, const SelftestResult& r) {
  std::ostringstream os;
  if (spec.format == "json") {
    Json j = envelope(spec, "selftest");
    Json list = Json::array();
    for (const auto& c : r.checks) list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = list;
    j["all_pass"] = r.all_pass();
    os << j.dump(2) << '\n';
  } else {
    for (const auto& c : r.checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << c.detail << '\n';
    os << (r.all_pass() ? "PASS" : "FAIL") << " selftest\n";
  }
  return os.str();
}

void emit(const RunSpec& spec, const std::string& text) {
  if (spec.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::string tmp = spec.out + ".partial";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot open " + tmp + " for writing");
    file << text;
    if (!file.flush()) throw Error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), spec.out.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot move output into " + spec.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-speed ballistic annihilation: simulation and exact computation"};
  app.require_subcommand(1);
  Flags f;

  Command simulate(app, "simulate", "q_k, r and theta estimates over a p-grid", f);
  simulate.p_flags().k_flags().trial_flags().output_flags();
  simulate.sub()->add_option("--estimators", f.estimators, "Subset of q,r,theta,leftmovers");

  Command identities(app, "identities", "Plug-in identity checks with delta-method errors", f);
  identities.p_flags().k_flags().trial_flags().output_flags();

  Command scan(app, "scan-pc", "Smallest roots of E[N_k] in (1/4, 1/3]", f);
  scan.output_flags();
  scan.sub()->add_option("--kmax", f.kmax, "Largest k");
  scan.sub()->add_option("--tol", f.tol, "Interval width (rational or decimal)");

  Command poly(app, "polynomial", "Exact q_k and E[N_k]", f);
  poly.k_flags().output_flags();

  Command explore(app, "explore", "Block exploration traces and survival certificates", f);
  explore.p_flags().k_flags().output_flags();
  explore.sub()->add_option("--trials", f.trials, "Number of traces (default 1)");
  explore.sub()->add_option("--seed", f.seed, "Master seed")->required();
  explore.sub()->add_option("--iters", f.iters, "Blocks per trace");
  explore.sub()->add_option("--budget", f.budget, "Extension budget per step");

  Command reversal(app, "reversal", "Interval reversal: bijection and halving checks", f);
  reversal.p_flags().k_flags().trial_flags().output_flags();
  reversal.sub()->add_option("--mode", f.mode, "continuous or lattice");

  Command lattice(app, "lattice", "Discrete model identities", f);
  lattice.p_flags().k_flags().trial_flags().output_flags();

  Command self(app, "selftest", "Engine equivalence and invariant battery", f);
  self.output_flags();
  self.sub()->add_option("--seed", f.seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string subcommand;
  for (const CLI::App* s : app.get_subcommands()) subcommand = s->get_name();
  try {
    RunSpec spec = make_spec(subcommand, f);
    std::string text;
    int status = kExitOk;
    if (subcommand == "simulate") text = run_simulate(spec, f);
    else if (subcommand == "identities") text = run_identities(spec);
    else if (subcommand == "scan-pc") text = run_scan_pc(spec, f);
    else if (subcommand == "polynomial") text = run_polynomial(spec);
    else if (subcommand == "explore") text = run_explore(spec, f);
    else if (subcommand == "reversal") text = run_reversal(spec, f);
    else if (subcommand == "lattice") text = run_lattice(spec);
    else if (subcommand == "selftest") {
      const SelftestResult r = run_selftest(spec.seed, spec.workers);
      text = render_selftest(spec, r);
      status = r.all_pass() ? kExitOk : kExitSelftest;
    }
    emit(spec, text);
    return status;
  } catch (const UsageError& e) {
    std::cerr << "bann " << subcommand << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "bann " << subcommand << ": " << e.what() << '\n';
    return kExitUsage;
  }
}
