#include "bann/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace bann {

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

const char* fate_name(FateKind k) {
  switch (k) {
    case FateKind::Annihilated: return "annihilated";
    case FateKind::SurvivesLeft: return "survives_left";
    case FateKind::SurvivesStill: return "survives_still";
    case FateKind::SurvivesRight: return "survives_right";
  }
  return "?";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Json RunSpec::to_json() const {
  Json j;
  j["subcommand"] = subcommand;
  j["p"] = p_values;
  j["k"] = ks;
  j["trials"] = trials;
  j["seed"] = seed;
  j["format"] = format;
  Json opts = Json::object();
  for (const auto& [key, value] : options) opts[key] = value;
  j["options"] = opts;
  return j;
}

void write_csv_preamble(std::ostream& out, const RunSpec& spec) {
  out << "# format=" << kFormatVersion << '\n';
  out << "# runspec=" << spec.to_json().dump() << '\n';
}

Json envelope(const RunSpec& spec, const std::string& kind) {
  Json j;
  j["format"] = kFormatVersion;
  j["runspec"] = spec.to_json();
  j["kind"] = kind;
  return j;
}

Json to_json(const Resolution& res) {
  Json j;
  j["schema"] = kResolutionSchema;
  Json fates = Json::array();
  for (const Fate& f : res.fates) {
    Json e;
    e["kind"] = fate_name(f.kind);
    if (f.annihilated()) e["event"] = f.event;
    fates.push_back(e);
  }
  j["fates"] = fates;
  Json events = Json::array();
  for (const CollisionEvent& ev : res.events) {
    Json e;
    e["time"] = ev.time;
    e["position"] = ev.position;
    e["participants"] = std::vector<std::uint32_t>(ev.participants.begin(), ev.participants.begin() + ev.count);
    events.push_back(e);
  }
  j["events"] = events;
  if (res.origin_hit) {
    j["origin_hit"] = {{"slot", res.origin_hit->slot}, {"time", res.origin_hit->time}};
  } else {
    j["origin_hit"] = nullptr;
  }
  j["degenerate_tie_count"] = res.degenerate_tie_count;
  return j;
}

Json to_json(const Estimate& e) {
  return {{"estimator", e.estimator}, {"p", e.p},           {"k", e.k},
          {"trials", e.n_trials},     {"seed", e.master_seed}, {"value", number(e.value)},
          {"stderr", number(e.std_error)}, {"censored", e.n_censored}};
}

Json to_json(const IdentityCheck& c) {
  return {{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)},
          {"stderr", number(c.std_error)}, {"z", number(c.z)}, {"pass", c.pass}};
}

Json to_json(const TestResult& t) {
  return {{"statistic", number(t.statistic)}, {"df", number(t.df)}, {"p_value", number(t.p_value)}};
}

Json to_json(const IdentityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"p", r.p},           {"k", r.k},
          {"trials", r.trials}, {"seed", r.seed},
          {"q_hat", number(r.q_hat)}, {"r_hat", number(r.r_hat)},
          {"censored_fraction", number(r.censored_fraction)},
          {"checks", checks},   {"all_pass", r.all_pass()}};
}

Json to_json(const BijectionTally& t) {
  return {{"trials", t.trials},         {"censored", t.censored},
          {"in_a", t.in_a},             {"in_b", t.in_b},
          {"forward_fail", t.forward_fail}, {"backward_fail", t.backward_fail},
          {"pathwise_ok", t.pathwise_ok()}};
}

Json to_json(const HalvingReport& r) {
  return {{"p", r.p},
          {"k", r.k},
          {"mode", r.mode == Mode::Lattice ? "lattice" : "continuous"},
          {"trials", r.trials},
          {"censored", r.censored},
          {"conditioned", r.conditioned},
          {"halving", to_json(r.halving)},
          {"base", to_json(r.base)},
          {"distance_test", to_json(r.distance_test)},
          {"strict_margin_z", number(r.strict_margin_z)}};
}

Json to_json(const LatticeStats& s) {
  Json hist = Json::array();
  for (const auto& [d, n] : s.d_histogram) hist.push_back({d, n});
  return {{"p", s.p},
          {"k", s.k},
          {"trials", s.trials},
          {"seed", s.seed},
          {"occupancy", "one particle per site"},
          {"q_hat", to_json(s.q_hat)},
          {"r_hat", to_json(s.r_hat)},
          {"psi_hat", to_json(s.psi_hat)},
          {"psi_direct", to_json(s.psi_direct)},
          {"pairs_both_defined", s.pairs_both_defined},
          {"P_D_gt", number(s.p_d_gt)},
          {"P_D_lt", number(s.p_d_lt)},
          {"P_D_eq", number(s.p_d_eq)},
          {"P_D_eq_joint", number(s.p_d_eq_joint)},
          {"triple_rate", number(s.triple_rate)},
          {"censored", s.censored},
          {"D_histogram", hist}};
}

Json to_json(const ExplorationTrace& t) {
  return {{"k", t.k},
          {"K", t.K},
          {"N_tilde", t.n_tilde},
          {"extended_by", t.extended_by},
          {"truncated", t.truncated},
          {"first_block_still", t.first_block_still}};
}

Json to_json(const LeftmoverDistribution& d) {
  return {{"trials", d.trials},
          {"histogram", d.histogram},
          {"mean", number(d.mean)},
          {"mean_stderr", number(d.mean_stderr)},
          {"mean_theory", number(d.mean_theory)},
          {"q_theory", number(d.q_theory)},
          {"gof", to_json(d.gof)}};
}

void write_estimate_header(std::ostream& out) { out << "p,k,trials,seed,estimator,value,stderr,censored\n"; }

void write_estimate_row(std::ostream& out, const Estimate& e) {
  out << format_double(e.p) << ',' << e.k << ',' << e.n_trials << ',' << e.master_seed << ',' << e.estimator
      << ',' << format_double(e.value) << ',' << format_double(e.std_error) << ',' << e.n_censored << '\n';
}

void write_root_table(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "k,lo,hi\n";
  for (const ScanRow& r : rows) {
    out << r.k << ',';
    if (r.root) out << to_string(r.root->lo) << ',' << to_string(r.root->hi);
    else out << ',';
    out << '\n';
  }
}

void write_lattice_header(std::ostream& out) {
  out << "p,k,trials,qhat,rhat,psihat,PDeq,PDgt,triple_rate,censored\n";
}

void write_lattice_row(std::ostream& out, const LatticeStats& s) {
  out << format_double(s.p) << ',' << s.k << ',' << s.trials << ',' << format_double(s.q_hat.value) << ','
      << format_double(s.r_hat.value) << ',' << format_double(s.psi_hat.value) << ','
      << format_double(s.p_d_eq) << ',' << format_double(s.p_d_gt) << ',' << format_double(s.triple_rate)
      << ',' << s.censored << '\n';
}

}  // namespace bann
