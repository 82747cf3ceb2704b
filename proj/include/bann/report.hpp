// Serialization of run artifacts. Every CSV starts with two `#` lines carrying
// the format version and the run parameters; every JSON document carries
// them as top-level fields. Worker count and output path are left out of the
// embedded run parameters because they never change the results.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bann/engine.hpp"
#include "bann/estimators.hpp"
#include "bann/exactpoly.hpp"
#include "bann/explorer.hpp"
#include "bann/lattice.hpp"
#include "bann/reversal.hpp"

namespace bann {

inline constexpr const char* kFormatVersion = "bann/1";
inline constexpr const char* kResolutionSchema = "bann.resolution/1";

using Json = nlohmann::ordered_json;

struct RunSpec {
  std::string subcommand;
  std::vector<double> p_values;
  std::vector<std::size_t> ks;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;              // empty: standard output
  std::string format = "csv";   // csv or json
  std::map<std::string, std::string> options;  // subcommand-specific flags

  Json to_json() const;
};

/// `# format=...` and `# runspec=<json>` lines.
void write_csv_preamble(std::ostream& out, const RunSpec& spec);
/// {"format": ..., "runspec": ..., "kind": kind}
Json envelope(const RunSpec& spec, const std::string& kind);

/// Shortest decimal that round-trips.
std::string format_double(double v);

Json to_json(const Resolution& res);
Json to_json(const Estimate& e);
Json to_json(const IdentityCheck& c);
Json to_json(const TestResult& t);
Json to_json(const IdentityReport& r);
Json to_json(const BijectionTally& t);
Json to_json(const HalvingReport& r);
Json to_json(const LatticeStats& s);
Json to_json(const ExplorationTrace& t);
Json to_json(const LeftmoverDistribution& d);

/// `p,k,trials,seed,estimator,value,stderr,censored`
void write_estimate_header(std::ostream& out);
void write_estimate_row(std::ostream& out, const Estimate& e);

/// `k,lo,hi` with exact rationals; rows without a root print empty fields.
void write_root_table(std::ostream& out, const std::vector<ScanRow>& rows);

/// `p,k,trials,qhat,rhat,psihat,PDeq,PDgt,triple_rate,censored`
void write_lattice_header(std::ostream& out);
void write_lattice_row(std::ostream& out, const LatticeStats& s);

}  // namespace bann
