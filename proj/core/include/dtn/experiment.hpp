// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_EXPERIMENT_HPP
#define DTN_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtn/field_expr.hpp"
#include "dtn/mesh.hpp"

namespace dtn
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//
// One experiment suite: a geometry, a coefficient set, the experiments to run, and
// output/reproducibility knobs. Parsed from the flat sectioned key-value config
// format (see README); every expression is parsed at load time so malformed fields
// fail early with the field named.
//
struct ExperimentConfig
{
  // [geometry]
  std::string kind = "disk";  // disk | annulus | spherical-cap | (empty when mesh set)
  std::optional<std::string> mesh_path;
  int refine = 2;
  double inner_radius = 0.5;
  double cap_angle = 1.5707963267948966;

  // [coefficients] raw expression strings (kept for provenance/round-trip)
  std::string a_text = "1, 0, 0, 1";
  std::string b_text = "0, 0";
  double b_support_inner = 0.5;
  double b_support_outer = 0.8;
  std::string c_text = "0";
  std::string d_text = "0";
  std::string beta_text = "1";
  std::string lambda_text = "1";

  // [experiments]
  std::vector<std::string> experiments;

  // [sector]
  std::vector<double> sector_angles = {30, 60, 85, 90, 120, 150, 170};

  // [output]
  std::string out_dir = "results";
  std::uint64_t seed = 1;

  // [tolerances] optional overrides, keyed by acceptance entry name
  std::map<std::string, double> tolerances;

  Mesh BuildMesh() const;
  CoefficientSet BuildCoefficients() const;
  std::uint64_t Hash() const;  // provenance hash of the canonical serialization
  std::string Canonical() const;
};

ExperimentConfig ParseConfig(std::istream &in);
ExperimentConfig ParseConfigFile(const std::string &path);

struct RunEntry
{
  enum class Status
  {
    Pass,
    Fail,
    Reported
  };
  std::string name;
  Status status = Status::Reported;
  double value = 0.0;
  double tolerance = 0.0;
  std::string details;
  double wall_ms = 0.0;
};

struct RunReport
{
  std::vector<RunEntry> entries;
  std::uint64_t config_hash = 0;
  std::uint64_t mesh_hash = 0;
  std::string code_version;

  bool AllPassed() const;
  int FailCount() const;
};

// Executes the configured experiments in order, writing CSV/JSON/SVG artifacts under
// config.out_dir. Deterministic for a fixed config and seed; wall times go only to
// the separate run_meta.json. Per-experiment errors are recorded in the report
// without aborting the suite.
RunReport RunSuite(const ExperimentConfig &config);

// report.json (byte-deterministic) and run_meta.json (wall times) emission.
void WriteReportJson(const RunReport &report, const std::string &path);
void WriteRunMetaJson(const RunReport &report, const std::string &path);

// The acceptance criteria, one entry per criterion, artifacts under out_dir.
// Criterion 11 (byte-identical re-run) re-executes criteria 1-10 into two
// subdirectories and compares their artifact bytes, so a full-acceptance run costs
// two passes.
std::vector<RunEntry> RunFullAcceptance(const ExperimentConfig &config,
                                        const std::string &out_dir);

const char *CodeVersion();

}  // namespace dtn

#endif  // DTN_EXPERIMENT_HPP
