#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smw/model.hpp"
#include "smw/quad.hpp"

namespace smw {

using Json = nlohmann::ordered_json;

struct JobError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : JobError {
  using JobError::JobError;
};
struct AccuracyError : JobError {
  using JobError::JobError;
};

struct JobConfig {
  Potential potential = Potential::gaussian();
  WeightScheme scheme = WeightScheme::flip_sign(Potential::gaussian());
  RuleKind rule_kind = RuleKind::GaussHermiteMapped;
  int rule_order = 200;
  Json params = Json::object();
  Json tolerances = Json::object();
  bool timing = false;
  Json echo;  // the validated config, echoed into reports

  double tolerance(const std::string& name, double fallback) const;
  static JobConfig parse(const Json& j);
  static JobConfig load(const std::filesystem::path& file);
};

struct CheckRow {
  std::string check_id;
  int N = 0, M = 0, p = 0, q = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string status;  // pass | fail | info | skip
  std::string note;
  std::vector<std::pair<std::string, Cplx>> values;
  double seconds = 0.0;
};

struct JobOutcome {
  std::vector<CheckRow> rows;
  bool any_fail = false;
};

JobOutcome run_partition(const JobConfig& cfg);
JobOutcome run_chpoly(const JobConfig& cfg);
JobOutcome run_verify_duality(const JobConfig& cfg);
JobOutcome run_verify_toda(const JobConfig& cfg);
JobOutcome run_verify_web(const JobConfig& cfg);
JobOutcome run_oracle_compare(const JobConfig& cfg);
JobOutcome run_grassmann_check(const JobConfig& cfg);
JobOutcome run_report_all(const JobConfig& cfg);

/// Dispatch by command name; writes report.json and summary.csv under out_dir.
/// Returns the process exit status: 0 pass, 1 check failure, 2 config error,
/// 3 numerical-accuracy error.
int run_command(const std::string& command, const std::filesystem::path& config_file,
                const std::filesystem::path& out_dir);

Json report_json(const std::string& command, const JobConfig& cfg, const JobOutcome& out);
std::string summary_csv(const JobOutcome& out);

}  // namespace smw
