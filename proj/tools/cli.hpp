#pragma once

// Command-line front end, kept as a library so tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrsos/polyform.hpp"

namespace hrsos::cli {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kFailure = 1, kBadInput = 2 };

// Bad problem input; `where` is a path such as problem.levels[2].
class InputError : public Error {
 public:
  using Error::Error;
};

struct SolverSettings {
  std::string mode = "auto";
  double tol = 1e-10;
  int max_iter = 20000;
  std::uint64_t seed = 20240601;
  int threads = 1;
};

struct ProblemSpec {
  std::string kind;  // sphere-min | multi-sphere-min | spectral-norm
  std::vector<std::vector<std::string>> variables;
  std::optional<std::string> polynomial;
  std::optional<json> terms;
  std::optional<DenseTensor> tensor;
  std::vector<int> levels;
  SolverSettings solver;
  json echo;  // normalized copy placed in the report
};

struct RunFlags {
  bool oracle = false;
  bool gap = true;
};

// Thread default: HRSOS_THREADS if set, else 1.
int default_threads();

ProblemSpec parse_problem(const json& j);
DenseTensor tensor_from_json(const json& j, const std::string& where);
std::vector<std::string> infer_variables(std::string_view poly);

// Runs a validated problem; `exit_code` receives kOk or kFailure.
json run_problem(const ProblemSpec& spec, const RunFlags& flags, int& exit_code);

// k,bound,seconds with the same doubles as the JSON report.
std::string report_csv(const json& report);
std::string report_table(const json& report);

// The fast identity suite; prints one line per check.
int run_checks(std::ostream& out);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hrsos::cli
