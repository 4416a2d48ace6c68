#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "growent/alphabet.hpp"
#include "growent/montecarlo.hpp"

namespace growent::cli {

inline constexpr std::string_view kSchemaVersion = "1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDegenerate = 3,
};

// Config files use the flag names without the leading dashes:
//   {"family": "harmonic", "K-rule": "pow:0.2", "n-grid": [1000, 10000],
//    "reps": 2000, "seed": 7, "delta": 1, "sampler": "multinomial",
//    "max-reps": 1000000, "mdp-rho": 0.1, "mdp-eps": 1, "mdp-r": [0.5]}
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json describe_json(const FamilySpec& spec, double delta, double exp_delta);
nlohmann::json to_json(const EcdfSummary& summary);
nlohmann::json to_json(const BeSweep& sweep);
nlohmann::json to_json(const MdpResult& result);

// RFC 4180 exports.
std::string clt_csv(const std::vector<EcdfSummary>& summaries);
std::string be_csv(const BeSweep& sweep);
std::string mdp_csv(const MdpResult& result);

/// Entry point behind the `growent` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace growent::cli
