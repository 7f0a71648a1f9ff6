#pragma once

// The acceptance suite shared by `ke-zeta verify` and the acceptance test
// binary. Criteria "1".."12" are the gate; "C0" (Laplacian calibration) and
// "7b" (positive cube) are informational.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/field_oracle.hpp"

namespace kez {

enum class VerifyLevel { Quick, Full };

struct AcceptanceOptions {
    VerifyLevel level = VerifyLevel::Full;
    std::uint64_t seed = 20240611;
    int workers = 1;
    double c_lap = kLaplacianConstant;
    double budget_scale = 1.0;  // multiplies every sample/sweep budget
    std::string data_dir;       // empty: KEZ_DATA_DIR env, then the build-time path
};

struct CriterionResult {
    std::string id;
    std::string title;
    bool informational = false;
    bool stochastic = false;
    bool skipped = false;
    bool pass = false;
    std::string measured;
    std::string tolerance;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0: none
    nlohmann::json details;

    nlohmann::json to_json(bool with_timing) const;
};

// Gate criteria and informational lines, in report order.
std::vector<std::string> criterion_ids();
bool is_stochastic(const std::string& id);
std::string criterion_title(const std::string& id);

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opt);
// Runs every criterion; stochastic ones are skipped at Quick level.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

std::string format_line(const CriterionResult& r, bool with_timing);
// Deterministic report (no wall-clock unless asked).
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt,
                                 bool with_timing = false);
bool gate_passed(const std::vector<CriterionResult>& results);

}  // namespace kez
