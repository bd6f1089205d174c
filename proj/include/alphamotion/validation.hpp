#pragma once

#include "alphamotion/diffusion.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace alphamotion
{

struct CheckResult
{
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Suites: "math" (diffusion, inflation, attention, loss) and "roundtrip"
// (control maps, warping, manifests, captions).
inline const std::set<std::string> kValidationSuites = {"math", "roundtrip"};

struct ValidationOptions
{
    std::set<std::string> suites = kValidationSuites;
    std::uint64_t seed = 1;
    // When set, this schedule replaces the default linear one in the math suite.
    std::optional<Eigen::VectorXd> scheduleOverride;
};

std::vector<CheckResult> runValidation(const ValidationOptions& opts);

// Reads {"alpha_bar": [...]} from a JSON file.
Eigen::VectorXd readScheduleFile(const std::string& path);

} // namespace alphamotion
