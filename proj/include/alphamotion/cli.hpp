#pragma once

#include "alphamotion/caption.hpp"
#include "alphamotion/dataset.hpp"
#include "alphamotion/rgba.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace alphamotion
{

enum ExitCode : int
{
    kExitOk = 0,
    kExitUsage = 1,
    kExitIo = 2,
    kExitValidation = 3,
};

// Settings shared by every subcommand. Precedence: built-in defaults, then
// the --config file, then explicit flags.
struct RunConfig
{
    std::uint64_t seed = 0;
    Extent canvas{256, 256};
    int frameCount = 16;
    double fps = 8.0;
    double motionThreshold = kDefaultMotionThreshold;
    std::filesystem::path outputRoot = "dataset";
    SpecDistribution distribution;
    CaptionTemplates templates;

    // Throws std::invalid_argument when a value is outside library limits.
    void validate() const;

    // Missing keys keep their current values.
    void merge(const nlohmann::json& j);
    nlohmann::json toJson() const;

    static RunConfig fromFile(const std::filesystem::path& path);
};

// Entry point behind the `alphamotion` executable; `args` excludes argv[0].
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace alphamotion
