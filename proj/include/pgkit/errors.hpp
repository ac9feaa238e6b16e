#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pgkit {

// Base class for all toolkit failures. Carries the subsystem name so the CLI
// can report where a run died.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Every particle weight vanished (or went non-finite) at one timestep.
// Timestep is 1-based, matching file output.
class DegenerateWeightsError : public Error {
public:
    DegenerateWeightsError(std::string module, long timestep,
                           const std::string& detail = "")
        : Error(std::move(module),
                "degenerate particle weights at t=" + std::to_string(timestep) +
                    (detail.empty() ? "" : " (" + detail + ")")),
          timestep_(timestep) {}

    long timestep() const noexcept { return timestep_; }

private:
    long timestep_;
};

// Bad run configuration (unknown key, missing key, out-of-range value).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace pgkit
