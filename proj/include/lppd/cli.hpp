#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lppd::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_gate_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_runtime = 3;

const std::vector<std::string>& commands();

/// Fully resolved configuration of one run: command-specific parameters plus
/// the execution settings that never affect results.
struct ExperimentConfig {
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    std::filesystem::path out_root;
    unsigned workers = 0;
};

/// Parameter defaults for a command; keys absent here must be supplied.
nlohmann::json default_params(const std::string& command);
std::vector<std::string> required_params(const std::string& command);

/// Domain violations of a resolved config (empty when valid).
std::vector<std::string> violations(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the command and canonical parameter JSON.
std::string config_hash(const ExperimentConfig& config);

/// root/<command>-<hash>, with .1, .2, ... appended if that already exists.
std::filesystem::path run_directory(const ExperimentConfig& config);

/// Executes a validated config, writes its CSVs, manifest.json and (on gate
/// failure) failures.json; returns the exit status.
int run(const ExperimentConfig& config, std::ostream& log);

/// Full command-line entry point.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace lppd::cli
