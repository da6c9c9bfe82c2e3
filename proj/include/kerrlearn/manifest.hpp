#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kerr {

// Hex-encoded SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Writes manifest_<command>.json next to the produced files: command name,
// library version, UTC timestamp, full config echo, optional extras (
// warnings, per-run diagnostics), and per-file byte count + SHA-256.
// Everything except the timestamp is a pure function of config and code.
void write_manifest(const std::filesystem::path& out_dir,
                    const std::string& command,
                    const nlohmann::json& config_echo,
                    const std::vector<std::filesystem::path>& files,
                    const nlohmann::json& extras = nlohmann::json::object());

}  // namespace kerr
