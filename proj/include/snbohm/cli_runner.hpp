#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace snbohm::cli {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* output_root_env = "SNBOHM_OUTPUT_ROOT";

struct Issue {
    enum class Kind { error, warning };
    Kind kind = Kind::error;
    std::string code;     // e.g. "E001", "W001"
    std::string message;  // includes file:line where applicable
};

struct ValidationReport {
    std::vector<Issue> issues;
    bool ok() const {
        for (const auto& i : issues)
            if (i.kind == Issue::Kind::error) return false;
        return true;
    }
};

// Schema + physics sanity checks (domain width, dt bound) without computing.
ValidationReport validate_file(const std::string& config_path);

// Dispatches the scenario named in the config and writes CSV data plus a
// manifest.  Returns the process exit status: 0 success, 2 schema violation,
// 3 numerical abort (diagnostics file written next to the outputs).
int run(const std::string& config_path);

std::vector<std::string> list_scenarios();

// FNV-1a 64-bit checksum, used for config hashes and manifest entries.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& data);

}  // namespace snbohm::cli
