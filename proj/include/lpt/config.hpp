// config.hpp — single-file "key = value" experiment configs.
//
// '#' starts a comment; keys are dotted lowercase; unknown keys are rejected
// (schema-validated). The raw text (plus any CLI overrides) is hashed and
// echoed into every output header, so runs are self-describing.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lpt::config {

class Config {
public:
    static Config load(const std::string& path);
    static Config from_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    std::string require_str(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    // CLI flag overrides: recorded in the echoed text (and the hash).
    void set_override(const std::string& key, const std::string& value);

    std::uint64_t hash() const;
    std::vector<std::string> echo_lines() const;

    // Every key must match the allowlist (exact names or "prefix." entries).
    void validate_keys(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> kv_;
    std::string text_;
};

}  // namespace lpt::config
