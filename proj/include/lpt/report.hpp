// report.hpp — CSV report files with self-describing headers.
//
// Every output file starts with a '#'-prefixed header block carrying the
// config hash, master seed, version string and column schema, followed by one
// CSV header row and data rows. Numeric formatting is fixed (%.17g) so that
// identical runs produce byte-identical files.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace lpt::report {

// FNV-1a over the canonical config text; printed as 16 hex digits.
std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

// Shortest decimal form that round-trips an IEEE double.
std::string fmt(double v);
std::string fmt(std::uint64_t v);
std::string fmt(std::int64_t v);

class CsvWriter {
public:
    // `header_lines` are free-form "key = value" strings echoed under '#'.
    CsvWriter(const std::string& path, const std::vector<std::string>& header_lines,
              const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    void close();
    bool ok() const { return ok_; }
    const std::string& path() const { return path_; }

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_ = 0;
    bool ok_ = false;
};

// Standard header block: version, config hash, seed, then extras.
std::vector<std::string> standard_header(const std::string& command, std::uint64_t config_hash,
                                         std::uint64_t seed,
                                         const std::vector<std::string>& extras = {});

}  // namespace lpt::report
