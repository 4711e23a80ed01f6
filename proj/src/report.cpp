#include "lpt/report.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "lpt/kernels.hpp"
#include "lpt/version.hpp"

namespace lpt::report {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header_lines,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open report file: " + path);
    for (const auto& line : header_lines) out_ << "# " << line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    ok_ = static_cast<bool>(out_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw std::runtime_error("report row width mismatch in " + path_);
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvWriter::close() {
    out_.flush();
    ok_ = static_cast<bool>(out_);
    out_.close();
}

std::vector<std::string> standard_header(const std::string& command, std::uint64_t config_hash,
                                         std::uint64_t seed,
                                         const std::vector<std::string>& extras) {
    std::vector<std::string> h;
    h.push_back("lp-tournament " + std::string(lpt::version()));
    h.push_back("command = " + command);
    h.push_back("config_hash = " + hex64(config_hash));
    h.push_back("seed = " + std::to_string(seed));
    h.push_back("kernels = " + kernels::active_backend_name());
    for (const auto& e : extras) h.push_back(e);
    return h;
}

}  // namespace lpt::report
