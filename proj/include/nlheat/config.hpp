#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nlheat {

/// Flat `key = value` configuration. Values may be double-quoted; `#` starts a
/// comment outside quotes. Keys not in the allowed set are rejected.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, const std::set<std::string>& allowed);
    static KeyValueConfig load(const std::filesystem::path& path,
                               const std::set<std::string>& allowed);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, std::string fallback) const;
    double number_or(const std::string& key, double fallback) const;
    std::optional<double> number(const std::string& key) const;
    bool flag_or(const std::string& key, bool fallback) const;
    /// Comma- or whitespace-separated numbers, optionally wrapped in braces or brackets.
    std::vector<double> number_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

double parse_number(std::string_view text, std::string_view what);

} // namespace nlheat
