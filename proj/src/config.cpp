#include "nlheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nlheat/error.hpp"

namespace nlheat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string line_error(std::size_t line, const std::string& what) {
    return "config line " + std::to_string(line) + ": " + what;
}

// Value text with a trailing comment removed and quotes stripped.
std::string parse_value(std::string_view raw, std::size_t line) {
    raw = trim(raw);
    if (!raw.empty() && raw.front() == '"') {
        const auto close = raw.find('"', 1);
        if (close == std::string_view::npos) {
            throw ValidationError(line_error(line, "unterminated quote"));
        }
        const auto rest = trim(raw.substr(close + 1));
        if (!rest.empty() && rest.front() != '#') {
            throw ValidationError(line_error(line, "text after quoted value"));
        }
        return std::string(raw.substr(1, close - 1));
    }
    const auto hash = raw.find('#');
    return std::string(trim(raw.substr(0, hash)));
}

} // namespace

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ValidationError("invalid number '" + std::string(text) + "' for " +
                              std::string(what));
    }
    return value;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::set<std::string>& allowed) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto body = trim(raw);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(line_error(line, "expected key = value"));
        }
        const std::string key(trim(body.substr(0, eq)));
        if (key.empty()) {
            throw ValidationError(line_error(line, "empty key"));
        }
        if (!allowed.count(key)) {
            throw ValidationError(line_error(line, "unknown key '" + key + "'"));
        }
        if (cfg.values_.count(key)) {
            throw ValidationError(line_error(line, "duplicate key '" + key + "'"));
        }
        cfg.values_[key] = parse_value(body.substr(eq + 1), line);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path,
                                    const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), allowed);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, std::string fallback) const {
    return get(key).value_or(std::move(fallback));
}

std::optional<double> KeyValueConfig::number(const std::string& key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    return parse_number(*v, key);
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
    return number(key).value_or(fallback);
}

bool KeyValueConfig::flag_or(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ValidationError("invalid boolean '" + *v + "' for " + key);
}

std::vector<double> KeyValueConfig::number_list(const std::string& key) const {
    auto v = get(key);
    if (!v) {
        return {};
    }
    std::string text = *v;
    std::replace_if(
        text.begin(), text.end(),
        [](char c) { return c == ',' || c == '{' || c == '}' || c == '[' || c == ']'; }, ' ');
    std::istringstream in(text);
    std::vector<double> out;
    std::string item;
    while (in >> item) {
        out.push_back(parse_number(item, key));
    }
    return out;
}

} // namespace nlheat
