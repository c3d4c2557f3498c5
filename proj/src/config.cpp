#include "qmst/config.hpp"

#include "qmst/csv.hpp"
#include "qmst/digest.hpp"
#include "qmst/error.hpp"
#include "qmst/fluct.hpp"
#include "qmst/ingest.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qmst {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T, typename F>
std::string join_list(const std::vector<T>& items, F&& fmt) {
    std::vector<std::string> parts;
    for (const auto& i : items) parts.push_back(fmt(i));
    return csv::join(parts);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

unsigned long long parse_unsigned(const std::string& v, const std::string& key) {
    try {
        const auto n = csv::to_integer(v, key);
        if (n < 0) throw ValidationError("config key '" + key + "' must be non-negative");
        return static_cast<unsigned long long>(n);
    } catch (const IoError&) {
        try {
            std::size_t pos = 0;
            const auto n = std::stoull(v, &pos);
            if (pos == v.size()) return n;
        } catch (const std::exception&) {
        }
        throw ValidationError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) out.push_back(static_cast<std::size_t>(parse_unsigned(item, key)));
    return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            out.push_back(csv::to_double(item, key));
        } catch (const IoError& e) {
            throw ValidationError(e.what());
        }
    }
    return out;
}

void RunConfig::validate() const {
    if (input.empty()) throw ValidationError("config: 'input' is required");
    if (input_kind != "prices" && input_kind != "returns") {
        throw ValidationError("config: input_kind must be 'prices' or 'returns'");
    }
    if (scales.empty()) throw ValidationError("config: 'scales' must list at least one scale");
    if (q_values.empty()) throw ValidationError("config: 'q' must list at least one value");
    for (const auto s : scales) {
        if (s < order + 2) {
            throw ValidationError("config: scale " + std::to_string(s) + " is below order + 2");
        }
    }
    if (std::set<std::size_t>(scales.begin(), scales.end()).size() != scales.size()) {
        throw ValidationError("config: duplicate scale");
    }
    if (std::set<double>(q_values.begin(), q_values.end()).size() != q_values.size()) {
        throw ValidationError("config: duplicate q");
    }
    for (const double q : q_values) {
        require_supported_q(q);
        if (q < 0.0) throw ValidationError("config: negative q is only available through the audit command");
    }
    if (dt == 0) throw ValidationError("config: dt must be positive");
    if (n_sets == 1) throw ValidationError("config: n_sets must be 0 (disabled) or at least 2");
    for (const auto& t : transforms) (void)TransformSpec::parse(t, 0);
    static const std::set<std::string> known = {"csv", "dot", "graphml", "json"};
    for (const auto& f : formats) {
        if (!known.count(f)) throw ValidationError("config: unknown output format '" + f + "'");
    }
    for (const auto d : pearson_dts) {
        if (d == 0) throw ValidationError("config: pearson_dts entries must be positive");
    }
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["attributes"] = attributes;
    kv["drop_gaps"] = drop_gaps ? "true" : "false";
    kv["dt"] = std::to_string(dt);
    kv["formats"] = csv::join(formats);
    kv["input"] = input;
    kv["input_kind"] = input_kind;
    kv["m"] = std::to_string(order);
    kv["n_sets"] = std::to_string(n_sets);
    kv["pearson_dts"] = join_list(pearson_dts, [](std::size_t v) { return std::to_string(v); });
    kv["q"] = join_list(q_values, [](double v) { return csv::format_exact(v); });
    kv["scales"] = join_list(scales, [](std::size_t v) { return std::to_string(v); });
    kv["seed"] = std::to_string(seed);
    kv["transforms"] = csv::join(transforms);
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string RunConfig::hash() const { return sha256_hex(canonical()); }

nlohmann::json RunConfig::to_json() const {
    return {
        {"input", input},
        {"input_kind", input_kind},
        {"transforms", transforms},
        {"scales", scales},
        {"q", q_values},
        {"m", order},
        {"dt", dt},
        {"drop_gaps", drop_gaps},
        {"n_sets", n_sets},
        {"seed", seed},
        {"formats", formats},
        {"attributes", attributes},
        {"pearson_dts", pearson_dts},
    };
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c;
    const std::map<std::string, std::function<void(const std::string&, const std::string&)>> schema = {
        {"input", [&](const std::string& v, const std::string&) { c.input = v; }},
        {"input_kind", [&](const std::string& v, const std::string&) { c.input_kind = v; }},
        {"transforms", [&](const std::string& v, const std::string&) { c.transforms = split_list(v); }},
        {"scales", [&](const std::string& v, const std::string& k) { c.scales = parse_size_list(v, k); }},
        {"q", [&](const std::string& v, const std::string& k) { c.q_values = parse_real_list(v, k); }},
        {"m", [&](const std::string& v, const std::string& k) { c.order = static_cast<unsigned>(parse_unsigned(v, k)); }},
        {"dt", [&](const std::string& v, const std::string& k) { c.dt = parse_unsigned(v, k); }},
        {"drop_gaps", [&](const std::string& v, const std::string& k) { c.drop_gaps = parse_bool(v, k); }},
        {"n_sets", [&](const std::string& v, const std::string& k) { c.n_sets = parse_unsigned(v, k); }},
        {"seed", [&](const std::string& v, const std::string& k) { c.seed = parse_unsigned(v, k); }},
        {"output_dir", [&](const std::string& v, const std::string&) { c.output_dir = v; }},
        {"formats", [&](const std::string& v, const std::string&) { c.formats = split_list(v); }},
        {"attributes", [&](const std::string& v, const std::string&) { c.attributes = v; }},
        {"pearson_dts", [&](const std::string& v, const std::string& k) { c.pearson_dts = parse_size_list(v, k); }},
        {"threads", [&](const std::string& v, const std::string& k) { c.threads = static_cast<unsigned>(parse_unsigned(v, k)); }},
        {"use_cache", [&](const std::string& v, const std::string& k) { c.use_cache = parse_bool(v, k); }},
    };
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = schema.find(key);
        if (it == schema.end()) throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ValidationError("config: key '" + key + "' given twice");
        it->second(value, key);
    }
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) { return parse(read_text(path)); }

}  // namespace qmst
