#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qmst {

/// Pipeline configuration. Text form is one `key = value` per line, `#`
/// starts a comment, lists are comma separated:
///
///     input = returns.csv
///     input_kind = returns        # or prices
///     scales = 20, 60, 390
///     q = 1, 2, 3, 4, 5, 6
///     n_sets = 50
///     seed = 7
///
/// `threads` and `output_dir` steer execution only; they are excluded from
/// the canonical form and the config hash.
struct RunConfig {
    std::string input;
    std::string input_kind = "returns";
    std::vector<std::string> transforms;
    std::vector<std::size_t> scales;
    std::vector<double> q_values;
    unsigned order = 2;
    std::size_t dt = 1;
    bool drop_gaps = false;
    /// Surrogate sets per threshold; 0 disables significance filtering.
    std::size_t n_sets = 50;
    std::uint64_t seed = 0;
    std::string output_dir = "qmst_out";
    std::vector<std::string> formats = {"csv", "dot", "graphml", "json"};
    std::string attributes;
    /// Pearson sampling intervals for the similarity table; empty skips it.
    std::vector<std::size_t> pearson_dts;
    unsigned threads = 0;
    bool use_cache = true;

    /// Schema checks that do not need the input data. Throws ValidationError.
    void validate() const;
    [[nodiscard]] bool wants(const std::string& format) const;

    /// Sorted `key = value` lines of every result-affecting field.
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] nlohmann::json to_json() const;

    [[nodiscard]] static RunConfig parse(const std::string& text);
    [[nodiscard]] static RunConfig from_file(const std::string& path);
};

/// Parses "1, 2, 3" style lists; throws ValidationError with `key` in the message.
[[nodiscard]] std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& key);
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text, const std::string& key);

}  // namespace qmst
