#include "qmst/panel.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace qmst {
namespace {

void require_equal_lengths(const std::vector<std::vector<double>>& series, const std::vector<std::string>& labels) {
    if (series.size() != labels.size()) {
        throw ValidationError("panel has " + std::to_string(labels.size()) + " labels but " +
                              std::to_string(series.size()) + " series");
    }
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].size() != series[0].size()) {
            throw ValidationError("series '" + labels[i] + "' has length " + std::to_string(series[i].size()) +
                                  ", expected " + std::to_string(series[0].size()));
        }
    }
}

bool is_timestamp_header(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    return name == "timestamp" || name == "time" || name == "t" || name == "minute";
}

struct RawPanel {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns;
    std::optional<std::vector<std::int64_t>> timestamps;
};

RawPanel read_raw(const std::string& path) {
    const auto table = csv::read(path);
    RawPanel raw;
    const bool has_time = !table.header.empty() && is_timestamp_header(table.header.front());
    const std::size_t first = has_time ? 1 : 0;
    raw.labels.assign(table.header.begin() + static_cast<std::ptrdiff_t>(first), table.header.end());
    raw.columns.assign(raw.labels.size(), std::vector<double>(table.rows.size()));
    if (has_time) raw.timestamps.emplace(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = path + ": row " + std::to_string(r + 2);
        if (has_time) (*raw.timestamps)[r] = csv::to_integer(table.rows[r][0], where);
        for (std::size_t c = 0; c < raw.labels.size(); ++c) {
            raw.columns[c][r] = csv::to_double(table.rows[r][c + first], where);
        }
    }
    return raw;
}

}  // namespace

std::string Provenance::describe() const {
    std::string out = csv::join(steps, '|');
    if (seed) out += " seed=" + std::to_string(*seed);
    return out;
}

void require_unique_labels(const std::vector<std::string>& labels) {
    if (labels.empty()) throw ValidationError("panel has no series");
    std::set<std::string> seen;
    for (const auto& l : labels) {
        if (l.empty()) throw ValidationError("empty series label");
        if (!seen.insert(l).second) throw ValidationError("duplicate series label '" + l + "'");
    }
}

PricePanel::PricePanel(std::vector<std::string> tickers, std::vector<std::vector<double>> prices,
                       std::optional<std::vector<std::int64_t>> timestamps)
    : tickers_(std::move(tickers)), prices_(std::move(prices)), timestamps_(std::move(timestamps)) {
    require_unique_labels(tickers_);
    require_equal_lengths(prices_, tickers_);
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        for (std::size_t t = 0; t < prices_[i].size(); ++t) {
            const double p = prices_[i][t];
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw ValidationError("non-positive or non-finite price in '" + tickers_[i] + "' at index " +
                                      std::to_string(t));
            }
        }
    }
    if (timestamps_) {
        if (timestamps_->size() != length()) throw ValidationError("timestamp column length mismatch");
        for (std::size_t t = 1; t < timestamps_->size(); ++t) {
            if ((*timestamps_)[t] <= (*timestamps_)[t - 1]) {
                throw ValidationError("timestamps not strictly increasing at index " + std::to_string(t));
            }
        }
    }
}

SeriesPanel::SeriesPanel(std::vector<std::string> labels, std::vector<std::vector<double>> series, Provenance meta)
    : labels_(std::move(labels)), series_(std::move(series)), meta_(std::move(meta)) {
    require_unique_labels(labels_);
    require_equal_lengths(series_, labels_);
    for (std::size_t i = 0; i < series_.size(); ++i) {
        for (std::size_t t = 0; t < series_[i].size(); ++t) {
            if (!std::isfinite(series_[i][t])) {
                throw ValidationError("non-finite value in '" + labels_[i] + "' at index " + std::to_string(t));
            }
        }
    }
}

SeriesPanel SeriesPanel::with_series(std::vector<std::vector<double>> series, std::string step,
                                     std::optional<std::uint64_t> seed) const {
    Provenance meta = meta_;
    meta.steps.push_back(std::move(step));
    if (seed) meta.seed = seed;
    return SeriesPanel(labels_, std::move(series), std::move(meta));
}

void SeriesPanel::require_scale(std::size_t scale) const {
    if (length() < 2 * scale) {
        throw ValidationError("series length " + std::to_string(length()) + " is shorter than twice the scale " +
                              std::to_string(scale));
    }
}

PricePanel read_price_panel(const std::string& path) {
    auto raw = read_raw(path);
    return PricePanel(std::move(raw.labels), std::move(raw.columns), std::move(raw.timestamps));
}

SeriesPanel read_series_panel(const std::string& path) {
    auto raw = read_raw(path);
    return SeriesPanel(std::move(raw.labels), std::move(raw.columns), Provenance{{"read:" + path}, std::nullopt});
}

void write_series_panel(const std::string& path, const SeriesPanel& panel) {
    std::string out = csv::join(panel.labels()) + "\n";
    std::vector<std::string> row(panel.size());
    for (std::size_t t = 0; t < panel.length(); ++t) {
        for (std::size_t i = 0; i < panel.size(); ++i) row[i] = csv::format_exact(panel.series(i)[t]);
        out += csv::join(row);
        out += '\n';
    }
    write_text(path, out);
}

}  // namespace qmst
