#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmst {

/// Record of how a panel was produced: the ordered chain of transforms and
/// the seed that drove any randomized step.
struct Provenance {
    std::vector<std::string> steps;
    std::optional<std::uint64_t> seed;

    [[nodiscard]] std::string describe() const;
};

/// Aligned, strictly positive price series, one per ticker.
class PricePanel {
public:
    PricePanel(std::vector<std::string> tickers, std::vector<std::vector<double>> prices,
               std::optional<std::vector<std::int64_t>> timestamps = std::nullopt);

    [[nodiscard]] std::size_t size() const noexcept { return tickers_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return prices_.empty() ? 0 : prices_.front().size(); }
    [[nodiscard]] const std::vector<std::string>& tickers() const noexcept { return tickers_; }
    [[nodiscard]] std::span<const double> prices(std::size_t i) const { return prices_.at(i); }
    [[nodiscard]] const std::optional<std::vector<std::int64_t>>& timestamps() const noexcept { return timestamps_; }

private:
    std::vector<std::string> tickers_;
    std::vector<std::vector<double>> prices_;
    std::optional<std::vector<std::int64_t>> timestamps_;
};

/// N aligned real-valued series of equal length. Immutable once built.
class SeriesPanel {
public:
    SeriesPanel(std::vector<std::string> labels, std::vector<std::vector<double>> series,
                Provenance meta = {});

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return series_.empty() ? 0 : series_.front().size(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::string& label(std::size_t i) const { return labels_.at(i); }
    [[nodiscard]] std::span<const double> series(std::size_t i) const { return series_.at(i); }
    [[nodiscard]] const std::vector<std::vector<double>>& all_series() const noexcept { return series_; }
    [[nodiscard]] const Provenance& meta() const noexcept { return meta_; }

    /// Copy with `step` appended to the provenance chain.
    [[nodiscard]] SeriesPanel with_series(std::vector<std::vector<double>> series, std::string step,
                                          std::optional<std::uint64_t> seed = std::nullopt) const;

    /// Throws ValidationError unless length() >= 2 * scale.
    void require_scale(std::size_t scale) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> series_;
    Provenance meta_;
};

/// Throws ValidationError if labels are empty or contain duplicates.
void require_unique_labels(const std::vector<std::string>& labels);

// CSV panel I/O: header row of labels, one column per series, one row per
// time step; an optional leading integer timestamp column named
// "timestamp", "time", "t" or "minute".
[[nodiscard]] PricePanel read_price_panel(const std::string& path);
[[nodiscard]] SeriesPanel read_series_panel(const std::string& path);
void write_series_panel(const std::string& path, const SeriesPanel& panel);

}  // namespace qmst
