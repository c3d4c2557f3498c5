#pragma once

#include "qmst/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmst {

struct ReturnOptions {
    /// Sampling interval in the price panel's time unit (minutes).
    std::size_t dt = 1;
    /// Drop returns whose endpoints are not exactly dt apart on the timestamp
    /// axis (session boundaries). Requires timestamps; otherwise ignored.
    bool drop_gaps = false;
};

/// Non-overlapping log-returns r(k) = ln p(k*dt + dt) - ln p(k*dt),
/// floor((len - 1) / dt) samples per series.
[[nodiscard]] SeriesPanel log_returns(const PricePanel& prices, const ReturnOptions& options = {});

/// Sums non-overlapping blocks of `dt` consecutive samples; turns 1-step
/// log-returns into dt-step log-returns. Length floor(T / dt).
[[nodiscard]] SeriesPanel aggregate_returns(const SeriesPanel& returns, std::size_t dt);

enum class TransformKind { shuffle, gaussianize, sign, amp_shuffle_above, amp_shuffle_below };

/// One step of a transform chain.
struct TransformSpec {
    TransformKind kind = TransformKind::shuffle;
    /// Multiple of the per-series standard deviation (amplitude shuffles only).
    double threshold_sigma = 0.0;
    /// Compare |r| against the threshold (default) or the signed r.
    bool absolute = true;
    std::uint64_t seed = 0;

    void validate() const;
    /// Text form: "shuffle", "gaussianize", "sign", "amp-shuffle-above:1.8",
    /// "amp-shuffle-below:1.2", optionally suffixed with ":signed".
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] static TransformSpec parse(const std::string& text, std::uint64_t seed);
};

/// Independent uniform permutation of every series.
[[nodiscard]] SeriesPanel shuffle(const SeriesPanel& panel, std::uint64_t seed);

/// Rank-order remap onto a sorted standard-normal sample of the same length.
[[nodiscard]] SeriesPanel gaussianize(const SeriesPanel& panel, std::uint64_t seed);

[[nodiscard]] SeriesPanel sign_series(const SeriesPanel& panel);

/// Permutes the values in the selected amplitude class among their own
/// positions, independently per series; the complement is left in place.
/// The standard deviation is taken from the untransformed series.
[[nodiscard]] SeriesPanel amplitude_partition_shuffle(const SeriesPanel& panel, const TransformSpec& spec);

[[nodiscard]] SeriesPanel apply_transform(const SeriesPanel& panel, const TransformSpec& spec);

/// Positions 0..n-1 ordered by value, ties by position.
[[nodiscard]] std::vector<std::size_t> rank_order(std::span<const double> values);

/// Assigns the k-th smallest element of `target` to the position holding the
/// k-th smallest element of `values`. Sizes must match.
[[nodiscard]] std::vector<double> rank_remap(std::span<const double> values, std::vector<double> target);

/// Sample standard deviation with (n - 1) normalization.
[[nodiscard]] double sample_stddev(std::span<const double> values);

}  // namespace qmst
