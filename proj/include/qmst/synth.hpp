#pragma once

#include "qmst/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qmst {

struct ArfimaParams {
    /// Fractional differencing parameter, |d| < 0.5.
    double d = 0.3;
    std::size_t length = 0;
    /// MA(infinity) truncation K; also the discarded burn-in.
    std::size_t truncation = 10000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CorrelatedPairParams {
    /// Coupling in [0, 1]: y = gamma x + sqrt(1 - gamma^2) eta.
    double gamma = 0.0;
    std::size_t length = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// MA weights a_0..a_K of (1 - B)^(-d): a_0 = 1, a_j = a_{j-1} (j - 1 + d) / j.
[[nodiscard]] std::vector<double> arfima_weights(double d, std::size_t truncation);

/// x(t) = sum_j weights[j] noise[t + K - j] for t in [0, length), with
/// K = weights.size() - 1; noise must hold length + K samples. FFT based.
[[nodiscard]] std::vector<double> moving_average_filter(std::span<const double> noise,
                                                        std::span<const double> weights, std::size_t length);

/// n mutually independent ARFIMA(0, d, 0) series driven by standard normal
/// innovations; series i uses stream i of the seed.
[[nodiscard]] SeriesPanel arfima_panel(std::size_t n, const ArfimaParams& params, unsigned threads = 0);

/// n_pairs pairs labelled X<k>, Y<k>; pair k uses stream k of the seed.
[[nodiscard]] SeriesPanel correlated_pair_panel(std::size_t n_pairs, const CorrelatedPairParams& params);

/// correlated_pair_panel with each series rank-remapped onto an independent
/// Student-t sample with `dof` degrees of freedom (Gaussian copula, heavy
/// tailed marginals).
[[nodiscard]] SeriesPanel heavy_tailed_pair_panel(std::size_t n_pairs, const CorrelatedPairParams& params,
                                                  double dof);

/// Independent standard normal series.
[[nodiscard]] SeriesPanel gaussian_panel(std::size_t n, std::size_t length, std::uint64_t seed);

}  // namespace qmst
