#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmst {

/// Detrending request: polynomial order, box sizes and q exponents.
struct DetrendConfig {
    unsigned order = 2;
    std::vector<std::size_t> scales;
    std::vector<double> q_values;

    /// Throws ValidationError on an empty grid, a scale below order + 2,
    /// a scale above `length`, or q == 0 (q < 0 only when `allow_negative_q`).
    /// Returns human-readable warnings for scales above length / 4.
    [[nodiscard]] std::vector<std::string> validate(std::size_t length, bool allow_negative_q = false) const;
};

/// Throws ValidationError for q == 0 or non-finite q.
void require_supported_q(double q);

/// 2*M_s boxes of `scale` points: M_s anchored at the start (offsets 0, s, ...)
/// followed by M_s anchored at the end (T - s, T - 2s, ...).
struct BoxPartition {
    std::size_t length = 0;
    std::size_t scale = 0;
    std::size_t boxes_per_family = 0;
    std::vector<std::size_t> starts;

    [[nodiscard]] std::size_t box_count() const noexcept { return starts.size(); }
};

[[nodiscard]] BoxPartition partition(std::size_t length, std::size_t scale);

/// Least-squares removal of an order-m polynomial from the in-box profile.
///
/// The polynomial basis is orthonormal over the abscissae i = 1..s (mapped
/// to [-1, 1]) and generated by the Stieltjes three-term recurrence with one
/// pass of re-orthogonalization, so the fit stays well conditioned for
/// boxes of several thousand points.
class PolynomialDetrender {
public:
    PolynomialDetrender(std::size_t scale, unsigned order);

    [[nodiscard]] std::size_t scale() const noexcept { return scale_; }
    [[nodiscard]] unsigned order() const noexcept { return order_; }

    /// Integrates `box` (cumulative sum) and removes the fitted polynomial.
    void residuals(std::span<const double> box, std::span<double> out) const;
    /// Removes the fitted polynomial from an already integrated profile.
    void detrend_profile(std::span<const double> profile, std::span<double> out) const;

    /// Basis function k evaluated at the s abscissae.
    [[nodiscard]] std::span<const double> basis(unsigned k) const;

private:
    std::size_t scale_;
    unsigned order_;
    std::vector<double> basis_;
};

/// Residuals of `series[start, start + s)` for an order-m fit.
[[nodiscard]] std::vector<double> detrended_residuals(std::span<const double> series, std::size_t start,
                                                      std::size_t scale, unsigned order);

/// Per-box detrended covariance and variances.
struct BoxMoments {
    double xy = 0.0;
    double xx = 0.0;
    double yy = 0.0;
};

[[nodiscard]] BoxMoments box_moments(std::span<const double> res_x, std::span<const double> res_y);

/// q-order fluctuation functions for one pair at one scale.
struct FluctuationSet {
    double f_xy = 0.0;
    double f_xx = 0.0;
    double f_yy = 0.0;
    std::size_t scale = 0;
    double q = 0.0;
    unsigned order = 0;
};

/// (1 / n) * sum sign(f) |f|^(q/2) over box moments `f`, summed in index
/// order. Throws ComputationError when q < 0 meets a zero moment.
[[nodiscard]] double q_average(std::span<const double> box_values, double q);

[[nodiscard]] FluctuationSet fluctuation(std::span<const double> x, std::span<const double> y, std::size_t scale,
                                         double q, unsigned order);

/// Detrended residuals of every box of one series at one (s, m); the
/// building block reused by all pairs involving the series.
class BoxResiduals {
public:
    BoxResiduals(std::span<const double> series, const BoxPartition& boxes, const PolynomialDetrender& detrender);

    [[nodiscard]] std::size_t box_count() const noexcept { return box_count_; }
    [[nodiscard]] std::size_t scale() const noexcept { return scale_; }
    [[nodiscard]] std::span<const double> box(std::size_t nu) const {
        return {values_.data() + nu * scale_, scale_};
    }

    /// f2(nu) = (1/s) sum_i self(i) other(i) for every box.
    [[nodiscard]] std::vector<double> moments_with(const BoxResiduals& other) const;
    [[nodiscard]] std::vector<double> variances() const { return moments_with(*this); }

private:
    std::size_t scale_;
    std::size_t box_count_;
    std::vector<double> values_;
};

}  // namespace qmst
