#include "qmst/error.hpp"
#include "qmst/fluct.hpp"
#include "qmst/rng.hpp"
#include "reference/brute_force.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace qmst;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("partition") {
    SUBCASE("divisible length") {
        const auto p = partition(100, 20);
        CHECK(p.boxes_per_family == 5);
        CHECK(p.starts == std::vector<std::size_t>{0, 20, 40, 60, 80, 80, 60, 40, 20, 0});
    }
    SUBCASE("remainder") {
        const auto p = partition(105, 20);
        REQUIRE(p.box_count() == 10);
        CHECK(std::vector<std::size_t>(p.starts.begin() + 5, p.starts.end()) ==
              std::vector<std::size_t>{85, 65, 45, 25, 5});
        for (const auto start : p.starts) CHECK(start + 20 <= 105);
    }
    CHECK_THROWS_AS((void)partition(10, 20), ValidationError);
    CHECK_THROWS_AS((void)partition(10, 0), ValidationError);
}

TEST_CASE("DetrendConfig validation") {
    DetrendConfig cfg{2, {20, 100}, {1, 2}};
    CHECK(cfg.validate(1000).empty());
    CHECK(cfg.validate(300).size() == 1);  // 100 > 300 / 4
    cfg.scales = {3};
    CHECK_THROWS_AS((void)cfg.validate(1000), ValidationError);
    cfg.scales = {};
    CHECK_THROWS_AS((void)cfg.validate(1000), ValidationError);
    cfg.scales = {20};
    cfg.q_values = {0.0};
    CHECK_THROWS_AS((void)cfg.validate(1000), ValidationError);
    cfg.q_values = {-2.0};
    CHECK_THROWS_AS((void)cfg.validate(1000), ValidationError);
    CHECK_NOTHROW((void)cfg.validate(1000, true));
}

TEST_CASE("orthonormal basis") {
    for (const std::size_t s : {5u, 20u, 7800u}) {
        const PolynomialDetrender det(s, 3);
        for (unsigned a = 0; a <= 3; ++a)
            for (unsigned b = 0; b <= 3; ++b) {
                const auto pa = det.basis(a), pb = det.basis(b);
                const double dot = std::inner_product(pa.begin(), pa.end(), pb.begin(), 0.0);
                CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
            }
    }
    CHECK_THROWS_AS(PolynomialDetrender(3, 2), ValidationError);
}

TEST_CASE("residuals of polynomial profiles vanish") {
    const std::size_t s = 50;
    SUBCASE("constant box, linear cumsum") {
        const std::vector<double> box(s, 3.7);
        for (unsigned m = 1; m <= 3; ++m) {
            std::vector<double> out(s);
            PolynomialDetrender(s, m).residuals(box, out);
            for (const double r : out) CHECK(std::abs(r) < 1e-10 * 3.7 * s);
        }
    }
    SUBCASE("quadratic cumsum") {
        std::vector<double> box(s);
        for (std::size_t i = 0; i < s; ++i) box[i] = 0.5 + 0.25 * static_cast<double>(i);  // increments of a quadratic
        std::vector<double> out(s);
        PolynomialDetrender(s, 2).residuals(box, out);
        double scale = 0.0, sum = 0.0;
        for (const double b : box) scale = std::max(scale, std::abs(sum += b));
        for (const double r : out) CHECK(std::abs(r) < 1e-10 * scale);
    }
}

TEST_CASE("residuals match a dense normal-equation oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto x = noise(8, seed);
        const auto lib = detrended_residuals(x, 0, 8, 2);
        const auto ref = reference::box_residuals(x, 0, 8, 2);
        for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(lib[i] - static_cast<double>(ref[i])) < 1e-9);
    }
    const auto x = noise(500, 9);
    for (unsigned m : {0u, 1u, 3u}) {
        const auto lib = detrended_residuals(x, 37, 60, m);
        const auto ref = reference::box_residuals(x, 37, 60, m);
        for (std::size_t i = 0; i < 60; ++i) CHECK(std::abs(lib[i] - static_cast<double>(ref[i])) < 1e-9);
    }
}

TEST_CASE("restriction of the global profile gives the same residuals") {
    const auto x = noise(400, 4);
    std::vector<double> profile(x.size());
    std::partial_sum(x.begin(), x.end(), profile.begin());
    const PolynomialDetrender det(40, 2);
    const auto p = partition(x.size(), 40);
    for (const auto start : p.starts) {
        std::vector<double> a(40), b(40);
        det.residuals(std::span<const double>(x).subspan(start, 40), a);
        det.detrend_profile(std::span<const double>(profile).subspan(start, 40), b);
        for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
    }
}

TEST_CASE("box_moments") {
    const std::vector<double> a{1, -1, 1, -1}, b{1, 1, -1, -1};
    CHECK(box_moments(a, b).xy == 0.0);
    const auto self = box_moments(a, a);
    CHECK(self.xy == self.xx);
    CHECK(self.xx == 1.0);
    const auto r = noise(30, 2);
    std::vector<double> neg(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) neg[i] = -r[i];
    const auto anti = box_moments(r, neg);
    CHECK(anti.xy == -anti.xx);
    CHECK(anti.xx == anti.yy);
}

TEST_CASE("per-box Cauchy-Schwarz") {
    const auto x = noise(2000, 11), y = noise(2000, 12);
    std::vector<double> mixed(2000);
    for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = 0.6 * x[i] + 0.8 * y[i];
    const auto p = partition(2000, 25);
    const PolynomialDetrender det(25, 2);
    const BoxResiduals rx(x, p, det), ry(mixed, p, det);
    const auto xy = rx.moments_with(ry), xx = rx.variances(), yy = ry.variances();
    for (std::size_t nu = 0; nu < xy.size(); ++nu) {
        CHECK(xx[nu] >= 0.0);
        CHECK(std::abs(xy[nu]) <= std::sqrt(xx[nu] * yy[nu]) * (1 + 1e-14));
    }
}

TEST_CASE("fluctuation matches the brute-force oracle") {
    const auto x = noise(200, 21), y = noise(200, 22);
    for (const double q : {4.0, 1.0, 2.5, 6.0}) {
        CAPTURE(q);
        const auto lib = fluctuation(x, y, 20, q, 2);
        const auto ref = reference::fluctuation(x, y, 20, q, 2);
        CHECK(rel_diff(lib.f_xy, ref.xy) < 1e-10);
        CHECK(rel_diff(lib.f_xx, ref.xx) < 1e-10);
        CHECK(rel_diff(lib.f_yy, ref.yy) < 1e-10);
    }
    const auto x2 = noise(233, 23), y2 = noise(233, 24);
    const auto lib = fluctuation(x2, y2, 17, 3.0, 1);
    const auto ref = reference::fluctuation(x2, y2, 17, 3.0, 1);
    CHECK(rel_diff(lib.f_xy, ref.xy) < 1e-10);
}

TEST_CASE("fluctuation identities") {
    const auto x = noise(600, 31), y = noise(600, 32);
    std::vector<double> neg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];
    for (const double q : {0.5, 1.0, 2.0, 4.0, 6.0}) {
        CAPTURE(q);
        const auto self = fluctuation(x, x, 30, q, 2);
        CHECK(self.f_xy == self.f_xx);
        const auto f = fluctuation(x, y, 30, q, 2);
        const auto g = fluctuation(x, neg, 30, q, 2);
        CHECK(g.f_xy == -f.f_xy);
        CHECK(g.f_yy == f.f_yy);
        CHECK(f.f_xx >= 0.0);
    }
    // q = 2 is the plain mean of the box moments.
    const auto p = partition(600, 30);
    const PolynomialDetrender det(30, 2);
    const auto moments = BoxResiduals(x, p, det).moments_with(BoxResiduals(y, p, det));
    const double mean = std::accumulate(moments.begin(), moments.end(), 0.0) / static_cast<double>(moments.size());
    CHECK(fluctuation(x, y, 30, 2.0, 2).f_xy == doctest::Approx(mean).epsilon(1e-14));
    CHECK_THROWS_AS((void)fluctuation(x, y, 30, 0.0, 2), ValidationError);
}

TEST_CASE("large q isolates the dominant box") {
    auto x = noise(40, 41);
    for (std::size_t i = 0; i < 20; ++i) x[i] *= 100.0;
    const auto p = partition(40, 20);
    const PolynomialDetrender det(20, 2);
    const auto var = BoxResiduals(x, p, det).variances();
    const double top = *std::max_element(var.begin(), var.end());
    const double f = fluctuation(x, x, 20, 20.0, 2).f_xx;
    CHECK(std::abs(std::pow(f, 1.0 / 20.0) / std::sqrt(top) - 1.0) < 0.05);
    double prev = 0.0;
    for (const double q : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double root = std::pow(fluctuation(x, x, 20, q, 2).f_xx, 1.0 / q);
        CHECK(root > prev);
        prev = root;
    }
}

TEST_CASE("q_average") {
    const std::vector<double> v{4.0, -9.0, 1.0};
    CHECK(q_average(v, 2.0) == doctest::Approx(-4.0 / 3.0));
    CHECK(q_average(v, 1.0) == doctest::Approx((2.0 - 3.0 + 1.0) / 3.0));
    CHECK(q_average(v, 4.0) == doctest::Approx((16.0 - 81.0 + 1.0) / 3.0));
    const std::vector<double> z{1.0, 0.0};
    CHECK_THROWS_AS((void)q_average(z, -2.0), ComputationError);
}
