#include "qmst/error.hpp"
#include "qmst/ingest.hpp"
#include "qmst/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace qmst;

namespace {

SeriesPanel one(std::vector<double> v) { return SeriesPanel({"A"}, {std::move(v)}); }

bool same_multiset(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("log_returns follows the logarithm identity") {
    const PricePanel p({"A"}, {{1.0, std::exp(1.0), std::exp(3.0)}});
    const auto r = log_returns(p);
    REQUIRE(r.length() == 2);
    CHECK(r.series(0)[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.series(0)[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("log_returns of constant prices are zero") {
    const PricePanel p({"A"}, {{5, 5, 5, 5}});
    const auto r = log_returns(p);
    CHECK(std::vector<double>(r.series(0).begin(), r.series(0).end()) == std::vector<double>{0, 0, 0});
}

TEST_CASE("log_returns samples at stride dt without overlap") {
    std::vector<double> prices;
    for (int t = 0; t < 11; ++t) prices.push_back(std::exp(0.01 * t * t));
    const auto r = log_returns(PricePanel({"A"}, {prices}), ReturnOptions{3});
    REQUIRE(r.length() == 3);  // floor(10 / 3)
    for (std::size_t k = 0; k < 3; ++k) {
        const double a = 3.0 * k, b = 3.0 * (k + 1);
        CHECK(r.series(0)[k] == doctest::Approx(0.01 * (b * b - a * a)).epsilon(1e-12));
    }
}

TEST_CASE("log_returns of exponential growth is constant") {
    std::vector<double> prices;
    for (int t = 0; t < 500; ++t) prices.push_back(3.0 * std::exp(0.002 * t));
    const auto r = log_returns(PricePanel({"A"}, {prices}), ReturnOptions{5});
    for (const double v : r.series(0)) CHECK(v == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("log_returns rejects bad input") {
    CHECK_THROWS_WITH_AS((void)PricePanel({"A"}, {{1.0, 0.0, 2.0}}), doctest::Contains("index 1"), ValidationError);
    CHECK_THROWS_AS((void)PricePanel({"A"}, {{1.0, -3.0}}), ValidationError);
    CHECK_THROWS_AS((void)log_returns(PricePanel({"A"}, {{1.0, 2.0, 3.0}}), ReturnOptions{3}), ValidationError);
}

TEST_CASE("drop_gaps removes returns spanning session boundaries") {
    const PricePanel p({"A"}, {{1, 2, 4, 8, 16}}, std::vector<std::int64_t>{0, 1, 2, 100, 101});
    CHECK(log_returns(p).length() == 4);
    const auto dropped = log_returns(p, ReturnOptions{1, true});
    REQUIRE(dropped.length() == 3);
    for (const double v : dropped.series(0)) CHECK(v == doctest::Approx(std::log(2.0)));
}

TEST_CASE("shuffle permutes each series") {
    SUBCASE("length one is unchanged") {
        CHECK(shuffle(one({4.2}), 9).series(0)[0] == 4.2);
    }
    SUBCASE("multiset preserved, order changed, deterministic") {
        const auto panel = gaussian_panel(3, 1000, 5);
        const auto a = shuffle(panel, 77);
        const auto b = shuffle(panel, 77);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::vector<double> in(panel.series(i).begin(), panel.series(i).end());
            const std::vector<double> out(a.series(i).begin(), a.series(i).end());
            CHECK(same_multiset(in, out));
            CHECK(in != out);
            CHECK(out == std::vector<double>(b.series(i).begin(), b.series(i).end()));
        }
        CHECK(a.meta().steps.back() == "shuffle");
    }
    SUBCASE("series streams are independent of panel composition") {
        const auto panel = gaussian_panel(3, 200, 5);
        const SeriesPanel first({panel.label(0)}, {std::vector<double>(panel.series(0).begin(), panel.series(0).end())});
        const auto full = shuffle(panel, 3);
        const auto single = shuffle(first, 3);
        CHECK(std::equal(full.series(0).begin(), full.series(0).end(), single.series(0).begin()));
    }
}

TEST_CASE("shuffle matches the pinned golden output") {
    // Frozen from the first run with this seed (libstdc++ mt19937_64 + std::shuffle).
    const auto out = shuffle(one({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), 20261016);
    const std::vector<double> golden = {3, 6, 4, 5, 0, 7, 2, 1, 8, 9};
    CHECK(std::vector<double>(out.series(0).begin(), out.series(0).end()) == golden);
}

TEST_CASE("gaussianize preserves ranks and yields a normal sample") {
    SUBCASE("monotone input gives monotone output") {
        std::vector<double> v(100);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(0.05 * static_cast<double>(i));
        const auto g = gaussianize(one(v), 1);
        CHECK(std::is_sorted(g.series(0).begin(), g.series(0).end()));
    }
    SUBCASE("rank vector unchanged") {
        const auto panel = heavy_tailed_pair_panel(1, {0.5, 2000, 4}, 3.0);
        const auto g = gaussianize(panel, 2);
        for (std::size_t i = 0; i < panel.size(); ++i) CHECK(rank_order(panel.series(i)) == rank_order(g.series(i)));
        const auto again = gaussianize(g, 8);
        CHECK(rank_order(again.series(0)) == rank_order(g.series(0)));
    }
    SUBCASE("ties are broken by position") {
        const auto g = gaussianize(one({1, 1, 1, 0}), 3);
        CHECK(g.series(0)[3] < g.series(0)[0]);
        CHECK(g.series(0)[0] < g.series(0)[1]);
        CHECK(g.series(0)[1] < g.series(0)[2]);
    }
    SUBCASE("Kolmogorov-Smirnov against N(0,1) passes at 1%") {
        const auto panel = heavy_tailed_pair_panel(1, {0.0, 10000, 11}, 2.5);
        const auto g = gaussianize(panel, 12);
        std::vector<double> v(g.series(0).begin(), g.series(0).end());
        std::sort(v.begin(), v.end());
        const double n = static_cast<double>(v.size());
        double ks = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double f = normal_cdf(v[k]);
            ks = std::max({ks, std::abs(f - k / n), std::abs((k + 1) / n - f)});
        }
        CHECK(ks < 1.628 / std::sqrt(n));
    }
    CHECK_THROWS_AS((void)gaussianize(one({1.0}), 1), ValidationError);
}

TEST_CASE("sign_series") {
    const auto s = sign_series(one({0.3, -0.2, 0.0}));
    CHECK(std::vector<double>(s.series(0).begin(), s.series(0).end()) == std::vector<double>{1, -1, 0});
    const auto twice = sign_series(s);
    CHECK(std::equal(s.series(0).begin(), s.series(0).end(), twice.series(0).begin()));
    const auto pos = sign_series(one({1e-9, 4, 7}));
    for (const double v : pos.series(0)) CHECK(v == 1.0);
}

TEST_CASE("amplitude_partition_shuffle") {
    const auto panel = heavy_tailed_pair_panel(2, {0.6, 5000, 21}, 3.0);

    SUBCASE("an empty class is the identity") {
        const TransformSpec spec{TransformKind::amp_shuffle_above, 1e6, true, 4};
        const auto out = amplitude_partition_shuffle(panel, spec);
        for (std::size_t i = 0; i < panel.size(); ++i)
            CHECK(std::equal(panel.series(i).begin(), panel.series(i).end(), out.series(i).begin()));
    }
    SUBCASE("above: small values stay, large values permute among themselves") {
        const TransformSpec spec{TransformKind::amp_shuffle_above, 1.8, true, 4};
        const auto out = amplitude_partition_shuffle(panel, spec);
        for (std::size_t i = 0; i < panel.size(); ++i) {
            const auto in = panel.series(i);
            const double cut = 1.8 * sample_stddev(in);
            std::vector<double> before, after;
            bool moved = false;
            for (std::size_t t = 0; t < in.size(); ++t) {
                if (std::abs(in[t]) <= cut) {
                    CHECK(out.series(i)[t] == in[t]);
                } else {
                    before.push_back(in[t]);
                    after.push_back(out.series(i)[t]);
                    moved = moved || in[t] != out.series(i)[t];
                    CHECK(std::abs(out.series(i)[t]) > cut);
                }
            }
            CHECK(same_multiset(before, after));
            CHECK(moved);
        }
    }
    SUBCASE("below: values at or above 1.2 sigma are preserved") {
        const TransformSpec spec{TransformKind::amp_shuffle_below, 1.2, true, 5};
        const auto out = amplitude_partition_shuffle(panel, spec);
        for (std::size_t i = 0; i < panel.size(); ++i) {
            const auto in = panel.series(i);
            const double cut = 1.2 * sample_stddev(in);
            for (std::size_t t = 0; t < in.size(); ++t)
                if (std::abs(in[t]) >= cut) CHECK(out.series(i)[t] == in[t]);
            CHECK(same_multiset({in.begin(), in.end()}, {out.series(i).begin(), out.series(i).end()}));
        }
    }
    SUBCASE("signed mode only selects the positive tail") {
        const TransformSpec spec{TransformKind::amp_shuffle_above, 1.8, false, 4};
        const auto out = amplitude_partition_shuffle(panel, spec);
        const auto in = panel.series(0);
        const double cut = 1.8 * sample_stddev(in);
        for (std::size_t t = 0; t < in.size(); ++t)
            if (in[t] <= cut) CHECK(out.series(0)[t] == in[t]);
    }
    CHECK_THROWS_AS((void)amplitude_partition_shuffle(panel, TransformSpec{TransformKind::shuffle, 0, true, 1}),
                    ValidationError);
    CHECK_THROWS_AS((void)amplitude_partition_shuffle(panel, TransformSpec{TransformKind::amp_shuffle_above, 0, true, 1}),
                    ValidationError);
}

TEST_CASE("TransformSpec text form") {
    const auto a = TransformSpec::parse("amp-shuffle-below:1.2", 3);
    CHECK(a.kind == TransformKind::amp_shuffle_below);
    CHECK(a.threshold_sigma == 1.2);
    CHECK(a.absolute);
    CHECK(TransformSpec::parse(a.to_string(), 3).threshold_sigma == 1.2);
    CHECK_FALSE(TransformSpec::parse("amp-shuffle-above:1.8:signed", 0).absolute);
    CHECK(TransformSpec::parse("gaussianize", 0).kind == TransformKind::gaussianize);
    CHECK_THROWS_AS((void)TransformSpec::parse("amp-shuffle-above:-1", 0), ValidationError);
    CHECK_THROWS_AS((void)TransformSpec::parse("scramble", 0), ValidationError);
    CHECK_THROWS_AS((void)TransformSpec::parse("amp-shuffle-above", 0), ValidationError);
}

TEST_CASE("every transform preserves length and is a pure function of (input, seed)") {
    const auto panel = heavy_tailed_pair_panel(2, {0.4, 700, 8}, 4.0);
    for (const char* text : {"shuffle", "gaussianize", "sign", "amp-shuffle-above:1.8", "amp-shuffle-below:1.2"}) {
        CAPTURE(text);
        const auto spec = TransformSpec::parse(text, 99);
        const auto a = apply_transform(panel, spec);
        const auto b = apply_transform(panel, spec);
        CHECK(a.length() == panel.length());
        CHECK(a.all_series() == b.all_series());
    }
}

TEST_CASE("aggregate_returns sums non-overlapping blocks") {
    const auto a = aggregate_returns(one({1, 2, 3, 4, 5, 6, 7}), 3);
    CHECK(std::vector<double>(a.series(0).begin(), a.series(0).end()) == std::vector<double>{6, 15});
}

TEST_CASE("panel CSV round trip with timestamp column") {
    const auto dir = std::filesystem::temp_directory_path() / "qmst_ingest_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "prices.csv").string();
    {
        std::ofstream f(path);
        f << "timestamp,AAA,BBB\n0,10,20\n1,11,19\n2,12.5,21\n";
    }
    const auto prices = read_price_panel(path);
    CHECK(prices.tickers() == std::vector<std::string>{"AAA", "BBB"});
    REQUIRE(prices.timestamps());
    CHECK(prices.timestamps()->back() == 2);
    const auto r = log_returns(prices);
    write_series_panel((dir / "r.csv").string(), r);
    const auto back = read_series_panel((dir / "r.csv").string());
    CHECK(back.all_series() == r.all_series());
    {
        std::ofstream f(path);
        f << "AAA,BBB\n1,2\n3,\n";
    }
    CHECK_THROWS_AS((void)read_price_panel(path), IoError);
    {
        std::ofstream f(path);
        f << "AAA,AAA\n1,2\n";
    }
    CHECK_THROWS_AS((void)read_price_panel(path), ValidationError);
}
