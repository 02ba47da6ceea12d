#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lattice/numerics.hpp"

using namespace lattice;
using Catch::Approx;

namespace {

// Finite-difference oracle for the directional derivative, independent of the
// analytic chain-rule path in swish_rn_jvp.
std::vector<double> central_difference_jvp(std::span<const double> x,
                                           std::span<const double> tangent, double eps,
                                           double step = 1e-5) {
    std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += step * tangent[i];
        minus[i] -= step * tangent[i];
    }
    const auto fp = swish_rn(plus, eps);
    const auto fm = swish_rn(minus, eps);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (fp[i] - fm[i]) / (2.0 * step);
    return out;
}

double l2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("correlation loss hand-computed case") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 2, 4};
    // population moments: cov = 1, sigma_x = sigma_y = sqrt(1.25), loss = 0.2
    CHECK(correlation_loss(x, y, 1e-15) == Approx(0.2).margin(1e-9));
    CHECK(correlation_loss(x, y) == Approx(0.2).margin(1e-6)); // default eps shifts at eps scale
}

TEST_CASE("correlation loss identity and anti-correlation") {
    const std::vector<double> x{0.3, 1.7, 2.4, -0.8, 3.1};
    std::vector<double> neg(x);
    for (double& v : neg) v = -v;
    CHECK(correlation_loss(x, x, 1e-15) == Approx(0.0).margin(1e-9));
    CHECK(correlation_loss(x, neg, 1e-15) == Approx(2.0).margin(1e-9));
    CHECK(correlation_loss(x, x) == Approx(0.0).margin(1e-6));
    CHECK(correlation_loss(x, neg) == Approx(2.0).margin(1e-6));
}

TEST_CASE("correlation loss is symmetric") {
    Rng rng(Seed{11});
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(8), y(8);
        for (auto& v : x) v = rng.uniform01() * 4 - 2;
        for (auto& v : y) v = rng.uniform01() * 4 - 2;
        CHECK(correlation_loss(x, y) == Approx(correlation_loss(y, x)).margin(1e-12));
    }
}

TEST_CASE("correlation loss is invariant under positive affine transforms") {
    Rng rng(Seed{12});
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(12), y(12);
        for (auto& v : x) v = rng.uniform01() * 4 - 2;
        for (auto& v : y) v = rng.uniform01() * 4 - 2;
        const double a = 0.25 + rng.uniform01() * 4.0;
        const double b = rng.uniform01() * 10 - 5;
        std::vector<double> xt(x);
        for (double& v : xt) v = a * v + b;
        CHECK(correlation_loss(xt, y, 1e-9) == Approx(correlation_loss(x, y, 1e-9)).margin(1e-6));
    }
}

TEST_CASE("correlation loss neutral value for constant input") {
    const std::vector<double> c{2, 2, 2, 2}, y{1, 2, 3, 4};
    CHECK(correlation_loss(c, y) == Approx(1.0).margin(1e-9));
    CHECK(correlation_loss(y, c) == Approx(1.0).margin(1e-9));
}

TEST_CASE("correlation loss input contract") {
    const std::vector<double> x{1, 2}, y3{1, 2, 3}, one{1};
    CHECK_THROWS_AS(correlation_loss(x, y3), UsageError);
    CHECK_THROWS_AS(correlation_loss(one, one), UsageError);
    CHECK_THROWS_AS(correlation_loss(x, x, 0.0), UsageError);
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(correlation_loss(bad, x), DataError);
}

TEST_CASE("rms_norm examples") {
    const auto constant = rms_norm(std::vector<double>{2, 2});
    CHECK(constant[0] == Approx(1.0).margin(1e-6));
    CHECK(constant[1] == Approx(1.0).margin(1e-6));

    const auto zeros = rms_norm(std::vector<double>{0, 0, 0});
    for (double v : zeros) CHECK(v == 0.0);

    const auto pair = rms_norm(std::vector<double>{3, 4}); // mean square 12.5
    CHECK(pair[0] == Approx(3.0 / std::sqrt(12.5)).margin(1e-3));
    CHECK(pair[1] == Approx(4.0 / std::sqrt(12.5)).margin(1e-3));

    CHECK_THROWS_AS(rms_norm(std::vector<double>{}), UsageError);
    CHECK_THROWS_AS(rms_norm(std::vector<double>{std::nan("")}), DataError);
}

TEST_CASE("swish_rn examples and output bound") {
    const auto constant = swish_rn(std::vector<double>{2, 2});
    const double sigma1 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(constant[0] == Approx(sigma1).margin(1e-4)); // r ~ 1, sigmoid(1) ~ 0.73106
    CHECK(constant[1] == Approx(sigma1).margin(1e-4));

    const auto zeros = swish_rn(std::vector<double>{0, 0});
    for (double v : zeros) CHECK(v == 0.0);

    // outputs bounded by |r| since the gate is at most 1
    Rng rng(Seed{3});
    std::vector<double> x(16);
    for (auto& v : x) v = rng.uniform01() * 20 - 10;
    const auto r = rms_norm(x);
    const auto out = swish_rn(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(out[i]) <= std::abs(r[i]) + 1e-15);

    // huge magnitudes stay finite; normalization bounds the scale
    std::vector<double> huge(8, 1e6);
    huge[0] = -1e6;
    for (double v : swish_rn(huge)) {
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= std::sqrt(8.0));
    }
}

TEST_CASE("swish_rn_hard deviation from the exact gate is bounded") {
    // dense scan of r * sigmoid(r) vs r * clamp((r+3)/6, 0, 1) on [-6, 6]
    double max_dev = 0.0;
    for (int i = 0; i <= 12000; ++i) {
        const double r = -6.0 + i * 0.001;
        const double exact = r / (1.0 + std::exp(-r));
        const double hard = r * std::clamp((r + 3.0) / 6.0, 0.0, 1.0);
        max_dev = std::max(max_dev, std::abs(exact - hard));
    }
    CHECK(max_dev < 0.15);  // observed maximum ~0.1423 near |r| = 3
    CHECK(max_dev > 0.14);

    const auto zeros = swish_rn_hard(std::vector<double>{0, 0});
    for (double v : zeros) CHECK(v == 0.0);
}

TEST_CASE("swish_rn_jvp matches finite differences") {
    Rng rng(Seed{21});
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(8), tangent(8);
        for (auto& v : x) v = rng.uniform01() * 20 - 10;
        for (auto& v : tangent) v = rng.uniform01() * 2 - 1;
        const auto analytic = swish_rn_jvp(x, tangent);
        const auto numeric = central_difference_jvp(x, tangent, kDefaultEps);
        std::vector<double> diff(8);
        for (int i = 0; i < 8; ++i) diff[i] = analytic[i] - numeric[i];
        const double rel = l2(diff) / std::max(l2(numeric), 1e-12);
        INFO("trial " << t << " relative error " << rel);
        CHECK(rel <= 1e-4);
    }
}

TEST_CASE("swish_rn_jvp at zero input and zero tangent") {
    const std::vector<double> zeros(4, 0.0), tangent{1, -2, 0.5, 3};
    const auto analytic = swish_rn_jvp(zeros, tangent);
    const auto numeric = central_difference_jvp(zeros, tangent, kDefaultEps);
    for (int i = 0; i < 4; ++i) CHECK(analytic[i] == Approx(numeric[i]).margin(1e-7));

    const std::vector<double> x{1, 2, 3, 4}, zero_tangent(4, 0.0);
    for (double v : swish_rn_jvp(x, zero_tangent)) CHECK(v == 0.0);

    const std::vector<double> short_tangent{1};
    CHECK_THROWS_AS(swish_rn_jvp(x, short_tangent), UsageError);
}

TEST_CASE("clip_features") {
    const auto clipped = clip_features(std::vector<double>{-5, 0, 5}, 3.0);
    CHECK(clipped == std::vector<double>{-3, 0, 3});
    CHECK(clip_features(std::vector<double>{1, -2}, 3.0) == std::vector<double>{1, -2});
    CHECK(clip_features(std::vector<double>{1e9}, 1.0) == std::vector<double>{1});
    CHECK_THROWS_AS(clip_features(std::vector<double>{1}, 0.0), UsageError);
}

TEST_CASE("smooth_labels") {
    const auto smoothed = smooth_labels(std::vector<double>{0, 1}, 0.1);
    CHECK(smoothed[0] == Approx(0.05));
    CHECK(smoothed[1] == Approx(0.95));
    CHECK(smooth_labels(std::vector<double>{0, 1}, 0.0) == std::vector<double>{0, 1});
    CHECK(smooth_labels(std::vector<double>{1}, 0.5)[0] == Approx(0.75));

    // order preservation
    const auto ordered = smooth_labels(std::vector<double>{0, 1, 0, 1}, 0.3);
    CHECK(ordered[0] < ordered[1]);
    CHECK(ordered[0] == ordered[2]);

    CHECK_THROWS_AS(smooth_labels(std::vector<double>{0.5}, 0.1), UsageError);
    CHECK_THROWS_AS(smooth_labels(std::vector<double>{0}, 1.0), UsageError);
    CHECK_THROWS_AS(smooth_labels(std::vector<double>{0}, -0.1), UsageError);
}
