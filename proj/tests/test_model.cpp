#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "ladderforge/model.hpp"

using namespace ladderforge;

namespace {

OperatingPoint op(double r, double d, double t, int crf = 23) {
    OperatingPoint p;
    p.params = {0, 1920, 1080, crf};
    p.rate_kbps = r;
    p.mse = d;
    p.cpu_s = t;
    return p;
}

ShotRecord shot(const std::string& id, double duration,
                std::vector<OperatingPoint> points) {
    ShotRecord s;
    s.shot_id = id;
    s.duration_s = duration;
    s.points = std::move(points);
    return s;
}

}  // namespace

TEST_CASE("psnr matches hand-computed references") {
    // 10-bit peak 1023: 20*log10(1023) = 60.1975126742...
    CHECK(psnr_from_mse(1.0, 10) == doctest::Approx(60.1975126742432).epsilon(1e-10));
    // 8-bit peak 255, mse 100: 20*log10(255) - 20 = 28.13080361...
    CHECK(psnr_from_mse(100.0, 8) == doctest::Approx(28.1308036087).epsilon(1e-10));
    // Lower distortion means higher quality.
    CHECK(psnr_from_mse(0.5, 10) > psnr_from_mse(1.0, 10));
    // 12-bit peak is 4095.
    CHECK(psnr_from_mse(1.0, 12) == doctest::Approx(20.0 * std::log10(4095.0)).epsilon(1e-12));
}

TEST_CASE("psnr/mse conversions invert each other") {
    for (const double mse : {1e-6, 0.037, 1.0, 250.0, 9e7}) {
        for (const int depth : {8, 10, 12}) {
            const double back = mse_from_psnr(psnr_from_mse(mse, depth), depth);
            CHECK(back == doctest::Approx(mse).epsilon(1e-12));
        }
    }
}

TEST_CASE("psnr rejects bad arguments") {
    CHECK_THROWS_AS(psnr_from_mse(0.0, 10), NumericError);
    CHECK_THROWS_AS(psnr_from_mse(-1.0, 10), NumericError);
    CHECK_THROWS_AS(psnr_from_mse(std::nan(""), 10), NumericError);
    CHECK_THROWS_AS(psnr_from_mse(1.0, 9), InputError);
    CHECK_THROWS_AS(mse_from_psnr(40.0, 16), InputError);
}

TEST_CASE("validate_dataset accepts a clean dataset") {
    const std::vector<ShotRecord> shots = {
        shot("a", 2.0, {op(100, 4, 10, 27), op(200, 2, 20, 23)}),
        shot("b", 3.5, {op(50, 9, 5)}),
    };
    const auto report = validate_dataset(shots);
    CHECK(report.ok());
    CHECK(report.issues.empty());
}

TEST_CASE("validate_dataset flags hard violations") {
    SUBCASE("duplicate shot ids") {
        const std::vector<ShotRecord> shots = {shot("a", 1, {op(1, 1, 1)}),
                                               shot("a", 1, {op(2, 2, 2)})};
        const auto report = validate_dataset(shots);
        CHECK_FALSE(report.ok());
        CHECK(report.issues.size() == 1);
        CHECK(report.issues[0].message.find("duplicate shot id") != std::string::npos);
    }
    SUBCASE("non-positive metrics") {
        auto bad = shot("a", 1, {op(0, 1, 1, 21), op(1, -2, 1, 23), op(1, 1, 0, 25)});
        const auto report = validate_dataset({bad});
        CHECK_FALSE(report.ok());
        CHECK(report.issues.size() == 3);
        CHECK(report.issues[0].message.find("non-positive rate") != std::string::npos);
        CHECK(report.issues[1].message.find("non-positive distortion") != std::string::npos);
        CHECK(report.issues[2].message.find("non-positive time") != std::string::npos);
    }
    SUBCASE("non-positive duration") {
        const auto report = validate_dataset({shot("a", 0.0, {op(1, 1, 1)})});
        CHECK_FALSE(report.ok());
    }
    SUBCASE("empty shot") {
        const auto report = validate_dataset({shot("a", 1.0, {})});
        CHECK_FALSE(report.ok());
        CHECK(report.issues[0].message.find("no operating points") != std::string::npos);
    }
    SUBCASE("duplicate params within a shot") {
        auto a = op(1, 1, 1);
        auto b = op(2, 2, 2);  // different metrics, same params
        const auto report = validate_dataset({shot("a", 1.0, {a, b})});
        CHECK_FALSE(report.ok());
        CHECK(report.issues[0].message.find("duplicate params") != std::string::npos);
        CHECK(report.issues[0].shot_id == "a");
    }
    SUBCASE("same params in different shots is fine") {
        const auto report =
            validate_dataset({shot("a", 1, {op(1, 1, 1)}), shot("b", 1, {op(1, 1, 1)})});
        CHECK(report.ok());
    }
    SUBCASE("non-finite values") {
        const auto report =
            validate_dataset({shot("a", 1, {op(std::numeric_limits<double>::infinity(), 1, 1)})});
        CHECK_FALSE(report.ok());
    }
}

TEST_CASE("validation messages carry shot ids and severity") {
    const auto report = validate_dataset({shot("clip7", 1.0, {op(-1, 1, 1)})});
    REQUIRE(report.issues.size() == 1);
    const auto msgs = report.messages();
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].find("error: ") == 0);
    CHECK(msgs[0].find("clip7") != std::string::npos);
}

TEST_CASE("make_representation computes weighted and unweighted aggregates") {
    const std::vector<ShotRecord> shots = {
        shot("a", 2.0, {op(100, 4, 10)}),
        shot("b", 6.0, {op(999, 99, 99, 19), op(200, 8, 30, 31)}),
    };
    const auto rep = make_representation(shots, {0, 1});
    CHECK(rep.selection == std::vector<std::size_t>{0, 1});
    // Duration-weighted means over 8 seconds total.
    CHECK(rep.agg_rate == doctest::Approx((2.0 * 100 + 6.0 * 200) / 8.0).epsilon(1e-15));
    CHECK(rep.agg_distortion == doctest::Approx((2.0 * 4 + 6.0 * 8) / 8.0).epsilon(1e-15));
    // Time aggregates are plain totals.
    CHECK(rep.agg_time == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(rep.sums.rate == doctest::Approx(300.0).epsilon(1e-15));
    CHECK(rep.sums.distortion == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(rep.sums.time == doctest::Approx(40.0).epsilon(1e-15));
}

TEST_CASE("make_representation rejects bad selections") {
    const std::vector<ShotRecord> shots = {shot("a", 1.0, {op(1, 1, 1)})};
    CHECK_THROWS_AS(make_representation(shots, {}), InputError);
    CHECK_THROWS_AS(make_representation(shots, {0, 0}), InputError);
    CHECK_THROWS_AS(make_representation(shots, {1}), InputError);
}
