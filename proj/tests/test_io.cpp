#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "ladderforge/io.hpp"
#include "ladderforge/rdtfit.hpp"
#include "ladderforge/synth.hpp"
#include "testutil.hpp"

using namespace ladderforge;

namespace {

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

// Small but fully featured analyzed dataset: enough points for fits.
std::vector<ShotRecord> analyzed_fixture() {
    SynthConfig cfg;
    cfg.presets = {{0, "fast", 1.0}, {2, "medium", 3.0}, {5, "slow", 10.0}};
    cfg.resolutions = {{1280, 720}, {640, 360}};
    cfg.crf_range = {20, 30, 5};
    cfg.noise_sigma = 0.05;
    cfg.seed = 11;
    cfg.duration_s = 2.5;
    std::vector<ShotRecord> shots = {gen_shot(cfg, "alpha"), gen_shot(cfg, "beta")};
    std::vector<ShotRecord> out;
    for (auto& outcome : analyze_dataset(std::move(shots))) {
        out.push_back(std::move(outcome.shot));
    }
    return out;
}

void check_points_equal(const ShotRecord& a, const ShotRecord& b) {
    REQUIRE(a.points.size() == b.points.size());
    CHECK(a.shot_id == b.shot_id);
    CHECK(same_bits(a.duration_s, b.duration_s));
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].params.preset_idx == b.points[i].params.preset_idx);
        CHECK(a.points[i].params.width == b.points[i].params.width);
        CHECK(a.points[i].params.height == b.points[i].params.height);
        CHECK(a.points[i].params.crf == b.points[i].params.crf);
        CHECK(same_bits(a.points[i].rate_kbps, b.points[i].rate_kbps));
        CHECK(same_bits(a.points[i].mse, b.points[i].mse));
        CHECK(same_bits(a.points[i].cpu_s, b.points[i].cpu_s));
    }
}

}  // namespace

TEST_CASE("doubles survive a text round trip bit for bit") {
    const double values[] = {0.1,
                             1.0 / 3.0,
                             1e300,
                             1e-300,
                             -2.5e-8,
                             0.0,
                             123456789012345.67,
                             std::nextafter(1.0, 2.0),
                             6.02214076e23};
    for (const double v : values) {
        CAPTURE(v);
        CHECK(same_bits(io::parse_double(io::format_double(v), "t"), v));
    }
    // Shortest forms, not padded digit dumps.
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("numeric parsing is strict about full tokens") {
    CHECK(io::parse_double(" 1.5\t", "t") == 1.5);
    CHECK(io::parse_long("-42", "t") == -42);
    CHECK(io::parse_index("7", "t") == 7);
    for (const char* bad : {"", "abc", "1.5x", "1e", "1 2", "0x10"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(io::parse_double(bad, "t"), InputError);
    }
    CHECK_THROWS_AS(io::parse_long("1.5", "t"), InputError);
    CHECK_THROWS_AS(io::parse_long("99999999999999999999999", "t"), InputError);
    CHECK_THROWS_AS(io::parse_index("-3", "t"), InputError);
    CHECK_THROWS_WITH(io::parse_double("oops", "line 3 rate_kbps"),
                      "line 3 rate_kbps: invalid number 'oops'");
}

TEST_CASE("datasets round trip exactly") {
    std::vector<ShotRecord> shots(2);
    shots[0].shot_id = "intro";
    shots[0].duration_s = 0.1;
    shots[0].points.push_back({{0, 1920, 1080, 23}, 1.0 / 3.0, 17.25, 1e-3});
    shots[0].points.push_back({{4, 1280, 720, 27}, 1234.5678, 0.125, 98.6});
    shots[1].shot_id = "chase";
    shots[1].duration_s = 12.75;
    shots[1].points.push_back({{7, 3840, 2160, 19}, 54321.0, 3.14159, 12345.6789});

    std::stringstream buf;
    io::write_dataset(buf, shots);

    SUBCASE("structure of the text") {
        std::string line;
        std::getline(buf, line);
        CHECK(line == "# ladderforge-v1 dataset");
        std::getline(buf, line);
        CHECK(line ==
              "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s");
        std::getline(buf, line);
        CHECK(line == "intro,0.1,0,1920,1080,23,0.3333333333333333,17.25,0.001");
    }
    SUBCASE("read back") {
        const auto parsed = io::read_dataset(buf);
        REQUIRE(parsed.size() == 2);
        check_points_equal(parsed[0], shots[0]);
        check_points_equal(parsed[1], shots[1]);
        CHECK_FALSE(parsed[0].hull_indices.has_value());
        CHECK_FALSE(parsed[0].fit.has_value());
    }
}

TEST_CASE("dataset reading accepts external CSV conventions") {
    SUBCASE("no version line, CRLF endings, comments, interleaved shots") {
        const std::string text =
            "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s\r\n"
            "a,1,0,640,360,23,100,5,1\r\n"
            "# a comment\r\n"
            "b,2,0,640,360,23,120,6,2\r\n"
            "a,1,0,640,360,25,80,7,1\r\n";
        std::stringstream buf(text);
        const auto shots = io::read_dataset(buf);
        REQUIRE(shots.size() == 2);  // grouped by first appearance
        CHECK(shots[0].shot_id == "a");
        CHECK(shots[0].points.size() == 2);
        CHECK(shots[1].shot_id == "b");
    }
    SUBCASE("wrong header") {
        std::stringstream buf("rate,mse\n1,2\n");
        CHECK_THROWS_AS(io::read_dataset(buf), InputError);
    }
    SUBCASE("wrong field count names the line") {
        std::stringstream buf(
            "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s\n"
            "a,1,0,640,360,23,100,5\n");
        CHECK_THROWS_WITH_AS(io::read_dataset(buf), "line 2: expected 9 fields, got 8",
                             InputError);
    }
    SUBCASE("duration may not change mid-file") {
        std::stringstream buf(
            "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s\n"
            "a,1,0,640,360,23,100,5,1\n"
            "a,2,0,640,360,25,80,7,1\n");
        CHECK_THROWS_WITH_AS(io::read_dataset(buf),
                             "line 3: shot 'a' changes duration mid-file", InputError);
    }
    SUBCASE("bad shot ids are rejected") {
        std::stringstream buf(
            "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s\n"
            "a=b,1,0,640,360,23,100,5,1\n");
        CHECK_THROWS_AS(io::read_dataset(buf), InputError);
    }
    SUBCASE("a dataset reader rejects other kinds") {
        std::stringstream buf("# ladderforge-v1 table\n1,2,3,4,5,a=0\n");
        CHECK_THROWS_WITH_AS(io::read_dataset(buf),
                             "line 1: expected a dataset file, found 'table'", InputError);
    }
}

TEST_CASE("analysis files rebuild the exact shot records") {
    std::vector<ShotRecord> shots = analyzed_fixture();
    REQUIRE(shots[0].fit.has_value());
    REQUIRE(shots[0].multipliers.has_value());
    // Make the second shot exercise the sparser layouts: keep the fit but
    // drop the multipliers, as analyze does for non-monotone fits.
    shots[1].multipliers.reset();

    std::stringstream buf;
    io::write_analysis(buf, shots);
    const auto parsed = io::read_analysis(buf);
    REQUIRE(parsed.size() == 2);
    for (std::size_t s = 0; s < 2; ++s) {
        check_points_equal(parsed[s], shots[s]);
        REQUIRE(parsed[s].hull_indices.has_value());
        CHECK(*parsed[s].hull_indices == *shots[s].hull_indices);
        REQUIRE(parsed[s].fit.has_value());
        CHECK(same_bits(parsed[s].fit->c, shots[s].fit->c));
        CHECK(same_bits(parsed[s].fit->k1, shots[s].fit->k1));
        CHECK(same_bits(parsed[s].fit->k2, shots[s].fit->k2));
        CHECK(same_bits(parsed[s].fit->r_squared, shots[s].fit->r_squared));
        CHECK(same_bits(parsed[s].fit->c_prime, shots[s].fit->c_prime));
    }
    REQUIRE(parsed[0].multipliers.has_value());
    REQUIRE(parsed[0].multipliers->size() == shots[0].multipliers->size());
    for (std::size_t k = 0; k < parsed[0].multipliers->size(); ++k) {
        CHECK(same_bits((*parsed[0].multipliers)[k].lambda,
                        (*shots[0].multipliers)[k].lambda));
        CHECK(same_bits((*parsed[0].multipliers)[k].mu, (*shots[0].multipliers)[k].mu));
    }
    CHECK_FALSE(parsed[1].multipliers.has_value());
}

TEST_CASE("analysis files survive a bare points-only shot") {
    ShotRecord shot;
    shot.shot_id = "raw";
    shot.duration_s = 3.0;
    shot.points.push_back({{0, 640, 360, 23}, 100.0, 5.0, 1.0});
    std::stringstream buf;
    io::write_analysis(buf, {shot});
    const auto parsed = io::read_analysis(buf);
    REQUIRE(parsed.size() == 1);
    check_points_equal(parsed[0], shot);
    CHECK_FALSE(parsed[0].hull_indices.has_value());
    CHECK_FALSE(parsed[0].fit.has_value());
    CHECK_FALSE(parsed[0].multipliers.has_value());
}

TEST_CASE("analysis writing refuses misaligned multipliers") {
    std::vector<ShotRecord> shots = analyzed_fixture();
    shots[0].multipliers->pop_back();
    std::stringstream buf;
    CHECK_THROWS_AS(io::write_analysis(buf, shots), InputError);
}

TEST_CASE("analysis reading rejects malformed structure") {
    const std::string header = "# ladderforge-v1 analysis\n";
    auto reject = [&](const std::string& body, const char* expected) {
        std::stringstream buf(header + body);
        CHECK_THROWS_WITH_AS(io::read_analysis(buf), expected, InputError);
    };
    reject("point,a,0,0,640,360,23,100,5,1\n", "line 2: row before any 'shot' row");
    reject("shot,a,1,2\npoint,a,1,0,640,360,23,100,5,1\n",
           "line 3: point rows must be consecutive from 0");
    reject("shot,a,1,2\npoint,a,0,0,640,360,23,100,5,1\n",
           "analysis: shot 'a' point count mismatch");
    reject("shot,a,1,1\npoint,a,0,0,640,360,23,100,5,1\nhull,a,5\n",
           "analysis: shot 'a' hull index out of range");
    reject(
        "shot,a,1,2\n"
        "point,a,0,0,640,360,23,100,5,1\n"
        "point,a,1,0,640,360,25,80,6,1\n"
        "hull,a,0,2.5,0.5\n"
        "hull,a,1\n",
        "line 6: hull rows mix multiplier presence");
    reject(
        "shot,a,1,2\n"
        "point,a,0,0,640,360,23,100,5,1\n"
        "point,a,1,0,640,360,25,80,6,1\n"
        "hull,a,0\n"
        "hull,a,1,2.5,0.5\n",
        "line 6: hull rows mix multiplier presence");
    reject(
        "shot,a,1,1\n"
        "point,a,0,0,640,360,23,100,5,1\n"
        "hull,a,0,2.5,0.5\n",
        "analysis: shot 'a' has multipliers but no fit");
    reject("shot,a,1,1\npoint,a,0,0,640,360,23,100,5,1\nbogus,a,1\n",
           "line 4: unknown row tag 'bogus'");
    reject(
        "shot,a,1,1\n"
        "point,a,0,0,640,360,23,100,5,1\n"
        "fit,a,1,-1,-1,0.9,1\n"
        "fit,a,1,-1,-1,0.9,1\n",
        "line 5: duplicate fit row");
    reject("shot,a,1,1\npoint,b,0,0,640,360,23,100,5,1\n", "line 3: point row for wrong shot");
    reject(
        "shot,a,1,2\n"
        "point,a,0,0,640,360,23,100,5,1\n"
        "point,a,1,0,640,360,25,80,6,1\n"
        "hull,a,1\nhull,a,0\n",
        "line 6: hull indices must be strictly increasing");
    {
        std::stringstream buf("shot,a,1,0\n");
        CHECK_THROWS_WITH_AS(io::read_analysis(buf),
                             "line 1: missing '# ladderforge-v1 analysis' header",
                             InputError);
    }
}

TEST_CASE("tables round trip aggregates, prices and selections") {
    std::vector<std::string> ids = {"alpha", "beta"};
    std::vector<RdtTableRow> rows(2);
    rows[0].multipliers = {1e-7, 0.037};
    rows[0].representation.selection = {3, 11};
    rows[0].representation.agg_rate = 1234.5 / 7.0;
    rows[0].representation.agg_distortion = 1.0 / 3.0;
    rows[0].representation.agg_time = 1e4;
    rows[0].representation.sums = {10.0, 20.0, 30.0};
    rows[1].multipliers = {2.5, 0.125};
    rows[1].representation.selection = {0, 5};
    rows[1].representation.agg_rate = 555.25;
    rows[1].representation.agg_distortion = 9.75;
    rows[1].representation.agg_time = 42.0;

    std::stringstream buf;
    io::write_table_header(buf);
    for (const auto& row : rows) io::write_table_row(buf, row, ids);

    const io::TableDoc doc = io::read_table(buf);
    CHECK(doc.shot_ids == ids);
    REQUIRE(doc.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(same_bits(doc.rows[i].multipliers.lambda, rows[i].multipliers.lambda));
        CHECK(same_bits(doc.rows[i].multipliers.mu, rows[i].multipliers.mu));
        CHECK(same_bits(doc.rows[i].representation.agg_rate,
                        rows[i].representation.agg_rate));
        CHECK(same_bits(doc.rows[i].representation.agg_distortion,
                        rows[i].representation.agg_distortion));
        CHECK(same_bits(doc.rows[i].representation.agg_time,
                        rows[i].representation.agg_time));
        CHECK(doc.rows[i].representation.selection == rows[i].representation.selection);
    }
    // Plain sums are not part of the format; they read back as zero.
    CHECK(doc.rows[0].representation.sums.rate == 0.0);
    CHECK(doc.rows[0].representation.sums.distortion == 0.0);
}

TEST_CASE("table reading rejects inconsistent rows") {
    const std::string header = "# ladderforge-v1 table\n";
    SUBCASE("field count") {
        std::stringstream buf(header + "1,2,3,4,5\n");
        CHECK_THROWS_WITH_AS(io::read_table(buf), "line 2: table row needs 6 fields",
                             InputError);
    }
    SUBCASE("selection entry shape") {
        std::stringstream buf(header + "1,2,3,4,5,alpha\n");
        CHECK_THROWS_AS(io::read_table(buf), InputError);
    }
    SUBCASE("selection shot order changes") {
        std::stringstream buf(header + "1,2,3,4,5,a=0;b=1\n1,3,3,4,5,b=0;a=1\n");
        CHECK_THROWS_WITH_AS(io::read_table(buf),
                             "line 3: selection shot order changes between rows", InputError);
    }
    SUBCASE("selection shot count changes") {
        std::stringstream buf(header + "1,2,3,4,5,a=0;b=1\n1,3,3,4,5,a=0\n");
        CHECK_THROWS_AS(io::read_table(buf), InputError);
    }
    SUBCASE("kind mismatch") {
        std::stringstream buf("# ladderforge-v1 dataset\n");
        CHECK_THROWS_AS(io::read_table(buf), InputError);
    }
    SUBCASE("empty table is fine") {
        std::stringstream buf(header);
        const auto doc = io::read_table(buf);
        CHECK(doc.rows.empty());
        CHECK(doc.shot_ids.empty());
    }
}

TEST_CASE("ladders round trip entries and the comparison footer") {
    std::vector<std::string> ids = {"alpha", "beta"};
    std::vector<LadderEntry> entries(3);
    entries[0].target = 500.0;
    // target 500 unmatched.
    entries[1].target = 1000.0;
    RdtTableRow row;
    row.multipliers = {0.125, 3.5};
    row.representation.selection = {2, 9};
    row.representation.agg_rate = 987.5;
    row.representation.agg_distortion = 12.25;
    row.representation.agg_time = 300.75;
    entries[1].row = row;
    entries[2].target = 2000.0;
    row.multipliers = {0.0625, 1.75};
    row.representation.agg_rate = 2100.0;
    entries[2].row = row;

    SUBCASE("with a comparison") {
        ComparisonReport cmp;
        cmp.bd_rate_pct = -17.375;
        cmp.complexity_ratio_pct = 42.5;
        cmp.rungs_compared = 2;
        std::stringstream buf;
        io::write_ladder(buf, entries, ids, cmp);
        const io::LadderDoc doc = io::read_ladder(buf);
        CHECK(doc.shot_ids == ids);
        REQUIRE(doc.entries.size() == 3);
        CHECK_FALSE(doc.entries[0].row.has_value());
        CHECK(doc.entries[0].target == 500.0);
        REQUIRE(doc.entries[1].row.has_value());
        CHECK(same_bits(doc.entries[1].row->representation.agg_time, 300.75));
        CHECK(doc.entries[1].row->representation.selection == std::vector<std::size_t>{2, 9});
        REQUIRE(doc.comparison.has_value());
        CHECK(same_bits(doc.comparison->bd_rate_pct, -17.375));
        CHECK(same_bits(doc.comparison->complexity_ratio_pct, 42.5));
        CHECK(doc.comparison->rungs_compared == 2);
    }
    SUBCASE("without a comparison") {
        std::stringstream buf;
        io::write_ladder(buf, entries, ids, std::nullopt);
        const io::LadderDoc doc = io::read_ladder(buf);
        CHECK_FALSE(doc.comparison.has_value());
        CHECK(doc.entries.size() == 3);
    }
    SUBCASE("all targets unmatched leaves shot ids empty") {
        std::vector<LadderEntry> none(2);
        none[0].target = 100.0;
        none[1].target = 200.0;
        std::stringstream buf;
        io::write_ladder(buf, none, {}, std::nullopt);
        const io::LadderDoc doc = io::read_ladder(buf);
        CHECK(doc.shot_ids.empty());
        CHECK(doc.entries.size() == 2);
        CHECK_FALSE(doc.entries[0].row.has_value());
    }
}

TEST_CASE("ladder reading rejects malformed rows and footers") {
    const std::string header = "# ladderforge-v1 ladder\n";
    SUBCASE("found flag domain") {
        std::stringstream buf(header + "500,2,,,,,,\n");
        CHECK_THROWS_WITH_AS(io::read_ladder(buf), "line 2: found must be 0 or 1",
                             InputError);
    }
    SUBCASE("found=0 rows must stay empty") {
        std::stringstream buf(header + "500,0,1,,,,,\n");
        CHECK_THROWS_AS(io::read_ladder(buf), InputError);
    }
    SUBCASE("field count") {
        std::stringstream buf(header + "500,0,,,\n");
        CHECK_THROWS_AS(io::read_ladder(buf), InputError);
    }
    SUBCASE("incomplete comparison footer") {
        std::stringstream buf(header + "500,0,,,,,,\n# bd_rate_pct,-3.5\n");
        CHECK_THROWS_WITH_AS(io::read_ladder(buf), "ladder: incomplete comparison footer",
                             InputError);
    }
}

TEST_CASE("path wrappers annotate errors with the file name") {
    testutil::TempDir dir;
    const std::string path = dir.path() + "/data.csv";
    SUBCASE("save and load") {
        std::vector<ShotRecord> shots(1);
        shots[0].shot_id = "x";
        shots[0].duration_s = 1.0;
        shots[0].points.push_back({{0, 640, 360, 23}, 100.0, 5.0, 1.0});
        io::save_dataset(path, shots);
        const auto loaded = io::load_dataset(path);
        REQUIRE(loaded.size() == 1);
        check_points_equal(loaded[0], shots[0]);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_WITH_AS(io::load_dataset(dir.path() + "/absent.csv"),
                             ("cannot open '" + dir.path() + "/absent.csv' for reading").c_str(),
                             InputError);
    }
    SUBCASE("parse errors carry the path") {
        testutil::write_file(path, "junk\n");
        try {
            io::load_dataset(path);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find(path) != std::string::npos);
        }
    }
}
