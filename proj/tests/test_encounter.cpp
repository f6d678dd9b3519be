#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "catune/binio.hpp"
#include "catune/encounter.hpp"
#include "catune/errors.hpp"
#include "catune/simulator.hpp"

using namespace catune;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("markov chain diagonal follows dwell lengths") {
    const auto chain = build_markov_chain(10.0, 10.0);
    for (int a = 0; a < kNumActions; ++a) {
        for (int b = 0; b < kNumActions; ++b) {
            const double p = chain.transition[a][b];
            if (a == b)
                CHECK(p == doctest::Approx(0.9).epsilon(1e-12));
            else
                CHECK(p == doctest::Approx(0.0125).epsilon(1e-12));
        }
    }
    const auto chain2 = build_markov_chain(2.0, 2.0);
    for (int a = 0; a < kNumActions; ++a)
        CHECK(chain2.transition[a][a] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("markov chain rejects dwell lengths <= 1") {
    CHECK_THROWS_AS(build_markov_chain(1.0, 10.0), ValidationError);
    CHECK_THROWS_AS(build_markov_chain(10.0, 0.5), ValidationError);
}

TEST_CASE("chain rows are stochastic over random dwell lengths") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const double la = rng.uniform(1.0001, 1000.0);
        const double lc = rng.uniform(1.0001, 1000.0);
        const auto chain = build_markov_chain(la, lc);
        for (int a = 0; a < kNumActions; ++a) {
            double sum = 0.0;
            for (int b = 0; b < kNumActions; ++b) {
                CHECK(chain.transition[a][b] >= 0.0);
                sum += chain.transition[a][b];
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    }
}

// Monte Carlo against the geometric dwell-time mean 1/(1-p).
TEST_CASE("empirical dwell mean matches avg_action_len") {
    const auto chain = build_markov_chain(10.0, 10.0);
    Rng rng(12345);
    const int n_dwells = 1000000;
    long long total = 0;
    const int action = 0;  // a maneuver row
    for (int i = 0; i < n_dwells; ++i) {
        int len = 1;
        while (chain.sample_next(action, rng) == action) ++len;
        total += len;
    }
    const double mean = static_cast<double>(total) / n_dwells;
    CHECK(mean == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("intruder action sequence replays bit-identically from its seed") {
    const auto chain = build_markov_chain(10.0, 20.0);
    const auto a = intruder_action_sequence(chain, 777, 200);
    const auto b = intruder_action_sequence(chain, 777, 200);
    REQUIRE(a.size() == 200);
    CHECK(a.front() == kClearClear);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("sample_encounter is deterministic per seed") {
    EncounterConfig cfg;
    Rng r1(42), r2(42);
    const auto s1 = sample_encounter(cfg, r1);
    const auto s2 = sample_encounter(cfg, r2);
    CHECK(s1.intruder_seed == s2.intruder_seed);
    CHECK(s1.ownship_init.heading == s2.ownship_init.heading);
    CHECK(s1.intruder_init.x == s2.intruder_init.x);
    CHECK(s1.intruder_init.alt == s2.intruder_init.alt);
    CHECK(s1.nominal_nmac == s2.nominal_nmac);
}

TEST_CASE("degenerate speed range produces exact speeds") {
    EncounterConfig cfg;
    cfg.speed_min = cfg.speed_max = 150.0;
    Rng rng(7);
    for (int i = 0; i < 10; ++i) {
        const auto s = sample_encounter(cfg, rng);
        CHECK(s.ownship_init.ground_speed == 150.0);
        CHECK(s.intruder_init.ground_speed == 150.0);
    }
}

// Monte Carlo over the generated population, labels verified by simulation.
TEST_CASE("nominal-NMAC fraction approaches the configured target") {
    EncounterConfig cfg;
    Rng rng(2024);
    const int n = 10000;
    int nmac = 0;
    for (int i = 0; i < n; ++i) nmac += sample_encounter(cfg, rng).nominal_nmac ? 1 : 0;
    const double fraction = static_cast<double>(nmac) / n;
    CHECK(fraction == doctest::Approx(0.40).epsilon(0.075));  // +-0.03 absolute
}

TEST_CASE("stored nominal flag matches the CLEAR/CLEAR simulation oracle") {
    EncounterConfig cfg;
    const auto chain = build_markov_chain(cfg.avg_action_len, cfg.avg_clear_len);
    Rng rng(31337);
    for (int i = 0; i < 50; ++i) {
        const auto spec = sample_encounter(cfg, rng);
        const auto res = run_encounter(spec, chain, cfg.dynamics, clear_policy(), RewardParams{});
        CHECK(res.aggregate.any_nmac == spec.nominal_nmac);
    }
}

TEST_CASE("stratified set hits exact counts with interleaved strata") {
    EncounterConfig cfg;
    const auto set = generate_stratified_set(2000, 0.5, cfg, 7);
    REQUIRE(set.specs.size() == 2000);
    CHECK(set.nominal_count() == 1000);
    // interleaving: no long runs of one stratum
    int run = 1, max_run = 1;
    for (std::size_t i = 1; i < set.specs.size(); ++i) {
        run = (set.specs[i].nominal_nmac == set.specs[i - 1].nominal_nmac) ? run + 1 : 1;
        max_run = std::max(max_run, run);
    }
    CHECK(max_run <= 2);
    // ids dense ascending
    for (std::size_t i = 0; i < set.specs.size(); ++i)
        CHECK(set.specs[i].id == static_cast<std::int64_t>(i));
}

TEST_CASE("stratified extremes") {
    EncounterConfig cfg;
    const auto none = generate_stratified_set(10, 0.0, cfg, 3);
    CHECK(none.nominal_count() == 0);
    const auto all = generate_stratified_set(10, 1.0, cfg, 3);
    CHECK(all.nominal_count() == 10);
}

TEST_CASE("generation is a pure function of config and seed") {
    EncounterConfig cfg;
    const auto a = generate_stratified_set(50, 0.4, cfg, 99);
    const auto b = generate_stratified_set(50, 0.4, cfg, 99);
    REQUIRE(a.specs.size() == b.specs.size());
    for (std::size_t i = 0; i < a.specs.size(); ++i) {
        CHECK(a.specs[i].intruder_seed == b.specs[i].intruder_seed);
        CHECK(a.specs[i].ownship_init.x == b.specs[i].ownship_init.x);
        CHECK(a.specs[i].intruder_init.y == b.specs[i].intruder_init.y);
        CHECK(a.specs[i].nominal_nmac == b.specs[i].nominal_nmac);
    }
}

TEST_CASE("set file round-trip is bit-exact") {
    EncounterConfig cfg;
    const auto set = generate_stratified_set(100, 0.4, cfg, 11);
    const std::string path = temp_path("catune_test_set.enc");
    write_set(set, path);
    const auto back = read_set(path);
    REQUIRE(back.specs.size() == set.specs.size());
    CHECK(back.generator_tag == set.generator_tag);
    for (std::size_t i = 0; i < set.specs.size(); ++i) {
        const auto& a = set.specs[i];
        const auto& b = back.specs[i];
        CHECK(a.id == b.id);
        CHECK(std::memcmp(&a.ownship_init, &b.ownship_init, sizeof(AircraftState)) == 0);
        CHECK(std::memcmp(&a.intruder_init, &b.intruder_init, sizeof(AircraftState)) == 0);
        CHECK(a.intruder_seed == b.intruder_seed);
        CHECK(a.nominal_nmac == b.nominal_nmac);
        CHECK(a.duration == b.duration);
    }
    for (int i = 0; i < kNumActions; ++i)
        for (int j = 0; j < kNumActions; ++j)
            CHECK(back.chain.transition[i][j] == set.chain.transition[i][j]);
    std::filesystem::remove(path);
}

TEST_CASE("corrupted and truncated set files raise distinct errors") {
    EncounterConfig cfg;
    const auto set = generate_stratified_set(10, 0.5, cfg, 5);
    const std::string path = temp_path("catune_test_corrupt.enc");
    write_set(set, path);
    auto bytes = read_file(path);

    SUBCASE("bad magic") {
        auto bad = bytes;
        bad[0] ^= 0xFF;
        write_file_atomic(path, bad.data(), bad.size());
        CHECK_THROWS_AS(read_set(path), ParseError);
    }
    SUBCASE("bad version") {
        auto bad = bytes;
        bad[8] = 0x7F;
        write_file_atomic(path, bad.data(), bad.size());
        CHECK_THROWS_AS(read_set(path), VersionMismatchError);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        auto bad = bytes;
        bad[bytes.size() / 2] ^= 0x01;
        write_file_atomic(path, bad.data(), bad.size());
        CHECK_THROWS_AS(read_set(path), ChecksumError);
    }
    SUBCASE("declared record count beyond actual records") {
        // Rebuild the container with an inflated count and a fresh checksum.
        const std::size_t payload_off = 12;
        std::vector<std::uint8_t> payload(bytes.begin() + payload_off, bytes.end() - 4);
        // records are fixed-width; the count u64 sits 16 bytes before them
        const std::size_t record_bytes = 8 + 2 * 7 * 8 + 8 + 1 + 4;
        const std::size_t count_off = payload.size() - set.specs.size() * record_bytes - 16;
        payload[count_off] = static_cast<std::uint8_t>(set.specs.size() + 3);
        ByteWriter w;
        w.bytes(payload.data(), payload.size());
        write_container(path, "CATENCS1", 1, w);
        CHECK_THROWS_AS(read_set(path), TruncatedFileError);
    }
    std::filesystem::remove(path);
}

TEST_CASE("json export parses and mirrors the set") {
    EncounterConfig cfg;
    const auto set = generate_stratified_set(5, 0.4, cfg, 13);
    const std::string path = temp_path("catune_test_set.json");
    write_set_json(set, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("catune-uniform-markov-v1") != std::string::npos);
    CHECK(text.find("nominal_nmac") != std::string::npos);
    std::filesystem::remove(path);
}
