#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "catune/airframe.hpp"
#include "catune/rng.hpp"

namespace catune {

// Markov maneuver process over the 9 combined actions. Maneuver rows keep
// their action with probability 1 - 1/avg_action_len, the CLEAR/CLEAR row
// with 1 - 1/avg_clear_len; the remaining mass is uniform over the other 8.
struct IntruderChain {
    std::array<std::array<double, kNumActions>, kNumActions> transition{};
    double avg_action_len = 10.0;
    double avg_clear_len = 20.0;

    int sample_next(int current, Rng& rng) const;
    // Long-run action distribution (power iteration); used when a one-step
    // marginal over intruder actions is needed without a full sequence.
    std::array<double, kNumActions> stationary() const;
};

IntruderChain build_markov_chain(double avg_action_len, double avg_clear_len);

// Replays the full action sequence for an encounter from its seed. Step 0
// always starts in CLEAR/CLEAR.
std::vector<CombinedAction> intruder_action_sequence(const IntruderChain& chain,
                                                     std::uint64_t seed, int steps);

struct EncounterConfig {
    double speed_min = 100.0;   // ft/s
    double speed_max = 500.0;
    double vz_min = -2000.0;    // ft/min
    double vz_max = 2000.0;
    double alt_min = 1000.0;    // ft
    double alt_max = 10000.0;
    int duration_steps = 80;
    double dt = 1.0;            // s
    double nmac_fraction = 0.40;
    double tcpa_min = 20.0;     // s, closest-approach placement window
    double tcpa_max = 60.0;
    double annulus_min_scale = 1.2;  // non-NMAC placement shell, in NMAC radii
    double annulus_max_scale = 6.0;
    double avg_action_len = 10.0;    // intruder chain dwell parameters
    double avg_clear_len = 20.0;
    int max_attempts = 200;          // placement redraws per encounter
    DynamicsConfig dynamics;

    void validate() const;
};

// A reproducible encounter: initial truth states plus the seed that replays
// the intruder's maneuver sequence.
struct EncounterSpec {
    std::int64_t id = 0;
    AircraftState ownship_init;
    AircraftState intruder_init;
    std::uint64_t intruder_seed = 0;
    bool nominal_nmac = false;  // NMAC occurs if the ownship never maneuvers
    int duration = 80;
};

struct EncounterSet {
    std::vector<EncounterSpec> specs;
    IntruderChain chain;
    EncounterConfig config;
    std::uint32_t format_version = 1;
    std::string generator_tag = "catune-uniform-markov-v1";

    int nominal_count() const;
};

// Draws one encounter: initial headings/speeds/rates uniform per aircraft,
// intruder placed by the miss-distance rule so nominal NMACs occur with the
// configured probability. The stored nominal_nmac flag always comes from
// actually simulating the encounter with the ownship holding CLEAR/CLEAR.
EncounterSpec sample_encounter(const EncounterConfig& config, Rng& rng);

// Exactly round(n * nmac_fraction) nominal-NMAC specs, strata interleaved
// deterministically. Pure function of (config, seed); each encounter derives
// its own sub-seed from (seed, id) so generation can shard freely.
EncounterSet generate_stratified_set(int n, double nmac_fraction,
                                     const EncounterConfig& config, std::uint64_t seed);

void write_set(const EncounterSet& set, const std::string& path);
EncounterSet read_set(const std::string& path);

// Lossless JSON mirror of the binary format, for inspection and tooling.
void write_set_json(const EncounterSet& set, const std::string& path);

}  // namespace catune
