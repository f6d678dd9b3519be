#include "catune/encounter.hpp"

#include <cmath>
#include <json.hpp>

#include "catune/binio.hpp"
#include "catune/errors.hpp"
#include "catune/simulator.hpp"

namespace catune {

namespace {

constexpr char kSetMagic[9] = "CATENCS1";
constexpr std::uint32_t kSetVersion = 1;
constexpr double kTwoPi = 6.283185307179586476925287;

struct TrajectoryPoint {
    double x, y, alt;
};

// State of one aircraft after k whole dt-steps, bit-identical to the
// verification loop's stepping.
TrajectoryPoint after_steps(AircraftState s, const std::vector<CombinedAction>& actions,
                            int k, double dt, const DynamicsConfig& dyn) {
    for (int t = 0; t < k; ++t)
        s = propagate(s, actions.empty() ? kClearClear : actions[static_cast<std::size_t>(t)],
                      dt, dyn);
    return {s.x, s.y, s.alt};
}

// Lean nominal simulation: ownship holds CLEAR/CLEAR, intruder replays its
// chain sequence. Matches run_encounter(spec, clear_policy).any_nmac exactly.
bool nominal_nmac_check(const EncounterSpec& spec, const IntruderChain& chain,
                        const DynamicsConfig& dyn, double dt) {
    AircraftState own = spec.ownship_init;
    AircraftState intr = spec.intruder_init;
    const auto actions = intruder_action_sequence(chain, spec.intruder_seed, spec.duration);
    for (int t = 0; t < spec.duration; ++t) {
        own = propagate(own, kClearClear, dt, dyn);
        intr = propagate(intr, actions[static_cast<std::size_t>(t)], dt, dyn);
        if (detect_nmac(own, intr, dyn)) return true;
    }
    return false;
}

AircraftState sample_airframe(const EncounterConfig& cfg, Rng& rng) {
    AircraftState s;
    s.heading = rng.uniform(0.0, kTwoPi);
    s.ground_speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    s.vertical_rate = rng.uniform(cfg.vz_min, cfg.vz_max);
    s.turn_rate = 0.0;
    return s;
}

// One placement draw. The intruder's position is solved backward from the
// desired separation at the closest-approach step, accounting for the exact
// maneuver sequence it will fly, so an in-cylinder offset is a guaranteed
// nominal NMAC and an annulus offset is one only if geometry re-approaches.
EncounterSpec construct_candidate(const EncounterConfig& cfg, const IntruderChain& chain,
                                  Rng& rng, bool intended_nmac) {
    const DynamicsConfig& dyn = cfg.dynamics;
    EncounterSpec spec;
    spec.duration = cfg.duration_steps;

    spec.ownship_init = sample_airframe(cfg, rng);
    spec.ownship_init.alt = rng.uniform(cfg.alt_min, cfg.alt_max);

    AircraftState intr = sample_airframe(cfg, rng);
    spec.intruder_seed = rng.next();

    // Closest approach lands on a whole simulation step.
    const int k_lo = std::max(1, static_cast<int>(std::ceil(cfg.tcpa_min / cfg.dt)));
    const int k_hi = std::min(cfg.duration_steps,
                              static_cast<int>(std::floor(cfg.tcpa_max / cfg.dt)));
    const int k_cpa = k_lo + static_cast<int>(rng.uniform_int(
                                 static_cast<std::uint32_t>(k_hi - k_lo + 1)));

    double off_h, off_v;
    if (intended_nmac) {
        off_h = dyn.nmac_horizontal * std::sqrt(rng.uniform());
        off_v = rng.uniform(-dyn.nmac_vertical, dyn.nmac_vertical);
    } else {
        // Uniform in the outer cylinder, rejected into the annulus shell in
        // scaled (horizontal/vertical) NMAC radii.
        const double smax = cfg.annulus_max_scale;
        while (true) {
            off_h = smax * dyn.nmac_horizontal * std::sqrt(rng.uniform());
            off_v = rng.uniform(-smax * dyn.nmac_vertical, smax * dyn.nmac_vertical);
            const double s = std::max(off_h / dyn.nmac_horizontal,
                                      std::fabs(off_v) / dyn.nmac_vertical);
            if (s >= cfg.annulus_min_scale) break;
        }
    }
    const double bearing = rng.uniform(0.0, kTwoPi);

    const auto intr_actions =
        intruder_action_sequence(chain, spec.intruder_seed, cfg.duration_steps);
    const TrajectoryPoint own_cpa =
        after_steps(spec.ownship_init, {}, k_cpa, cfg.dt, dyn);
    AircraftState intr_origin = intr;
    intr_origin.x = intr_origin.y = intr_origin.alt = 0.0;
    const TrajectoryPoint intr_disp = after_steps(intr_origin, intr_actions, k_cpa, cfg.dt, dyn);

    intr.x = own_cpa.x + off_h * std::cos(bearing) - intr_disp.x;
    intr.y = own_cpa.y + off_h * std::sin(bearing) - intr_disp.y;
    intr.alt = own_cpa.alt + off_v - intr_disp.alt;
    spec.intruder_init = intr;
    return spec;
}

// Draws candidates until the simulated label matches the requested one, so
// requested labels are exact. Returns false when the budget runs out (the
// last candidate, with its true label, stays in spec).
bool sample_with_label(const EncounterConfig& cfg, const IntruderChain& chain, Rng& rng,
                       bool target, EncounterSpec& spec) {
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        spec = construct_candidate(cfg, chain, rng, target);
        spec.nominal_nmac = nominal_nmac_check(spec, chain, cfg.dynamics, cfg.dt);
        if (spec.nominal_nmac == target) return true;
    }
    return false;
}

}  // namespace

void EncounterConfig::validate() const {
    auto ordered = [](double lo, double hi) { return lo <= hi && std::isfinite(lo) && std::isfinite(hi); };
    if (!ordered(speed_min, speed_max) || speed_min < 0.0)
        throw ValidationError("encounter config: speed range invalid");
    if (!ordered(vz_min, vz_max)) throw ValidationError("encounter config: vertical-rate range invalid");
    if (!ordered(alt_min, alt_max)) throw ValidationError("encounter config: altitude range invalid");
    if (duration_steps < 1) throw ValidationError("encounter config: duration must be >= 1 step");
    if (!(dt > 0.0)) throw ValidationError("encounter config: dt must be > 0");
    if (!(nmac_fraction >= 0.0 && nmac_fraction <= 1.0))
        throw ValidationError("encounter config: nmac_fraction must lie in [0, 1]");
    if (!ordered(tcpa_min, tcpa_max) || tcpa_min < 0.0)
        throw ValidationError("encounter config: tcpa window invalid");
    if (tcpa_max > duration_steps * dt)
        throw ValidationError("encounter config: tcpa window exceeds encounter duration");
    if (tcpa_max < dt)
        throw ValidationError("encounter config: tcpa window contains no whole step");
    if (!(annulus_min_scale > 1.0) || !(annulus_max_scale > annulus_min_scale))
        throw ValidationError("encounter config: annulus scales must satisfy 1 < min < max");
    if (!(avg_action_len > 1.0) || !(avg_clear_len > 1.0))
        throw ValidationError("encounter config: chain dwell lengths must be > 1");
    if (max_attempts < 1) throw ValidationError("encounter config: max_attempts must be >= 1");
    dynamics.validate();
}

int IntruderChain::sample_next(int current, Rng& rng) const {
    const auto& row = transition[static_cast<std::size_t>(current)];
    const double u = rng.uniform();
    double cum = 0.0;
    for (int j = 0; j < kNumActions; ++j) {
        cum += row[static_cast<std::size_t>(j)];
        if (u < cum) return j;
    }
    return kNumActions - 1;
}

std::array<double, kNumActions> IntruderChain::stationary() const {
    std::array<double, kNumActions> pi{};
    pi.fill(1.0 / kNumActions);
    for (int it = 0; it < 500; ++it) {
        std::array<double, kNumActions> next{};
        for (int i = 0; i < kNumActions; ++i)
            for (int j = 0; j < kNumActions; ++j)
                next[static_cast<std::size_t>(j)] +=
                    pi[static_cast<std::size_t>(i)] *
                    transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        pi = next;
    }
    return pi;
}

IntruderChain build_markov_chain(double avg_action_len, double avg_clear_len) {
    if (!(avg_action_len > 1.0) || !(avg_clear_len > 1.0))
        throw ValidationError("markov chain dwell lengths must be > 1");
    IntruderChain chain;
    chain.avg_action_len = avg_action_len;
    chain.avg_clear_len = avg_clear_len;
    const int clear_idx = kClearClear.index();
    for (int a = 0; a < kNumActions; ++a) {
        const double dwell = (a == clear_idx) ? avg_clear_len : avg_action_len;
        const double stay = 1.0 - 1.0 / dwell;
        const double leave = (1.0 / dwell) / (kNumActions - 1);
        for (int b = 0; b < kNumActions; ++b)
            chain.transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                (a == b) ? stay : leave;
    }
    return chain;
}

std::vector<CombinedAction> intruder_action_sequence(const IntruderChain& chain,
                                                     std::uint64_t seed, int steps) {
    Rng rng(seed);
    std::vector<CombinedAction> out;
    out.reserve(static_cast<std::size_t>(steps));
    int current = kClearClear.index();
    for (int t = 0; t < steps; ++t) {
        out.push_back(CombinedAction::from_index(current));
        current = chain.sample_next(current, rng);
    }
    return out;
}

int EncounterSet::nominal_count() const {
    int n = 0;
    for (const auto& s : specs) n += s.nominal_nmac ? 1 : 0;
    return n;
}

EncounterSpec sample_encounter(const EncounterConfig& config, Rng& rng) {
    config.validate();
    const IntruderChain chain = build_markov_chain(config.avg_action_len, config.avg_clear_len);
    const bool intended = rng.bernoulli(config.nmac_fraction);
    EncounterSpec spec;
    sample_with_label(config, chain, rng, intended, spec);
    return spec;
}

EncounterSet generate_stratified_set(int n, double nmac_fraction,
                                     const EncounterConfig& config, std::uint64_t seed) {
    if (n < 1) throw ValidationError("stratified set size must be >= 1");
    if (!(nmac_fraction >= 0.0 && nmac_fraction <= 1.0))
        throw ValidationError("nmac_fraction must lie in [0, 1]");
    config.validate();

    EncounterSet set;
    set.config = config;
    set.config.nmac_fraction = nmac_fraction;
    set.chain = build_markov_chain(config.avg_action_len, config.avg_clear_len);

    const long long k = std::llround(static_cast<double>(n) * nmac_fraction);
    set.specs.resize(static_cast<std::size_t>(n));
    for (int id = 0; id < n; ++id) {
        // Even interleave: id carries a nominal NMAC when the cumulative
        // quota crosses an integer.
        const bool target = (id + 1) * k / n > static_cast<long long>(id) * k / n;
        Rng rng(derive_seed(seed, 0xE4C0FFEEULL, static_cast<std::uint64_t>(id)));
        EncounterSpec spec;
        if (!sample_with_label(set.config, set.chain, rng, target, spec))
            throw GenerationExhaustedError(
                std::string("encounter generation exhausted after ") +
                std::to_string(config.max_attempts) + " draws for the " +
                (target ? "nominal-NMAC" : "non-NMAC") + " stratum (encounter id " +
                std::to_string(id) + ")");
        spec.id = id;
        set.specs[static_cast<std::size_t>(id)] = spec;
    }
    return set;
}

namespace {

void put_state(ByteWriter& w, const AircraftState& s) {
    w.f64(s.x);
    w.f64(s.y);
    w.f64(s.alt);
    w.f64(s.heading);
    w.f64(s.ground_speed);
    w.f64(s.vertical_rate);
    w.f64(s.turn_rate);
}

AircraftState get_state(ByteReader& r) {
    AircraftState s;
    s.x = r.f64();
    s.y = r.f64();
    s.alt = r.f64();
    s.heading = r.f64();
    s.ground_speed = r.f64();
    s.vertical_rate = r.f64();
    s.turn_rate = r.f64();
    return s;
}

void put_config(ByteWriter& w, const EncounterConfig& c) {
    w.f64(c.speed_min);
    w.f64(c.speed_max);
    w.f64(c.vz_min);
    w.f64(c.vz_max);
    w.f64(c.alt_min);
    w.f64(c.alt_max);
    w.u32(static_cast<std::uint32_t>(c.duration_steps));
    w.f64(c.dt);
    w.f64(c.nmac_fraction);
    w.f64(c.tcpa_min);
    w.f64(c.tcpa_max);
    w.f64(c.annulus_min_scale);
    w.f64(c.annulus_max_scale);
    w.f64(c.avg_action_len);
    w.f64(c.avg_clear_len);
    w.u32(static_cast<std::uint32_t>(c.max_attempts));
    w.f64(c.dynamics.turn_rate_cmd);
    w.f64(c.dynamics.turn_slew);
    w.f64(c.dynamics.vz_cmd);
    w.f64(c.dynamics.vz_slew);
    w.f64(c.dynamics.nmac_horizontal);
    w.f64(c.dynamics.nmac_vertical);
    w.u8(c.dynamics.nmac_terminal ? 1 : 0);
}

EncounterConfig get_config(ByteReader& r) {
    EncounterConfig c;
    c.speed_min = r.f64();
    c.speed_max = r.f64();
    c.vz_min = r.f64();
    c.vz_max = r.f64();
    c.alt_min = r.f64();
    c.alt_max = r.f64();
    c.duration_steps = static_cast<int>(r.u32());
    c.dt = r.f64();
    c.nmac_fraction = r.f64();
    c.tcpa_min = r.f64();
    c.tcpa_max = r.f64();
    c.annulus_min_scale = r.f64();
    c.annulus_max_scale = r.f64();
    c.avg_action_len = r.f64();
    c.avg_clear_len = r.f64();
    c.max_attempts = static_cast<int>(r.u32());
    c.dynamics.turn_rate_cmd = r.f64();
    c.dynamics.turn_slew = r.f64();
    c.dynamics.vz_cmd = r.f64();
    c.dynamics.vz_slew = r.f64();
    c.dynamics.nmac_horizontal = r.f64();
    c.dynamics.nmac_vertical = r.f64();
    c.dynamics.nmac_terminal = r.u8() != 0;
    return c;
}

}  // namespace

void write_set(const EncounterSet& set, const std::string& path) {
    ByteWriter w;
    w.str(set.generator_tag);
    put_config(w, set.config);
    w.f64(set.chain.avg_action_len);
    w.f64(set.chain.avg_clear_len);
    for (const auto& row : set.chain.transition)
        for (double p : row) w.f64(p);
    w.u64(set.specs.size());
    w.u64(static_cast<std::uint64_t>(set.nominal_count()));
    for (const auto& s : set.specs) {
        w.i64(s.id);
        put_state(w, s.ownship_init);
        put_state(w, s.intruder_init);
        w.u64(s.intruder_seed);
        w.u8(s.nominal_nmac ? 1 : 0);
        w.u32(static_cast<std::uint32_t>(s.duration));
    }
    write_container(path, kSetMagic, kSetVersion, w);
}

EncounterSet read_set(const std::string& path) {
    const auto payload = read_container(path, kSetMagic, kSetVersion);
    ByteReader r(payload);
    EncounterSet set;
    set.format_version = kSetVersion;
    set.generator_tag = r.str();
    set.config = get_config(r);
    set.chain.avg_action_len = r.f64();
    set.chain.avg_clear_len = r.f64();
    for (auto& row : set.chain.transition)
        for (double& p : row) p = r.f64();
    const std::uint64_t count = r.u64();
    const std::uint64_t declared_nominal = r.u64();
    set.specs.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        EncounterSpec s;
        s.id = r.i64();
        s.ownship_init = get_state(r);
        s.intruder_init = get_state(r);
        s.intruder_seed = r.u64();
        s.nominal_nmac = r.u8() != 0;
        s.duration = static_cast<int>(r.u32());
        set.specs.push_back(s);
    }
    if (r.remaining() != 0)
        throw ParseError("trailing bytes after encounter records in " + path);
    if (declared_nominal != static_cast<std::uint64_t>(set.nominal_count()))
        throw ParseError("stratification count in header does not match records in " + path);
    return set;
}

void write_set_json(const EncounterSet& set, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = set.format_version;
    j["generator_tag"] = set.generator_tag;
    j["config"] = {
        {"speed_min", set.config.speed_min},
        {"speed_max", set.config.speed_max},
        {"vz_min", set.config.vz_min},
        {"vz_max", set.config.vz_max},
        {"alt_min", set.config.alt_min},
        {"alt_max", set.config.alt_max},
        {"duration_steps", set.config.duration_steps},
        {"dt", set.config.dt},
        {"nmac_fraction", set.config.nmac_fraction},
        {"tcpa_min", set.config.tcpa_min},
        {"tcpa_max", set.config.tcpa_max},
        {"annulus_min_scale", set.config.annulus_min_scale},
        {"annulus_max_scale", set.config.annulus_max_scale},
        {"avg_action_len", set.config.avg_action_len},
        {"avg_clear_len", set.config.avg_clear_len},
        {"max_attempts", set.config.max_attempts},
    };
    j["chain"] = {
        {"avg_action_len", set.chain.avg_action_len},
        {"avg_clear_len", set.chain.avg_clear_len},
        {"transition", set.chain.transition},
    };
    auto state_json = [](const AircraftState& s) {
        return nlohmann::json{{"x", s.x},
                              {"y", s.y},
                              {"alt", s.alt},
                              {"heading", s.heading},
                              {"ground_speed", s.ground_speed},
                              {"vertical_rate", s.vertical_rate},
                              {"turn_rate", s.turn_rate}};
    };
    auto& specs = j["specs"] = nlohmann::json::array();
    for (const auto& s : set.specs) {
        specs.push_back({{"id", s.id},
                         {"ownship", state_json(s.ownship_init)},
                         {"intruder", state_json(s.intruder_init)},
                         {"intruder_seed", s.intruder_seed},
                         {"nominal_nmac", s.nominal_nmac},
                         {"duration", s.duration}});
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace catune
