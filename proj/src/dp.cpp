#include "catune/dp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <memory>
#include <thread>

#include "catune/binio.hpp"
#include "catune/errors.hpp"
#include "catune/rng.hpp"

namespace catune {

namespace {

constexpr char kQTableMagic[9] = "CATQTAB1";
constexpr std::uint32_t kQTableVersion = 1;
constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace

int discretize(double value, const GridDim& dim) {
    if (dim.bins < 1) throw ValidationError("grid dimension needs at least one bin");
    if (!(dim.hi > dim.lo)) throw ValidationError("grid dimension bounds must be ordered");
    const double w = (dim.hi - dim.lo) / dim.bins;
    const double pos = (value - dim.lo) / w;
    int idx = static_cast<int>(std::ceil(pos)) - 1;  // boundary values round down
    if (idx < 0) idx = 0;
    if (idx >= dim.bins) idx = dim.bins - 1;
    return idx;
}

int GridSpec::state_count() const {
    long long n = 1;
    for (const auto& d : dims) n *= d.bins;
    if (n > kMaxMdpStates)
        throw ValidationError("grid has " + std::to_string(n) + " states; the guard allows " +
                              std::to_string(kMaxMdpStates) +
                              " - reduce bin counts or split the table");
    return static_cast<int>(n);
}

int GridSpec::state_of(const std::vector<double>& coords) const {
    if (coords.size() != dims.size())
        throw ContractError("grid coordinate arity mismatch");
    int idx = 0;
    for (std::size_t d = 0; d < dims.size(); ++d)
        idx = idx * dims[d].bins + discretize(coords[d], dims[d]);
    return idx;
}

std::vector<double> GridSpec::cell_center(int state) const {
    std::vector<double> coords(dims.size());
    for (std::size_t d = dims.size(); d-- > 0;) {
        const auto& dim = dims[d];
        const int bin = state % dim.bins;
        state /= dim.bins;
        const double w = (dim.hi - dim.lo) / dim.bins;
        coords[d] = dim.lo + (bin + 0.5) * w;
    }
    return coords;
}

void GridSpec::validate() const {
    if (dims.size() != 3) throw ValidationError("grid spec uses exactly three dimensions");
    for (const auto& d : dims) {
        if (d.bins < 1) throw ValidationError("grid bins must be >= 1");
        if (!(d.hi > d.lo)) throw ValidationError("grid bounds must be ordered");
    }
    state_count();
}

GridSpec GridSpec::horizontal_default() {
    GridSpec g;
    g.mode = GridMode::Horizontal;
    g.dims = {{-kPi, kPi, 15}, {0.0, 20000.0, 15}, {-kPi, kPi, 12}};
    return g;
}

GridSpec GridSpec::vertical_default() {
    GridSpec g;
    g.mode = GridMode::Vertical;
    g.dims = {{-2000.0, 2000.0, 15}, {-4000.0, 4000.0, 15}, {0.0, 60.0, 12}};
    return g;
}

GridSpec GridSpec::joint_small() {
    GridSpec g;
    g.mode = GridMode::Joint3d;
    g.dims = {{0.0, 10000.0, 8}, {-kPi, kPi, 8}, {-500.0, 500.0, 6}};
    return g;
}

std::vector<double> coords_from_geometry(GridMode mode, const AircraftState& own,
                                         const AircraftState& intr) {
    const double dx = intr.x - own.x;
    const double dy = intr.y - own.y;
    const double c = std::cos(own.heading), s = std::sin(own.heading);
    const double bx = dx * c + dy * s;
    const double by = -dx * s + dy * c;
    const double bearing = std::atan2(by, bx);
    const double range = std::hypot(dx, dy);
    const double relheading = wrap_pi(intr.heading - own.heading);
    const double dalt = intr.alt - own.alt;
    const double dvz = intr.vertical_rate - own.vertical_rate;

    switch (mode) {
        case GridMode::Horizontal: return {bearing, range, relheading};
        case GridMode::Vertical: {
            const double vnx = intr.ground_speed * std::cos(intr.heading) -
                               own.ground_speed * std::cos(own.heading);
            const double vny = intr.ground_speed * std::sin(intr.heading) -
                               own.ground_speed * std::sin(own.heading);
            const double cs2 = vnx * vnx + vny * vny;
            double tcpa = 0.0;
            if (cs2 > 1e-12) tcpa = std::clamp(-(dx * vnx + dy * vny) / cs2, 0.0, 60.0);
            return {dalt, dvz, tcpa};
        }
        case GridMode::Joint3d: return {range, bearing, dalt};
    }
    throw ContractError("unknown grid mode");
}

std::vector<double> coords_from_observation(GridMode mode, const Observation& o) {
    const double bearing = std::atan2(o[1], o[0]);
    const double range = o[9] * 10000.0;
    const double relheading = std::atan2(o[3], o[4]);
    const double dalt = o[2] * 1000.0;
    const double dvz = o[11] * 2000.0;
    const double tcpa = o[12] * 60.0;
    switch (mode) {
        case GridMode::Horizontal: return {bearing, range, relheading};
        case GridMode::Vertical: return {dalt, dvz, tcpa};
        case GridMode::Joint3d: return {range, bearing, dalt};
    }
    throw ContractError("unknown grid mode");
}

std::pair<AircraftState, AircraftState> geometry_from_coords(GridMode mode,
                                                             const std::vector<double>& coords,
                                                             double nominal_speed,
                                                             double nominal_alt) {
    AircraftState own;
    own.alt = nominal_alt;
    own.heading = 0.0;
    own.ground_speed = nominal_speed;
    AircraftState intr = own;

    switch (mode) {
        case GridMode::Horizontal: {
            const double bearing = coords[0], range = coords[1], relheading = coords[2];
            intr.x = range * std::cos(bearing);
            intr.y = range * std::sin(bearing);
            intr.heading = normalize_heading(relheading);
            return {own, intr};
        }
        case GridMode::Vertical: {
            const double dalt = coords[0], dvz = coords[1], tcpa = coords[2];
            own.vertical_rate = -0.5 * dvz;
            intr.vertical_rate = 0.5 * dvz;
            intr.alt = nominal_alt + dalt;
            intr.heading = kPi;  // head-on closure
            intr.x = std::max(1.0, 2.0 * nominal_speed * tcpa);
            return {own, intr};
        }
        case GridMode::Joint3d: {
            const double range = coords[0], bearing = coords[1], dalt = coords[2];
            intr.x = range * std::cos(bearing);
            intr.y = range * std::sin(bearing);
            intr.alt = nominal_alt + dalt;
            intr.heading = normalize_heading(bearing + kPi);  // pointed at the ownship
            return {own, intr};
        }
    }
    throw ContractError("unknown grid mode");
}

void DiscreteMdp::validate() const {
    if (n_states < 1) throw ValidationError("mdp needs at least one state");
    if (n_actions < 1) throw ValidationError("mdp needs at least one action");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("mdp gamma must lie in (0, 1)");
    if (transition.size() != static_cast<std::size_t>(n_states) * n_actions ||
        reward.size() != transition.size())
        throw ValidationError("mdp table shapes do not match state/action counts");
    for (const auto& row : transition) {
        double sum = 0.0;
        for (const auto& [s2, p] : row) {
            if (s2 < 0 || s2 >= n_states) throw ValidationError("mdp successor out of range");
            if (p < 0.0) throw ValidationError("mdp probabilities must be >= 0");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw ValidationError("mdp transition row does not sum to 1");
    }
}

ValueTable value_iteration(const DiscreteMdp& mdp, double tol, int max_sweeps, int workers) {
    mdp.validate();
    if (!(tol > 0.0)) throw ValidationError("value iteration tolerance must be > 0");
    if (max_sweeps < 1) throw ValidationError("value iteration needs at least one sweep");
    workers = std::max(1, workers);

    ValueTable table;
    table.values.assign(static_cast<std::size_t>(mdp.n_states), 0.0);
    std::vector<double> next(table.values.size(), 0.0);

    auto sweep_range = [&](int lo, int hi, double& local_residual) {
        double res = 0.0;
        for (int s = lo; s < hi; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a) {
                const auto row = mdp.row_index(s, a);
                double v = mdp.reward[row];
                for (const auto& [s2, p] : mdp.transition[row])
                    v += mdp.gamma * p * table.values[static_cast<std::size_t>(s2)];
                best = std::max(best, v);
            }
            next[static_cast<std::size_t>(s)] = best;
            res = std::max(res, std::fabs(best - table.values[static_cast<std::size_t>(s)]));
        }
        local_residual = res;
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        if (workers == 1 || mdp.n_states < 256) {
            sweep_range(0, mdp.n_states, residual);
        } else {
            std::vector<std::thread> threads;
            std::vector<double> partial(static_cast<std::size_t>(workers), 0.0);
            const int chunk = (mdp.n_states + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const int lo = w * chunk;
                const int hi = std::min(mdp.n_states, lo + chunk);
                if (lo >= hi) break;
                threads.emplace_back(sweep_range, lo, hi,
                                     std::ref(partial[static_cast<std::size_t>(w)]));
            }
            for (auto& t : threads) t.join();
            for (double r : partial) residual = std::max(residual, r);
        }
        table.values.swap(next);
        table.iteration_count = sweep + 1;
        table.residual = residual;
        if (residual < tol) {
            table.converged = true;
            break;
        }
    }
    return table;
}

QTable q_from_v(const DiscreteMdp& mdp, const ValueTable& v, const GridSpec& grid) {
    if (v.values.size() != static_cast<std::size_t>(mdp.n_states))
        throw ContractError("q_from_v: value table does not match the mdp");
    QTable table;
    table.grid = grid;
    table.gamma = mdp.gamma;
    table.solver_iterations = v.iteration_count;
    table.solver_residual = v.residual;
    table.q.assign(static_cast<std::size_t>(mdp.n_states) * kNumActions, 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            const auto row = mdp.row_index(s, a);
            double q = mdp.reward[row];
            for (const auto& [s2, p] : mdp.transition[row])
                q += mdp.gamma * p * v.values[static_cast<std::size_t>(s2)];
            table.q[row] = q;
        }
    }
    return table;
}

int greedy_action(const QTable& table, int state) {
    const double* row = table.q.data() + static_cast<std::size_t>(state) * kNumActions;
    int best = 0;
    for (int a = 1; a < kNumActions; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

PolicyFn qtable_policy(QTable table) {
    auto shared = std::make_shared<const QTable>(std::move(table));
    return [shared](const Observation& obs) {
        const auto coords = coords_from_observation(shared->grid.mode, obs);
        const int state = shared->grid.state_of(coords);
        return CombinedAction::from_index(greedy_action(*shared, state));
    };
}

DiscreteMdp build_mdp_from_simulator(const MdpBuildConfig& config) {
    config.grid.validate();
    config.reward.validate();
    if (config.samples_per_cell < 1)
        throw ValidationError("mdp build needs samples_per_cell >= 1");

    const int n_states = config.grid.state_count();
    DiscreteMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = kNumActions;
    mdp.gamma = config.gamma;
    mdp.transition.resize(static_cast<std::size_t>(n_states) * kNumActions);
    mdp.reward.assign(static_cast<std::size_t>(n_states) * kNumActions, 0.0);

    const auto stationary = config.chain.stationary();
    auto sample_marginal = [&stationary](Rng& rng) {
        const double u = rng.uniform();
        double cum = 0.0;
        for (int a = 0; a < kNumActions; ++a) {
            cum += stationary[static_cast<std::size_t>(a)];
            if (u < cum) return a;
        }
        return kNumActions - 1;
    };

    std::vector<int> counts(static_cast<std::size_t>(n_states));
    for (int s = 0; s < n_states; ++s) {
        const auto center = config.grid.cell_center(s);
        for (int a = 0; a < kNumActions; ++a) {
            const auto row = mdp.row_index(s, a);
            std::fill(counts.begin(), counts.end(), 0);
            double nmac_fraction = 0.0;
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(a)));
            for (int k = 0; k < config.samples_per_cell; ++k) {
                auto coords = center;
                if (k > 0) {
                    for (std::size_t d = 0; d < coords.size(); ++d) {
                        const auto& dim = config.grid.dims[d];
                        const double w = (dim.hi - dim.lo) / dim.bins;
                        coords[d] += rng.uniform(-0.5 * w, 0.5 * w);
                    }
                }
                auto [own, intr] = geometry_from_coords(config.grid.mode, coords,
                                                        config.nominal_speed,
                                                        config.nominal_alt);
                const auto intr_action = CombinedAction::from_index(sample_marginal(rng));
                own = propagate(own, CombinedAction::from_index(a), config.dt, config.dynamics);
                intr = propagate(intr, intr_action, config.dt, config.dynamics);
                const auto landed = coords_from_geometry(config.grid.mode, own, intr);
                counts[static_cast<std::size_t>(config.grid.state_of(landed))] += 1;
                if (detect_nmac(own, intr, config.dynamics)) nmac_fraction += 1.0;
            }
            nmac_fraction /= config.samples_per_cell;

            auto& sparse = mdp.transition[row];
            for (int s2 = 0; s2 < n_states; ++s2)
                if (counts[static_cast<std::size_t>(s2)] > 0)
                    sparse.emplace_back(
                        s2, static_cast<double>(counts[static_cast<std::size_t>(s2)]) /
                                config.samples_per_cell);

            // Reward memory (reversal, cease-alert) needs the previous action,
            // which this state space does not carry; the tabular analog keeps
            // the alert and NMAC terms.
            const bool alerting = !CombinedAction::from_index(a).is_clear();
            mdp.reward[row] = (alerting ? config.reward.alert_cost : 0.0) +
                              config.reward.nmac_cost * nmac_fraction;
        }
    }
    return mdp;
}

void save_qtable(const QTable& table, const std::string& path) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(table.grid.mode));
    w.u32(static_cast<std::uint32_t>(table.grid.dims.size()));
    for (const auto& d : table.grid.dims) {
        w.f64(d.lo);
        w.f64(d.hi);
        w.u32(static_cast<std::uint32_t>(d.bins));
    }
    w.f64(table.gamma);
    w.u32(static_cast<std::uint32_t>(table.solver_iterations));
    w.f64(table.solver_residual);
    w.u64(table.q.size());
    for (double q : table.q) w.f64(q);
    write_container(path, kQTableMagic, kQTableVersion, w);

    nlohmann::json meta;
    meta["mode"] = static_cast<int>(table.grid.mode);
    meta["gamma"] = table.gamma;
    meta["solver_iterations"] = table.solver_iterations;
    meta["solver_residual"] = table.solver_residual;
    auto& dims = meta["dims"] = nlohmann::json::array();
    for (const auto& d : table.grid.dims)
        dims.push_back({{"lo", d.lo}, {"hi", d.hi}, {"bins", d.bins}});
    meta["states"] = table.grid.state_count();
    meta["actions"] = kNumActions;
    write_file_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

QTable load_qtable(const std::string& path) {
    const auto payload = read_container(path, kQTableMagic, kQTableVersion);
    ByteReader r(payload);
    QTable table;
    table.grid.mode = static_cast<GridMode>(r.u32());
    const std::uint32_t n_dims = r.u32();
    if (n_dims != 3) throw ParseError("qtable grid must have three dimensions in " + path);
    table.grid.dims.resize(n_dims);
    for (auto& d : table.grid.dims) {
        d.lo = r.f64();
        d.hi = r.f64();
        d.bins = static_cast<int>(r.u32());
    }
    table.gamma = r.f64();
    table.solver_iterations = static_cast<int>(r.u32());
    table.solver_residual = r.f64();
    const std::uint64_t n = r.u64();
    const std::uint64_t expected =
        static_cast<std::uint64_t>(table.grid.state_count()) * kNumActions;
    if (n != expected)
        throw ParseError("qtable value count does not match its grid in " + path);
    table.q.resize(n);
    for (double& q : table.q) q = r.f64();
    if (r.remaining() != 0) throw ParseError("trailing bytes in qtable file " + path);
    return table;
}

}  // namespace catune
