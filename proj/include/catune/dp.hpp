#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "catune/simulator.hpp"

namespace catune {

// Grid projections of the relative geometry. The horizontal and vertical
// tables mirror the split-logic decomposition; the joint mode is a small
// 3-D grid used by the oracle tests.
enum class GridMode : std::uint8_t { Horizontal = 0, Vertical = 1, Joint3d = 2 };

struct GridDim {
    double lo = 0.0;
    double hi = 1.0;
    int bins = 1;
};

// Nearest-bin index with clamping; a value equidistant between two bin
// centers rounds down.
int discretize(double value, const GridDim& dim);

struct GridSpec {
    GridMode mode = GridMode::Joint3d;
    std::vector<GridDim> dims;

    int state_count() const;
    int state_of(const std::vector<double>& coords) const;
    std::vector<double> cell_center(int state) const;
    void validate() const;

    static GridSpec horizontal_default();
    static GridSpec vertical_default();
    static GridSpec joint_small();
};

// Geometry <-> grid coordinates for each mode.
std::vector<double> coords_from_geometry(GridMode mode, const AircraftState& own,
                                         const AircraftState& intr);
std::vector<double> coords_from_observation(GridMode mode, const Observation& obs);
// Reconstructs a representative aircraft pair for a grid point.
std::pair<AircraftState, AircraftState> geometry_from_coords(GridMode mode,
                                                             const std::vector<double>& coords,
                                                             double nominal_speed,
                                                             double nominal_alt);

struct DiscreteMdp {
    int n_states = 0;
    int n_actions = kNumActions;
    // sparse row per (state, action): successors with probabilities
    std::vector<std::vector<std::pair<int, double>>> transition;
    std::vector<double> reward;  // R(s, a), row-major state x action
    double gamma = 0.95;

    std::size_t row_index(int s, int a) const {
        return static_cast<std::size_t>(s) * n_actions + a;
    }
    void validate() const;
};

struct ValueTable {
    std::vector<double> values;
    int iteration_count = 0;
    double residual = 0.0;
    bool converged = false;
};

struct QTable {
    GridSpec grid;
    double gamma = 0.95;
    std::vector<double> q;  // state x action
    int solver_iterations = 0;
    double solver_residual = 0.0;

    double at(int s, int a) const {
        return q[static_cast<std::size_t>(s) * kNumActions + a];
    }
};

// Bellman sweeps from V = 0 until the max-norm residual drops below tol.
// Jacobi-style double buffering; parallel sweeps are worker-count invariant.
ValueTable value_iteration(const DiscreteMdp& mdp, double tol, int max_sweeps,
                           int workers = 1);

QTable q_from_v(const DiscreteMdp& mdp, const ValueTable& v, const GridSpec& grid);

// Argmax per state; ties break to the lowest action index.
int greedy_action(const QTable& table, int state);
PolicyFn qtable_policy(QTable table);

struct MdpBuildConfig {
    GridSpec grid = GridSpec::joint_small();
    IntruderChain chain;
    DynamicsConfig dynamics;
    RewardParams reward;
    double dt = 1.0;
    double nominal_speed = 250.0;
    double nominal_alt = 5000.0;
    int samples_per_cell = 50;
    std::uint64_t seed = 0;
    double gamma = 0.95;
};

// Monte Carlo transition estimation: step each cell center (sample 0) plus
// jittered copies under every ownship action with intruder actions drawn
// from the chain's stationary marginal, then histogram the landing cells.
DiscreteMdp build_mdp_from_simulator(const MdpBuildConfig& config);

inline constexpr std::int64_t kMaxMdpStates = 1000000;

void save_qtable(const QTable& table, const std::string& path);
QTable load_qtable(const std::string& path);

}  // namespace catune
