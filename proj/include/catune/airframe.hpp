#pragma once

#include "catune/actions.hpp"

namespace catune {

// Kinematic truth state of one aircraft. x is north, y is east, heading is
// measured from north toward east in [0, 2*pi).
struct AircraftState {
    double x = 0.0;             // ft
    double y = 0.0;             // ft
    double alt = 0.0;           // ft
    double heading = 0.0;       // rad, [0, 2*pi)
    double ground_speed = 0.0;  // ft/s
    double vertical_rate = 0.0; // ft/min
    double turn_rate = 0.0;     // rad/s

    bool finite() const;
};

// Advisory magnitudes, slew limits and NMAC thresholds.
struct DynamicsConfig {
    double turn_rate_cmd = 0.05235987755982988;  // 3 deg/s, rad/s
    double turn_slew = 0.017453292519943295;     // 1 deg/s^2, rad/s^2
    double vz_cmd = 1500.0;                      // ft/min
    double vz_slew = 500.0;                      // ft/min per s
    double nmac_horizontal = 500.0;              // ft
    double nmac_vertical = 100.0;                // ft
    bool nmac_terminal = true;

    void validate() const;
};

// Advances one aircraft by dt seconds under a combined advisory. Commanded
// turn and vertical rates are approached with slew-limited ramps; position
// integrates the resulting heading profile exactly up to quadrature error
// far below 1e-9 ft per step. CLEAR on an axis commands the rate back to 0.
AircraftState propagate(const AircraftState& state, CombinedAction action, double dt,
                        const DynamicsConfig& dyn = {});

// True iff horizontal separation < nmac_horizontal AND vertical separation
// < nmac_vertical, both strict.
bool detect_nmac(const AircraftState& own, const AircraftState& intr,
                 const DynamicsConfig& dyn = {});

double normalize_heading(double rad);

}  // namespace catune
