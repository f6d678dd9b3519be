#include "catune/airframe.hpp"

#include <cmath>

#include "catune/errors.hpp"

namespace catune {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// 7-point Gauss-Legendre nodes/weights on [-1, 1]. Used only for the short
// turn-rate ramp phase; heading changes per step are a few degrees, so the
// quadrature error is far below float noise.
constexpr double kGlNode[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGlWeight[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

double vertical_target(VerticalAction a, const DynamicsConfig& dyn) {
    switch (a) {
        case VerticalAction::Climb: return dyn.vz_cmd;
        case VerticalAction::Descend: return -dyn.vz_cmd;
        default: return 0.0;
    }
}

double turn_target(HorizontalAction a, const DynamicsConfig& dyn) {
    switch (a) {
        case HorizontalAction::Left: return -dyn.turn_rate_cmd;
        case HorizontalAction::Right: return dyn.turn_rate_cmd;
        default: return 0.0;
    }
}

}  // namespace

bool AircraftState::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(alt) &&
           std::isfinite(heading) && std::isfinite(ground_speed) &&
           std::isfinite(vertical_rate) && std::isfinite(turn_rate);
}

void DynamicsConfig::validate() const {
    if (!(turn_rate_cmd >= 0.0) || !(turn_slew > 0.0) || !(vz_cmd >= 0.0) ||
        !(vz_slew > 0.0) || !(nmac_horizontal > 0.0) || !(nmac_vertical > 0.0))
        throw ValidationError("dynamics config values must be positive");
}

double normalize_heading(double rad) {
    double h = std::fmod(rad, kTwoPi);
    if (h < 0.0) h += kTwoPi;
    if (h >= kTwoPi) h = 0.0;
    return h;
}

AircraftState propagate(const AircraftState& state, CombinedAction action, double dt,
                        const DynamicsConfig& dyn) {
    if (!state.finite()) throw NumericError("propagate: non-finite input state");
    if (!(dt > 0.0)) throw ValidationError("propagate: dt must be > 0");

    AircraftState out = state;

    // Vertical axis: slew-limited ramp toward the commanded rate, then hold.
    {
        const double target = vertical_target(action.vertical, dyn);
        const double vz0 = state.vertical_rate;
        const double s = (target > vz0) ? 1.0 : (target < vz0 ? -1.0 : 0.0);
        const double ramp = (s == 0.0) ? 0.0 : std::fabs(target - vz0) / dyn.vz_slew;
        const double t1 = std::min(ramp, dt);
        // ft/min integrated over seconds -> /60 for ft
        out.alt += (vz0 * t1 + 0.5 * s * dyn.vz_slew * t1 * t1) / 60.0;
        out.vertical_rate = vz0 + s * dyn.vz_slew * t1;
        if (dt > t1) {
            out.alt += target * (dt - t1) / 60.0;
            out.vertical_rate = target;
        }
    }

    // Horizontal axis: ramp the turn rate, integrating position through the
    // quadratic heading profile, then fly the remaining arc in closed form.
    {
        const double target = turn_target(action.horizontal, dyn);
        const double w0 = state.turn_rate;
        const double s = (target > w0) ? 1.0 : (target < w0 ? -1.0 : 0.0);
        const double ramp = (s == 0.0) ? 0.0 : std::fabs(target - w0) / dyn.turn_slew;
        const double t1 = std::min(ramp, dt);
        const double v = state.ground_speed;

        double psi = state.heading;
        if (t1 > 0.0) {
            const double half = 0.5 * t1;
            for (int i = 0; i < 7; ++i) {
                const double tau = half * (kGlNode[i] + 1.0);
                const double h = psi + w0 * tau + 0.5 * s * dyn.turn_slew * tau * tau;
                out.x += v * std::cos(h) * kGlWeight[i] * half;
                out.y += v * std::sin(h) * kGlWeight[i] * half;
            }
            psi += w0 * t1 + 0.5 * s * dyn.turn_slew * t1 * t1;
            out.turn_rate = w0 + s * dyn.turn_slew * t1;
        }
        if (dt > t1) {
            const double rest = dt - t1;
            const double w = out.turn_rate;
            if (std::fabs(w) < 1e-12) {
                out.x += v * std::cos(psi) * rest;
                out.y += v * std::sin(psi) * rest;
            } else {
                const double psi1 = psi + w * rest;
                out.x += v / w * (std::sin(psi1) - std::sin(psi));
                out.y -= v / w * (std::cos(psi1) - std::cos(psi));
            }
            psi += w * rest;
            out.turn_rate = target;
        }
        out.heading = normalize_heading(psi);
    }

    return out;
}

bool detect_nmac(const AircraftState& own, const AircraftState& intr,
                 const DynamicsConfig& dyn) {
    if (!own.finite() || !intr.finite())
        throw NumericError("detect_nmac: non-finite state");
    const double dh = std::hypot(intr.x - own.x, intr.y - own.y);
    const double dv = std::fabs(intr.alt - own.alt);
    return dh < dyn.nmac_horizontal && dv < dyn.nmac_vertical;
}

}  // namespace catune
