#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "catune/simulator.hpp"

namespace catune {

enum class PlotPlane : std::uint8_t { Horizontal = 0, Vertical = 1 };
enum class PlotFormat : std::uint8_t { Ppm = 0, Svg = 1, Csv = 2 };

// A 2-D sweep of intruder placements around a fixed ownship (at the origin,
// heading north). Horizontal: x east / y north at fixed relative altitude.
// Vertical: x range along a fixed bearing / y relative altitude.
struct PlotSpec {
    PlotPlane plane = PlotPlane::Horizontal;
    int nx = 151;
    int ny = 151;
    double x_min = -15000.0;
    double x_max = 15000.0;
    double y_min = -15000.0;
    double y_max = 15000.0;
    double fixed_rel_alt = 0.0;      // horizontal plane
    double fixed_bearing = 0.0;      // vertical plane, rad
    double intruder_heading = 3.14159265358979323846;  // head-on by default
    double own_speed = 250.0;
    double intruder_speed = 250.0;
    double own_alt = 5000.0;
    double own_vz = 0.0;
    double intruder_vz = 0.0;
    PlotFormat format = PlotFormat::Ppm;

    void validate() const;
    bool layout_equals(const PlotSpec& o) const;
};

struct PolicyGrid {
    PlotSpec spec;
    std::vector<std::uint8_t> actions;  // row-major [iy][ix], action index 0-8

    int at(int ix, int iy) const {
        return actions[static_cast<std::size_t>(iy) * spec.nx + ix];
    }
};

// Builds the observation for one cell of the sweep.
Observation observation_for_cell(const PlotSpec& spec, double cx, double cy);

PolicyGrid policy_grid(const PolicyFn& policy, const PlotSpec& spec, int workers = 1);

// Fixed 9-color palette, indexed by action. Documented in docs/plots.md and
// emitted into the PPM sidecar legend.
extern const std::array<std::array<std::uint8_t, 3>, 9> kActionPalette;

// Byte-deterministic rendering: the same grid always produces identical
// bytes in every format.
std::string render(const PolicyGrid& grid);
std::string render_legend();

// Writes the rendered grid; PPM output gets a .legend.txt sidecar.
void write_plot(const PolicyGrid& grid, const std::string& path);

struct GridDifference {
    double disagreement = 0.0;  // fraction of differing cells
    std::array<std::array<long long, 9>, 9> confusion{};
};

GridDifference grid_difference(const PolicyGrid& a, const PolicyGrid& b);

}  // namespace catune
