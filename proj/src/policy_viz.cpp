#include "catune/policy_viz.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "catune/binio.hpp"
#include "catune/errors.hpp"

namespace catune {

// white = CLEAR/CLEAR; pure maneuvers get primary hues, combined maneuvers
// mixed ones.
const std::array<std::array<std::uint8_t, 3>, 9> kActionPalette = {{
    {23, 190, 207},    // 0 CLIMB/LEFT teal
    {44, 160, 44},     // 1 CLIMB/CLEAR green
    {188, 189, 34},    // 2 CLIMB/RIGHT olive
    {31, 119, 180},    // 3 CLEAR/LEFT blue
    {255, 255, 255},   // 4 CLEAR/CLEAR white
    {255, 127, 14},    // 5 CLEAR/RIGHT orange
    {148, 103, 189},   // 6 DESCEND/LEFT purple
    {214, 39, 40},     // 7 DESCEND/CLEAR red
    {140, 86, 75},     // 8 DESCEND/RIGHT brown
}};

void PlotSpec::validate() const {
    if (nx < 2 || ny < 2) throw ValidationError("plot resolution must be >= 2 per axis");
    if (!(x_max > x_min) || !(y_max > y_min))
        throw ValidationError("plot extents must be ordered");
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) ||
        !std::isfinite(y_max))
        throw ValidationError("plot extents must be finite");
    if (!(own_speed >= 0.0) || !(intruder_speed >= 0.0))
        throw ValidationError("plot speeds must be >= 0");
}

bool PlotSpec::layout_equals(const PlotSpec& o) const {
    return plane == o.plane && nx == o.nx && ny == o.ny && x_min == o.x_min &&
           x_max == o.x_max && y_min == o.y_min && y_max == o.y_max &&
           fixed_rel_alt == o.fixed_rel_alt && fixed_bearing == o.fixed_bearing &&
           intruder_heading == o.intruder_heading && own_speed == o.own_speed &&
           intruder_speed == o.intruder_speed && own_alt == o.own_alt &&
           own_vz == o.own_vz && intruder_vz == o.intruder_vz;
}

Observation observation_for_cell(const PlotSpec& spec, double cx, double cy) {
    AircraftState own;
    own.alt = spec.own_alt;
    own.heading = 0.0;
    own.ground_speed = spec.own_speed;
    own.vertical_rate = spec.own_vz;

    AircraftState intr;
    intr.ground_speed = spec.intruder_speed;
    intr.vertical_rate = spec.intruder_vz;
    intr.heading = normalize_heading(spec.intruder_heading);
    if (spec.plane == PlotPlane::Horizontal) {
        intr.x = cy;  // north
        intr.y = cx;  // east
        intr.alt = spec.own_alt + spec.fixed_rel_alt;
    } else {
        intr.x = cx * std::cos(spec.fixed_bearing);
        intr.y = cx * std::sin(spec.fixed_bearing);
        intr.alt = spec.own_alt + cy;
    }
    return observe(own, intr, kClearClear);
}

PolicyGrid policy_grid(const PolicyFn& policy, const PlotSpec& spec, int workers) {
    spec.validate();
    if (!policy) throw ContractError("policy_grid: policy missing");
    workers = std::max(1, workers);

    PolicyGrid grid;
    grid.spec = spec;
    grid.actions.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 0);

    const double wx = (spec.x_max - spec.x_min) / spec.nx;
    const double wy = (spec.y_max - spec.y_min) / spec.ny;

    auto fill_rows = [&](int lo, int hi, const PolicyFn& pol) {
        for (int iy = lo; iy < hi; ++iy) {
            const double cy = spec.y_min + (iy + 0.5) * wy;
            for (int ix = 0; ix < spec.nx; ++ix) {
                const double cx = spec.x_min + (ix + 0.5) * wx;
                CombinedAction a;
                try {
                    a = pol(observation_for_cell(spec, cx, cy));
                } catch (const Error& e) {
                    throw ContractError("policy_grid: policy failed at cell (" +
                                        std::to_string(cx) + ", " + std::to_string(cy) +
                                        "): " + e.what());
                }
                const int idx = a.index();
                grid.actions[static_cast<std::size_t>(iy) * spec.nx + ix] =
                    static_cast<std::uint8_t>(idx);
            }
        }
    };

    if (workers == 1) {
        fill_rows(0, spec.ny, policy);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        const int chunk = (spec.ny + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int lo = w * chunk;
            const int hi = std::min(spec.ny, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back([&, lo, hi, w]() {
                try {
                    const PolicyFn local = policy;
                    fill_rows(lo, hi, local);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return grid;
}

namespace {

void format_coord(std::ostringstream& out, double v) {
    out.precision(17);
    out << v;
}

std::string render_ppm(const PolicyGrid& grid) {
    std::ostringstream out;
    out << "P6\n" << grid.spec.nx << ' ' << grid.spec.ny << "\n255\n";
    // top row of the image is the maximum y (north / high altitude up)
    for (int iy = grid.spec.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < grid.spec.nx; ++ix) {
            const auto& rgb = kActionPalette[static_cast<std::size_t>(grid.at(ix, iy))];
            out.put(static_cast<char>(rgb[0]));
            out.put(static_cast<char>(rgb[1]));
            out.put(static_cast<char>(rgb[2]));
        }
    }
    return out.str();
}

std::string render_svg(const PolicyGrid& grid) {
    const auto& s = grid.spec;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << s.nx * 4
        << "\" height=\"" << s.ny * 4 + 40 << "\" viewBox=\"0 0 " << s.nx * 4 << ' '
        << s.ny * 4 + 40 << "\">\n";
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            const auto& rgb = kActionPalette[static_cast<std::size_t>(grid.at(ix, iy))];
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
            out << "<rect x=\"" << ix * 4 << "\" y=\"" << (s.ny - 1 - iy) * 4
                << "\" width=\"4\" height=\"4\" fill=\"" << color << "\"/>\n";
        }
    }
    // legend band along the bottom
    static const char* names[9] = {"CLIMB/LEFT",   "CLIMB/CLEAR", "CLIMB/RIGHT",
                                   "CLEAR/LEFT",   "CLEAR/CLEAR", "CLEAR/RIGHT",
                                   "DESCEND/LEFT", "DESCEND/CLEAR", "DESCEND/RIGHT"};
    for (int a = 0; a < 9; ++a) {
        const auto& rgb = kActionPalette[static_cast<std::size_t>(a)];
        char color[8];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
        const int x = a * (s.nx * 4 / 9);
        out << "<rect x=\"" << x << "\" y=\"" << s.ny * 4 + 8
            << "\" width=\"10\" height=\"10\" stroke=\"#000000\" fill=\"" << color
            << "\"/>\n";
        out << "<text x=\"" << x + 12 << "\" y=\"" << s.ny * 4 + 17
            << "\" font-size=\"8\">" << names[a] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_csv(const PolicyGrid& grid) {
    const auto& s = grid.spec;
    const double wx = (s.x_max - s.x_min) / s.nx;
    const double wy = (s.y_max - s.y_min) / s.ny;
    std::ostringstream out;
    out << "x,y,action_index\n";
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            format_coord(out, s.x_min + (ix + 0.5) * wx);
            out << ',';
            format_coord(out, s.y_min + (iy + 0.5) * wy);
            out << ',' << grid.at(ix, iy) << '\n';
        }
    }
    return out.str();
}

}  // namespace

std::string render(const PolicyGrid& grid) {
    grid.spec.validate();
    if (grid.actions.size() != static_cast<std::size_t>(grid.spec.nx) * grid.spec.ny)
        throw ContractError("render: grid shape mismatch");
    for (auto a : grid.actions)
        if (a >= 9) throw ContractError("render: invalid action index in grid");
    switch (grid.spec.format) {
        case PlotFormat::Ppm: return render_ppm(grid);
        case PlotFormat::Svg: return render_svg(grid);
        case PlotFormat::Csv: return render_csv(grid);
    }
    throw ValidationError("render: unsupported format");
}

std::string render_legend() {
    static const char* names[9] = {"CLIMB/LEFT",   "CLIMB/CLEAR",   "CLIMB/RIGHT",
                                   "CLEAR/LEFT",   "CLEAR/CLEAR",   "CLEAR/RIGHT",
                                   "DESCEND/LEFT", "DESCEND/CLEAR", "DESCEND/RIGHT"};
    std::ostringstream out;
    out << "action_index,vertical/horizontal,r,g,b\n";
    for (int a = 0; a < 9; ++a) {
        const auto& rgb = kActionPalette[static_cast<std::size_t>(a)];
        out << a << ',' << names[a] << ',' << static_cast<int>(rgb[0]) << ','
            << static_cast<int>(rgb[1]) << ',' << static_cast<int>(rgb[2]) << '\n';
    }
    return out.str();
}

void write_plot(const PolicyGrid& grid, const std::string& path) {
    write_file_atomic(path, render(grid));
    if (grid.spec.format == PlotFormat::Ppm)
        write_file_atomic(path + ".legend.txt", render_legend());
}

GridDifference grid_difference(const PolicyGrid& a, const PolicyGrid& b) {
    if (!a.spec.layout_equals(b.spec))
        throw ValidationError("grid_difference: plot specs do not match");
    if (a.actions.size() != b.actions.size())
        throw ValidationError("grid_difference: grid sizes do not match");
    GridDifference diff;
    long long differing = 0;
    for (std::size_t i = 0; i < a.actions.size(); ++i) {
        const int ia = a.actions[i];
        const int ib = b.actions[i];
        diff.confusion[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)] += 1;
        if (ia != ib) ++differing;
    }
    diff.disagreement = static_cast<double>(differing) / static_cast<double>(a.actions.size());
    return diff;
}

}  // namespace catune
