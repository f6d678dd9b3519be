#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "catune/dp.hpp"
#include "catune/errors.hpp"
#include "catune/mlp.hpp"
#include "catune/policy_viz.hpp"
#include "test_util.hpp"

using namespace catune;
using namespace catune::testutil;

namespace {

PlotSpec small_spec(int n = 12) {
    PlotSpec s;
    s.nx = n;
    s.ny = n;
    s.x_min = -9000;
    s.x_max = 9000;
    s.y_min = -9000;
    s.y_max = 9000;
    return s;
}

}  // namespace

TEST_CASE("constant policy fills the grid with one action") {
    const auto grid = policy_grid(clear_policy(), small_spec());
    for (auto a : grid.actions) CHECK(a == 4);
}

TEST_CASE("rendering is byte-deterministic across calls and worker counts") {
    const auto w = MlpWeights::seeded_init({25, 16, 9}, 9);
    const auto policy = mlp_policy(w);
    const auto spec = small_spec(21);
    const auto g1 = policy_grid(policy, spec, 1);
    const auto g4 = policy_grid(policy, spec, 4);
    CHECK(g1.actions == g4.actions);
    CHECK(render(g1) == render(g4));

    for (auto fmt : {PlotFormat::Ppm, PlotFormat::Svg, PlotFormat::Csv}) {
        PolicyGrid g = g1;
        g.spec.format = fmt;
        CHECK(render(g) == render(g));
    }
}

TEST_CASE("2x2 clear grid renders four white pixels") {
    PlotSpec spec = small_spec(2);
    const auto grid = policy_grid(clear_policy(), spec);
    const auto bytes = render(grid);
    const std::string header = "P6\n2 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(bytes.substr(0, header.size()) == header);
    for (std::size_t i = header.size(); i < bytes.size(); ++i)
        CHECK(static_cast<std::uint8_t>(bytes[i]) == 255);
}

TEST_CASE("csv output has one row per cell plus a header") {
    PolicyGrid grid = policy_grid(clear_policy(), small_spec(7));
    grid.spec.format = PlotFormat::Csv;
    const auto text = render(grid);
    const auto rows = std::count(text.begin(), text.end(), '\n');
    CHECK(rows == 7 * 7 + 1);
}

TEST_CASE("dp greedy policy grid equals direct qtable argmax") {
    MdpBuildConfig cfg;
    cfg.grid = GridSpec::joint_small();
    cfg.chain = build_markov_chain(10.0, 20.0);
    cfg.samples_per_cell = 4;
    const auto mdp = build_mdp_from_simulator(cfg);
    const auto v = value_iteration(mdp, 1e-9, 5000);
    const auto table = q_from_v(mdp, v, cfg.grid);

    const auto spec = small_spec(25);
    const auto grid = policy_grid(qtable_policy(table), spec);
    const double wx = (spec.x_max - spec.x_min) / spec.nx;
    const double wy = (spec.y_max - spec.y_min) / spec.ny;
    for (int iy = 0; iy < spec.ny; ++iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const auto obs = observation_for_cell(spec, spec.x_min + (ix + 0.5) * wx,
                                                  spec.y_min + (iy + 0.5) * wy);
            const int state = table.grid.state_of(coords_from_observation(table.grid.mode, obs));
            CHECK(grid.at(ix, iy) == greedy_action(table, state));
        }
    }
}

TEST_CASE("left-right symmetric policy produces a mirror-symmetric grid") {
    // turns away from the intruder's side; CLEAR on the centerline
    const PolicyFn sideways = [](const Observation& o) {
        const double east = o[1];
        if (east > 1e-9) return CombinedAction{VerticalAction::Clear, HorizontalAction::Left};
        if (east < -1e-9) return CombinedAction{VerticalAction::Clear, HorizontalAction::Right};
        return kClearClear;
    };
    const auto spec = small_spec(20);  // even: cells pair exactly across x = 0
    const auto grid = policy_grid(sideways, spec);
    auto mirror = [](int a) {
        const auto act = CombinedAction::from_index(a);
        const auto h = act.horizontal == HorizontalAction::Left    ? HorizontalAction::Right
                       : act.horizontal == HorizontalAction::Right ? HorizontalAction::Left
                                                                   : HorizontalAction::Clear;
        return CombinedAction{act.vertical, h}.index();
    };
    for (int iy = 0; iy < spec.ny; ++iy)
        for (int ix = 0; ix < spec.nx; ++ix)
            CHECK(grid.at(ix, iy) == mirror(grid.at(spec.nx - 1 - ix, iy)));
}

TEST_CASE("grid difference: identity, total disagreement, confusion mass") {
    const auto clear_grid = policy_grid(clear_policy(), small_spec(10));
    const auto self = grid_difference(clear_grid, clear_grid);
    CHECK(self.disagreement == 0.0);

    const PolicyFn left = [](const Observation&) {
        return CombinedAction{VerticalAction::Clear, HorizontalAction::Left};
    };
    const auto left_grid = policy_grid(left, small_spec(10));
    const auto diff = grid_difference(clear_grid, left_grid);
    CHECK(diff.disagreement == 1.0);
    CHECK(diff.confusion[4][3] == 100);

    PolicyGrid other = clear_grid;
    other.spec.nx = 11;
    CHECK_THROWS_AS(grid_difference(clear_grid, other), ValidationError);
}

TEST_CASE("disagreement is a metric on grids with a shared spec") {
    Rng rng(44);
    const auto spec = small_spec(6);
    auto random_grid = [&]() {
        PolicyGrid g;
        g.spec = spec;
        g.actions.resize(36);
        for (auto& a : g.actions) a = static_cast<std::uint8_t>(rng.uniform_int(9));
        return g;
    };
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_grid();
        const auto b = random_grid();
        const auto c = random_grid();
        const double ab = grid_difference(a, b).disagreement;
        const double ba = grid_difference(b, a).disagreement;
        const double ac = grid_difference(a, c).disagreement;
        const double cb = grid_difference(c, b).disagreement;
        CHECK(ab == ba);
        CHECK(ab <= ac + cb + 1e-12);
        CHECK((ab == 0.0) == (a.actions == b.actions));
    }
}

TEST_CASE("write_plot emits the file plus a legend sidecar for ppm") {
    const auto grid = policy_grid(clear_policy(), small_spec(4));
    const auto path =
        (std::filesystem::temp_directory_path() / "catune_test_plot.ppm").string();
    write_plot(grid, path);
    CHECK(std::filesystem::exists(path));
    CHECK(std::filesystem::exists(path + ".legend.txt"));
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".legend.txt");
}
