#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "simplex.hpp"

using namespace cipherlab;

TEST_CASE("uniform simplex samples satisfy the invariants") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto x = uniform_simplex_sample(3, rng);
        double sum = 0;
        for (double v : x) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(uniform_simplex_sample(1, rng), std::invalid_argument);
}

TEST_CASE("uniform on the segment: k=2 first coordinate has mean 1/2") {
    Rng rng(2);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += uniform_simplex_sample(2, rng)[0];
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("fixed seed reproduces the draw") {
    Rng a(7), b(7);
    CHECK(uniform_simplex_sample(4, a) == uniform_simplex_sample(4, b));
}

TEST_CASE("relaxed samples rediscretize to their vertex (1e5 draws)") {
    Rng rng(3);
    for (int i = 0; i < 100000; ++i) {
        const auto x = relaxed_vertex_sample(0, 3, 0.15, rng);
        CHECK(nearest_vertex(x) == 0);
    }
}

TEST_CASE("relaxed samples are interior and shrink with eps") {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const auto x = relaxed_vertex_sample(1, 3, 0.3, rng);
        for (double v : x) CHECK(v > 0.0);
    }
    // eps -> 0 degenerates to the vertex
    const auto tight = relaxed_vertex_sample(2, 3, 1e-9, rng);
    CHECK(tight[2] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(relaxed_vertex_sample(0, 3, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(relaxed_vertex_sample(3, 3, 0.1, rng), std::invalid_argument);
}

TEST_CASE("toy experiment grids are valid simplex points with finite gradients") {
    ToyOptions opt;
    opt.steps = 50; // shape check only
    opt.grid_res = 16;
    opt.seed = 5;
    for (Regime regime : {Regime::none, Regime::gradient_penalty, Regime::relaxed_sampling}) {
        opt.regime = regime;
        const auto result = run_toy_experiment(opt);
        CHECK(result.grid.size() == (17 * 18) / 2);
        for (const auto& p : result.grid) {
            CHECK(p.b1 + p.b2 + p.b3 == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(p.b1 >= 0.0);
            CHECK(std::isfinite(p.gradnorm));
            CHECK(std::isfinite(p.d));
        }
        CHECK(std::isfinite(result.barycenter_gradnorm));
    }
}

TEST_CASE("grid csv round trips") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "cipherlab_simplex";
    fs::create_directories(dir);
    const auto path = (dir / "grid.csv").string();

    ToyOptions opt;
    opt.steps = 10;
    opt.grid_res = 8;
    const auto result = run_toy_experiment(opt);
    write_simplex_grid(path, result);
    const auto back = read_simplex_grid(path);
    REQUIRE(back.size() == result.grid.size());
    CHECK(back[3].gradnorm == doctest::Approx(result.grid[3].gradnorm).epsilon(1e-6));
    fs::remove_all(dir);
}

TEST_CASE("regime names round trip") {
    for (Regime r : {Regime::none, Regime::gradient_penalty, Regime::relaxed_sampling})
        CHECK(regime_from(regime_name(r)) == r);
    CHECK_THROWS_AS(regime_from("bogus"), std::invalid_argument);
}

TEST_CASE("trained regimes reproduce the qualitative gradient-field contrast") {
    // Desk-scale version of the acceptance criterion: one paired seed.
    ToyOptions opt;
    opt.steps = 800;
    opt.grid_res = 24;
    opt.seed = 11;

    opt.regime = Regime::none;
    const auto none = run_toy_experiment(opt);
    opt.regime = Regime::relaxed_sampling;
    const auto relaxed = run_toy_experiment(opt);
    opt.regime = Regime::gradient_penalty;
    const auto gp = run_toy_experiment(opt);

    // collapse: barycenter gradient is a small fraction of the grid max
    CHECK(none.barycenter_gradnorm < 0.05 * none.max_gradnorm);
    // relaxed sampling keeps slope at the barycenter
    CHECK(relaxed.barycenter_gradnorm >= 5.0 * none.barycenter_gradnorm);
    // the penalty pins interpolate gradients near 1
    CHECK(gp.segment_mean_gradnorm > 0.5);
    CHECK(gp.segment_mean_gradnorm < 1.5);
}
