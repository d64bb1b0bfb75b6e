#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"

namespace cipherlab {

// Uniform draw from the standard simplex via normalized exponentials.
std::vector<double> uniform_simplex_sample(std::size_t k, Rng& rng);

// x = (1-e)*v + e*u with e ~ U[0, eps_max] and u uniform on the simplex;
// eps_max < 0.5 guarantees the nearest vertex of every sample is still v.
std::vector<double> relaxed_vertex_sample(std::size_t vertex, std::size_t k, double eps_max,
                                          Rng& rng);

std::size_t nearest_vertex(const std::vector<double>& point);

enum class Regime { none, gradient_penalty, relaxed_sampling };

std::string regime_name(Regime r);
Regime regime_from(const std::string& name);

struct SimplexGridPoint {
    double b1, b2, b3; // barycentric coordinates
    double d;          // critic value
    double gradnorm;   // |grad_x D|
};

struct ToyResult {
    std::vector<SimplexGridPoint> grid;
    double barycenter_gradnorm = 0;
    double barycenter_d = 0;
    double segment_mean_gradnorm = 0; // along vertex -> barycenter
    double max_gradnorm = 0;          // over the grid
};

enum class ToyLoss { least_squares, log_likelihood };

struct ToyOptions {
    Regime regime = Regime::none;
    ToyLoss loss = ToyLoss::log_likelihood;
    std::int64_t steps = 2000;
    std::size_t batch = 128;
    std::size_t hidden = 64;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double alpha_gp = 10.0;
    double eps_max = 0.15;
    std::size_t grid_res = 64;
    std::uint64_t seed = 1;
};

// Trains a small critic to score one vertex of the 2-simplex as real against
// uniform interior fakes, under the chosen regularization regime, then
// evaluates the critic and its input-gradient field on a barycentric grid.
ToyResult run_toy_experiment(const ToyOptions& options);

void write_simplex_grid(const std::string& path, const ToyResult& result);
std::vector<SimplexGridPoint> read_simplex_grid(const std::string& path);

} // namespace cipherlab
