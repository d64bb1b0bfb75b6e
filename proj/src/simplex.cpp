#include "simplex.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "model.hpp"
#include "nn_ops.hpp"
#include "optim.hpp"
#include "tensor.hpp"

namespace cipherlab {

std::vector<double> uniform_simplex_sample(std::size_t k, Rng& rng) {
    if (k < 2) throw std::invalid_argument("simplex: k must be at least 2");
    std::vector<double> x(k);
    double total = 0;
    for (auto& v : x) {
        v = rng.exponential();
        total += v;
    }
    for (auto& v : x) v /= total;
    return x;
}

std::vector<double> relaxed_vertex_sample(std::size_t vertex, std::size_t k, double eps_max,
                                          Rng& rng) {
    if (vertex >= k) throw std::invalid_argument("simplex: vertex index out of range");
    if (!(eps_max > 0.0) || !(eps_max < 0.5))
        throw std::invalid_argument(
            "simplex: eps_max must lie in (0, 0.5) to keep samples in the vertex cell");
    const double eps = eps_max * rng.uniform();
    auto u = uniform_simplex_sample(k, rng);
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = eps * u[i] + (i == vertex ? 1.0 - eps : 0.0);
    return x;
}

std::size_t nearest_vertex(const std::vector<double>& point) {
    // Nearest vertex in Euclidean distance = largest coordinate.
    return static_cast<std::size_t>(
        std::distance(point.begin(), std::max_element(point.begin(), point.end())));
}

std::string regime_name(Regime r) {
    switch (r) {
    case Regime::none: return "none";
    case Regime::gradient_penalty: return "gp";
    case Regime::relaxed_sampling: return "relaxed";
    }
    return "none";
}

Regime regime_from(const std::string& name) {
    if (name == "none") return Regime::none;
    if (name == "gp") return Regime::gradient_penalty;
    if (name == "relaxed") return Regime::relaxed_sampling;
    throw std::invalid_argument("unknown simplex regime '" + name + "'");
}

namespace {

constexpr std::size_t kDims = 3; // barycentric coordinates of the 2-simplex
constexpr std::size_t kTrueVertex = 0;

using Tf = Tensor<float>;

struct Critic {
    ParamStore store;

    explicit Critic(std::size_t hidden, Rng rng) {
        auto init = [&](std::size_t n, std::size_t fan_in, Rng r) {
            std::vector<float> v(n);
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            for (auto& x : v) x = static_cast<float>((2.0 * r.uniform() - 1.0) * bound);
            return v;
        };
        store.add("w1", Shape{kDims, hidden}, init(kDims * hidden, kDims, rng.fork(1)));
        store.add("b1", Shape{1, hidden}, std::vector<float>(hidden, 0.0f));
        store.add("w2", Shape{hidden, hidden}, init(hidden * hidden, hidden, rng.fork(2)));
        store.add("b2", Shape{1, hidden}, std::vector<float>(hidden, 0.0f));
        store.add("w3", Shape{hidden, 1}, init(hidden, hidden, rng.fork(3)));
        store.add("b3", Shape{1, 1}, std::vector<float>(1, 0.0f));
    }

    // rows [B,3] -> scores [B,1]
    static Tf forward(const BoundParams& p, const Tf& rows) {
        const Shape h1{rows.extent(0), p["b1"].extent(1)};
        Tf h = tanh(add(matmul(rows, p["w1"]), broadcast_to(p["b1"], h1)));
        h = tanh(add(matmul(h, p["w2"]), broadcast_to(p["b2"], h1)));
        return add(matmul(h, p["w3"]), broadcast_to(p["b3"], Shape{rows.extent(0), 1}));
    }
};

Tf batch_tensor(const std::vector<std::vector<double>>& rows) {
    std::vector<float> flat;
    flat.reserve(rows.size() * kDims);
    for (const auto& r : rows)
        for (double v : r) flat.push_back(static_cast<float>(v));
    return Tf(Shape{rows.size(), kDims}, std::move(flat));
}

// Overflow-safe softplus and sigmoid composites; the toy critic's logits
// saturate hard once the vertex is separated.
Tf softplus(const Tf& t) { return add(relu(t), log(add_const(exp(neg(abs(t))), 1.0f))); }
Tf sigmoid(const Tf& t) { return exp(neg(softplus(neg(t)))); }

// Critic output and its input-gradient norm at each query point.
std::vector<std::pair<double, double>> field_at(Critic& critic, ToyLoss loss,
                                                const std::vector<std::vector<double>>& points) {
    Tape<float> tape(TapeMode::higher_order);
    BoundParams bound(tape, critic.store);
    Tf x = tape.leaf(batch_tensor(points));
    Tf scores = Critic::forward(bound, x);
    if (loss == ToyLoss::log_likelihood) scores = sigmoid(scores);
    Tf grad = tape.gradients(sum_all(scores), {x}, false)[0];
    std::vector<std::pair<double, double>> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        double sq = 0;
        for (std::size_t j = 0; j < kDims; ++j) {
            const double g = grad.data()[i * kDims + j];
            sq += g * g;
        }
        out[i] = {scores.data()[i], std::sqrt(sq)};
    }
    return out;
}

} // namespace

ToyResult run_toy_experiment(const ToyOptions& opt) {
    Critic critic(opt.hidden, Rng(opt.seed).fork(10));
    AdamState<float> state;
    AdamHyper hyper{opt.lr, opt.beta1, opt.beta2, 1e-8};

    Rng data_rng = Rng(opt.seed).fork(20);
    std::vector<double> vertex(kDims, 0.0);
    vertex[kTrueVertex] = 1.0;

    for (std::int64_t s = 0; s < opt.steps; ++s) {
        std::vector<std::vector<double>> real_rows(opt.batch), fake_rows(opt.batch);
        for (auto& r : real_rows)
            r = opt.regime == Regime::relaxed_sampling
                    ? relaxed_vertex_sample(kTrueVertex, kDims, opt.eps_max, data_rng)
                    : vertex;
        for (auto& r : fake_rows) r = uniform_simplex_sample(kDims, data_rng);

        Tape<float> tape(TapeMode::higher_order);
        BoundParams bound(tape, critic.store);
        Tf real = batch_tensor(real_rows);
        Tf fake = batch_tensor(fake_rows);
        Tf d_loss;
        if (opt.loss == ToyLoss::least_squares) {
            d_loss = add(mean_all(square(add_const(Critic::forward(bound, real), -1.0f))),
                         mean_all(square(Critic::forward(bound, fake))));
        } else {
            // log-likelihood discrimination in logits (stable form)
            d_loss = add(mean_all(softplus(neg(Critic::forward(bound, real)))),
                         mean_all(softplus(Critic::forward(bound, fake))));
        }

        if (opt.regime == Regime::gradient_penalty) {
            std::vector<float> mix(opt.batch * kDims);
            for (std::size_t b = 0; b < opt.batch; ++b) {
                const double u = data_rng.uniform();
                for (std::size_t j = 0; j < kDims; ++j)
                    mix[b * kDims + j] = static_cast<float>(u * real_rows[b][j] +
                                                            (1.0 - u) * fake_rows[b][j]);
            }
            Tf xhat = tape.leaf(Tf(Shape{opt.batch, kDims}, std::move(mix)));
            Tf score = Critic::forward(bound, xhat);
            if (opt.loss == ToyLoss::log_likelihood) score = sigmoid(score);
            Tf grad = tape.gradients(sum_all(score), {xhat}, true)[0];
            Tf norms = sqrt(add_const(sum_keepdim(square(grad), 1), 1e-12f));
            Tf gp = mean_all(square(add_const(norms, -1.0f)));
            d_loss = add(d_loss, scale(gp, static_cast<float>(opt.alpha_gp)));
        }

        auto group = critic.store.group({""});
        std::vector<Tensor<float>> wrt;
        for (Param* p : group) wrt.push_back(bound[p->name]);
        const auto grads = tape.gradients(d_loss, wrt, false);
        std::vector<std::vector<float>*> values;
        std::vector<const std::vector<float>*> gvalues;
        for (std::size_t i = 0; i < group.size(); ++i) {
            values.push_back(&group[i]->value);
            gvalues.push_back(&grads[i].values());
        }
        adam_step<float>(values, gvalues, state, hyper);
    }

    // Barycentric lattice with resolution grid_res per side.
    ToyResult result;
    std::vector<std::vector<double>> points;
    const auto res = static_cast<double>(opt.grid_res);
    for (std::size_t i = 0; i <= opt.grid_res; ++i)
        for (std::size_t j = 0; i + j <= opt.grid_res; ++j) {
            const std::size_t k = opt.grid_res - i - j;
            points.push_back({static_cast<double>(i) / res, static_cast<double>(j) / res,
                              static_cast<double>(k) / res});
        }
    auto field = field_at(critic, opt.loss, points);
    result.grid.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        result.grid.push_back({points[i][0], points[i][1], points[i][2], field[i].first,
                               field[i].second});
        result.max_gradnorm = std::max(result.max_gradnorm, field[i].second);
    }

    const std::vector<double> barycenter{1.0 / 3, 1.0 / 3, 1.0 / 3};
    auto bc = field_at(critic, opt.loss, {barycenter});
    result.barycenter_d = bc[0].first;
    result.barycenter_gradnorm = bc[0].second;

    std::vector<std::vector<double>> segment;
    const std::size_t segment_points = 21;
    std::vector<double> v(kDims, 0.0);
    v[kTrueVertex] = 1.0;
    for (std::size_t i = 0; i < segment_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(segment_points - 1);
        std::vector<double> p(kDims);
        for (std::size_t j = 0; j < kDims; ++j) p[j] = (1.0 - t) * v[j] + t * barycenter[j];
        segment.push_back(std::move(p));
    }
    double seg_sum = 0;
    for (const auto& [d, g] : field_at(critic, opt.loss, segment)) {
        (void)d;
        seg_sum += g;
    }
    result.segment_mean_gradnorm = seg_sum / static_cast<double>(segment_points);
    return result;
}

void write_simplex_grid(const std::string& path, const ToyResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write simplex grid: " + path);
    out << "bary1,bary2,bary3,D,gradnorm\n";
    char buf[256];
    for (const auto& p : result.grid) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.9g,%.9g", p.b1, p.b2, p.b3, p.d,
                      p.gradnorm);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("short write on simplex grid: " + path);
}

std::vector<SimplexGridPoint> read_simplex_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open simplex grid: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "bary1,bary2,bary3,D,gradnorm")
        throw std::runtime_error("simplex grid has an unexpected header: " + path);
    std::vector<SimplexGridPoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SimplexGridPoint p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &p.b1, &p.b2, &p.b3, &p.d,
                        &p.gradnorm) != 5)
            throw std::runtime_error("simplex grid has a malformed row: " + path);
        out.push_back(p);
    }
    return out;
}

} // namespace cipherlab
