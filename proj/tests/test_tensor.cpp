#include "doctest.h"

#include "nn_ops.hpp"
#include "rng.hpp"
#include "tensor.hpp"

#include <cmath>

using namespace cipherlab;

using Tf = Tensor<float>;
using Td = Tensor<double>;

TEST_CASE("tensor construction enforces shape and finiteness") {
    CHECK_THROWS_AS(Tf(Shape{2, 2}, std::vector<float>{1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tf(Shape{2}, std::vector<float>{1.0f, INFINITY}), NumericError);
    CHECK_THROWS_AS(Tf(Shape{1}, std::vector<float>{NAN}), NumericError);
    Tf t(Shape{2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
    CHECK(t.size() == 6);
    CHECK(t.extent(1) == 3);
}

TEST_CASE("elementwise ops") {
    Tf a(Shape{3}, {1, -2, 3});
    Tf b(Shape{3}, {4, 5, -6});
    CHECK(add(a, b).values() == std::vector<float>{5, 3, -3});
    CHECK(sub(a, b).values() == std::vector<float>{-3, -7, 9});
    CHECK(mul(a, b).values() == std::vector<float>{4, -10, -18});
    CHECK(scale(a, 2.0f).values() == std::vector<float>{2, -4, 6});
    CHECK(relu(a).values() == std::vector<float>{1, 0, 3});
    CHECK(abs(a).values() == std::vector<float>{1, 2, 3});
    CHECK_THROWS_AS(add(a, Tf(Shape{2}, {1, 2})), ShapeError);
}

TEST_CASE("relu clamps negatives and keeps positives") {
    CHECK(relu(Tf::scalar(-1.5f)).item() == 0.0f);
    CHECK(relu(Tf::scalar(2.0f)).item() == 2.0f);
}

TEST_CASE("softmax of equal logits is uniform and rows sum to one") {
    Tf x(Shape{1, 3}, {0, 0, 0});
    auto s = softmax(x);
    for (float v : s.values()) CHECK(v == doctest::Approx(1.0f / 3.0f));

    Rng rng(7);
    std::vector<float> vals(8 * 5);
    for (auto& v : vals) v = static_cast<float>(rng.normal() * 3);
    auto sm = softmax(Tf(Shape{8, 5}, vals));
    for (std::size_t r = 0; r < 8; ++r) {
        double sum = 0;
        for (std::size_t c = 0; c < 5; ++c) {
            const float p = sm.data()[r * 5 + c];
            CHECK(p > 0.0f);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("l2 norm of a 3-4 pair is 5") {
    Td x(Shape{2}, {3, 4});
    CHECK(l2_norm_all(x).item() == doctest::Approx(5.0));
}

TEST_CASE("matmul against a hand-computed product") {
    Tf a(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
    Tf b(Shape{3, 2}, {7, 8, 9, 10, 11, 12});
    auto c = matmul(a, b);
    CHECK(c.shape() == Shape{2, 2});
    CHECK(c.values() == std::vector<float>{58, 64, 139, 154});
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("reshape, transpose, concat, slice round trips") {
    Tf a(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(transpose(a).values() == std::vector<float>{1, 4, 2, 5, 3, 6});
    CHECK(reshape(a, Shape{3, 2}).extent(0) == 3);
    CHECK_THROWS_AS(reshape(a, Shape{4}), ShapeError);

    Tf b(Shape{2, 2}, {9, 9, 9, 9});
    auto cat = concat(a, b, 1);
    CHECK(cat.shape() == Shape{2, 5});
    CHECK(slice(cat, 1, 0, 3).values() == a.values());
    CHECK(slice(cat, 1, 3, 2).values() == b.values());
    CHECK_THROWS_AS(concat(a, Tf(Shape{3, 3}, std::vector<float>(9, 0.f)), 1), ShapeError);
    CHECK_THROWS_AS(slice(a, 1, 2, 2), ShapeError);
    CHECK_THROWS_AS(sum_keepdim(a, 2), ShapeError);
}

TEST_CASE("gather and scatter rows") {
    Tf a(Shape{3, 2}, {1, 2, 3, 4, 5, 6});
    auto idx = std::make_shared<std::vector<std::size_t>>(std::vector<std::size_t>{2, 0, 2});
    auto g = gather_rows(a, idx);
    CHECK(g.values() == std::vector<float>{5, 6, 1, 2, 5, 6});
    auto s = scatter_rows(g, idx, 3);
    CHECK(s.values() == std::vector<float>{1, 2, 0, 0, 10, 12});
}

TEST_CASE("broadcast and reductions") {
    Tf a(Shape{1, 3}, {1, 2, 3});
    auto b = broadcast_to(a, Shape{2, 3});
    CHECK(b.values() == std::vector<float>{1, 2, 3, 1, 2, 3});
    CHECK(sum_all(b).item() == 12.0f);
    CHECK(sum_keepdim(b, 0).values() == std::vector<float>{2, 4, 6});
    CHECK(mean_all(b).item() == 2.0f);
}

TEST_CASE("layer norm behavior at the spec'd edge cases") {
    Tf gain1(Shape{3}, {1, 1, 1});
    Tf bias0(Shape{3}, {0, 0, 0});
    auto constant = layer_norm(Tf(Shape{1, 3}, {5, 5, 5}), gain1, bias0);
    for (float v : constant.values()) CHECK(v == doctest::Approx(0.0f));

    Tf gain2(Shape{2}, {1, 1});
    Tf bias2(Shape{2}, {0, 0});
    auto pm = layer_norm(Tf(Shape{1, 2}, {1, -1}), gain2, bias2);
    CHECK(pm.data()[0] == doctest::Approx(1.0f).epsilon(1e-3));
    CHECK(pm.data()[1] == doctest::Approx(-1.0f).epsilon(1e-3));

    Tf gain0(Shape{1}, {0.0f});
    Tf bias7(Shape{1}, {7.0f});
    auto b7 = layer_norm(Tf(Shape{2, 1}, {-3, 11}), gain0, bias7);
    CHECK(b7.values() == std::vector<float>{7, 7});
}

TEST_CASE("conv1d identity, box kernel, and stride-2 length") {
    // fs=1 identity kernel
    Tf x(Shape{3, 1}, {1, 2, 3});
    Tf w1(Shape{1, 1, 1}, {1.0f});
    Tf b0(Shape{1}, {0.0f});
    CHECK(conv1d(x, w1, b0, 1).values() == std::vector<float>{1, 2, 3});

    // fs=3 box kernel with zero padding
    Tf x2(Shape{3, 1}, {1, 0, 2});
    Tf w3(Shape{3, 1, 1}, {1, 1, 1});
    CHECK(conv1d(x2, w3, b0, 1).values() == std::vector<float>{1, 3, 2});

    // stride 2 on length 5 gives ceil(5/2) = 3
    Tf x5(Shape{5, 1}, {1, 2, 3, 4, 5});
    CHECK(conv1d(x5, w3, b0, 2).extent(0) == 3);

    CHECK_THROWS_AS(conv1d(x, Tf(Shape{2, 1, 1}, {1, 1}), b0, 1), ShapeError);
}

TEST_CASE("conv1d output length is ceil(n/stride) for all n in [1,64]") {
    Tf w(Shape{3, 1, 1}, {0.5f, 1.0f, 0.5f});
    Tf b0(Shape{1}, {0.0f});
    for (std::size_t stride : {std::size_t{1}, std::size_t{2}}) {
        for (std::size_t n = 1; n <= 64; ++n) {
            Tf x(Shape{n, 1}, std::vector<float>(n, 1.0f));
            CHECK(conv1d(x, w, b0, stride).extent(0) == (n + stride - 1) / stride);
        }
    }
}

TEST_CASE("dropout identity and survivor concentration") {
    Rng rng(3);
    Tf x = Tf::full(Shape{100, 100}, 1.0f);
    CHECK(dropout(x, 0.0, rng, true).values() == x.values());
    CHECK(dropout(x, 0.5, rng, false).values() == x.values());

    auto d = dropout(x, 0.5, rng, true);
    std::size_t survivors = 0;
    for (float v : d.values()) {
        if (v != 0.0f) {
            CHECK(v == doctest::Approx(2.0f));
            ++survivors;
        }
    }
    const double frac = static_cast<double>(survivors) / static_cast<double>(d.size());
    CHECK(frac > 0.4);
    CHECK(frac < 0.6);
    CHECK_THROWS_AS(dropout(x, 1.0, rng, true), ShapeError);
}

TEST_CASE("one_hot rows and argmax inverse") {
    auto oh = one_hot<float>({2, 0, 3}, 4);
    CHECK(oh.shape() == Shape{3, 4});
    CHECK(oh.values() == std::vector<float>{0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1});
    CHECK(argmax_rows(oh) == std::vector<std::int32_t>{2, 0, 3});
    CHECK_THROWS_AS(one_hot<float>({4}, 4), ShapeError);
}

TEST_CASE("embed equals table lookup for one-hot rows, exactly") {
    Rng rng(11);
    std::vector<float> wv(6 * 4);
    for (auto& v : wv) v = static_cast<float>(rng.normal());
    Tf table(Shape{6, 4}, wv);
    for (std::int32_t t = 0; t < 6; ++t) {
        auto row = embed(one_hot<float>({t}, 6), table);
        for (std::size_t e = 0; e < 4; ++e)
            CHECK(row.data()[e] == table.data()[static_cast<std::size_t>(t) * 4 + e]);
    }

    // uniform row -> mean of all table rows
    Tf uniform(Shape{1, 6}, std::vector<float>(6, 1.0f / 6.0f));
    auto mean_row = embed(uniform, table);
    for (std::size_t e = 0; e < 4; ++e) {
        double m = 0;
        for (std::size_t r = 0; r < 6; ++r) m += table.data()[r * 4 + e];
        CHECK(mean_row.data()[e] == doctest::Approx(m / 6.0).epsilon(1e-5));
    }
    CHECK_THROWS_AS(embed(Tf(Shape{1, 6}, {2, 0, 0, 0, 0, 0}), table), ShapeError);
}

TEST_CASE("convex combinations stay in the hull of embedding rows") {
    Rng rng(13);
    std::vector<float> wv(5 * 3);
    for (auto& v : wv) v = static_cast<float>(rng.normal());
    Tf table(Shape{5, 3}, wv);
    float hull_max = 0;
    for (float v : wv) hull_max = std::max(hull_max, std::abs(v));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<float> row(5);
        double sum = 0;
        for (auto& r : row) {
            r = static_cast<float>(rng.uniform());
            sum += r;
        }
        for (auto& r : row) r = static_cast<float>(r / sum);
        auto e = embed(Tf(Shape{1, 5}, row), table);
        for (float v : e.values()) CHECK(std::abs(v) <= hull_max + 1e-5f);
    }
}

TEST_CASE("sinusoidal signal at position zero is the sin/cos of zero") {
    auto sig = sinusoidal_signal<float>(4, 6);
    for (std::size_t k = 0; 2 * k < 6; ++k) {
        CHECK(sig.data()[2 * k] == doctest::Approx(0.0f));
        CHECK(sig.data()[2 * k + 1] == doctest::Approx(1.0f));
    }
    CHECK_THROWS_AS(sinusoidal_signal<float>(4, 5), ShapeError);
}

TEST_CASE("backward basics: linear and quadratic losses") {
    Tape<double> tape;
    Td w = tape.leaf(Td(Shape{3}, {1.0, -2.0, 0.5}));
    Td x(Shape{3}, {2.0, 3.0, -1.0});

    auto loss = sum_all(mul(w, x));
    auto g = tape.gradients(loss, {w});
    CHECK(g[0].values() == x.values());

    auto loss2 = sum_all(square(w));
    auto g2 = tape.gradients(loss2, {w});
    CHECK(g2[0].values() == std::vector<double>{2.0, -4.0, 1.0});
}

TEST_CASE("backward rejects non-scalar and detached losses") {
    Tape<double> tape;
    Td w = tape.leaf(Td(Shape{2}, {1.0, 2.0}));
    CHECK_THROWS_AS(tape.gradients(square(w), {w}), ShapeError);
    Td detached(Shape{1}, {3.0});
    CHECK_THROWS_AS(tape.gradients(detached, {w}), ShapeError);
}

TEST_CASE("gradients of unreachable parameters are zero") {
    Tape<double> tape;
    Td w = tape.leaf(Td(Shape{2}, {1.0, 2.0}));
    Td u = tape.leaf(Td(Shape{2}, {5.0, 6.0}));
    auto loss = sum_all(square(w));
    auto g = tape.gradients(loss, {w, u});
    CHECK(g[1].values() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("ops refuse operands from different tapes") {
    Tape<double> t1, t2;
    Td a = t1.leaf(Td::scalar(1.0));
    Td b = t2.leaf(Td::scalar(2.0));
    CHECK_THROWS_AS(add(a, b), ShapeError);
}
