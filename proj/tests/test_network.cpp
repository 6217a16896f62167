#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "nn2poly/errors.hpp"
#include "nn2poly/network.hpp"

using namespace nn2poly;

namespace {

NetworkSpec toy_network() {
    return NetworkSpec({
        {Activation::tanh, [] { Matrix w(6, 2, 1.0); w(0, 0) = w(0, 1) = 0.0; return w; }()},
        {Activation::sigmoid, [] { Matrix w(3, 3, 1.0); for (std::size_t c = 0; c < 3; ++c) w(0, c) = 0.0; return w; }()},
        {Activation::linear, Matrix{{0.0}, {1.0}, {1.0}, {1.0}}},
    });
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("nn2poly_test_network_" + name);
}

}  // namespace

TEST_CASE("toy network shapes and forward at zero") {
    const auto net = toy_network();
    CHECK(net.layers()[0].weights.rows() == 6);
    CHECK(net.layers()[0].weights.cols() == 2);
    CHECK(net.layers()[1].weights.rows() == 3);
    CHECK(net.layers()[2].weights.rows() == 4);
    CHECK(net.input_dim() == 5);
    CHECK(net.output_dim() == 1);
    const auto y = forward(net, Matrix(1, 5, 0.0));
    CHECK(y(0, 0) == doctest::Approx(1.5));
    CHECK(forward(net, Matrix(0, 5)).rows() == 0);
    CHECK_THROWS_AS(forward(net, Matrix(1, 4)), ValidationError);
}

TEST_CASE("identity-like linear layer selects columns") {
    Matrix w(4, 2, 0.0);
    w(1, 0) = 1.0;  // x1 -> out1
    w(3, 1) = 1.0;  // x3 -> out2
    const NetworkSpec net({{Activation::linear, w}});
    const Matrix x{{1.0, 2.0, 3.0}, {-4.0, 5.0, 6.0}};
    const auto y = forward(net, x);
    CHECK(y(0, 0) == 1.0);
    CHECK(y(0, 1) == 3.0);
    CHECK(y(1, 0) == -4.0);
    CHECK(y(1, 1) == 6.0);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(NetworkSpec(std::vector<Layer>{}), ValidationError);
    try {
        NetworkSpec({{Activation::tanh, Matrix(6, 2)}, {Activation::linear, Matrix(4, 3)}});
        FAIL("chain mismatch accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("2 != 3") != std::string::npos);
    }
    Matrix bad(3, 1);
    bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(NetworkSpec({{Activation::linear, bad}}), ValidationError);

    auto j = to_json(toy_network());
    j["layers"][1]["activation"] = "relu";
    try {
        network_from_json(j);
        FAIL("relu accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("relu") != std::string::npos);
    }
}

TEST_CASE("randomly corrupted specs are rejected") {
    std::mt19937_64 rng(11);
    const auto base = to_json(toy_network());
    for (int trial = 0; trial < 100; ++trial) {
        auto j = base;
        const std::size_t layer = rng() % 3;
        const auto kind = rng() % 3;
        auto& w = j["layers"][layer]["weights"];
        switch (kind) {
            case 0: w.erase(w.size() - 1); break;   // drop an input row
            case 1:
                for (auto& row : w) row.push_back(0.5);  // add a column
                break;
            default: w.push_back(w[0]); break;  // add an input row
        }
        // Row changes on the first layer only change p, and extra output
        // columns are fine; everything else breaks a chain link.
        const bool still_valid = (layer == 0 && kind != 1) || (layer == 2 && kind == 1);
        if (still_valid) {
            CHECK_NOTHROW(network_from_json(j));
            continue;
        }
        CHECK_THROWS_AS(network_from_json(j), ValidationError);
    }
}

TEST_CASE("save/load round trip is bit-exact") {
    const auto path = temp_path("toy.json");
    save_network(toy_network(), path);
    CHECK(load_network(path) == toy_network());

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Matrix w1(4, 3), w2(4, 2);
    for (double& v : w1.flat()) v = nd(rng) / 3.0;
    for (double& v : w2.flat()) v = std::sqrt(2.0) * nd(rng) * 1e-7;
    const NetworkSpec net({{Activation::softplus, w1}, {Activation::linear, w2}});
    save_network(net, path);
    const auto back = load_network(path);
    CHECK(back == net);
    std::filesystem::remove(path);

    CHECK_THROWS(save_network(net, "/nonexistent-dir/x/net.json"));
    CHECK_THROWS_AS(load_network("/nonexistent-dir/none.json"), ValidationError);
}

TEST_CASE("all-linear forward equals the composed affine map") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ud(-1, 1);
    Matrix a(4, 3), b(4, 2);
    for (double& v : a.flat()) v = ud(rng);
    for (double& v : b.flat()) v = ud(rng);
    const NetworkSpec net({{Activation::linear, a}, {Activation::linear, b}});
    Matrix x(5, 3);
    for (double& v : x.flat()) v = ud(rng);
    const auto y = forward(net, x);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            double expect = b(0, k);
            for (std::size_t j = 0; j < 3; ++j) {
                double h = a(0, j);
                for (std::size_t t = 0; t < 3; ++t) h += x(i, t) * a(t + 1, j);
                expect += h * b(j + 1, k);
            }
            CHECK(y(i, k) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("column norms") {
    const Matrix w{{3.0, 1.0}, {-4.0, 1.0}};
    CHECK(column_norms(w, 1) == std::vector<double>{7.0, 2.0});
    CHECK(column_norms(w, 2)[0] == doctest::Approx(5.0));
}
