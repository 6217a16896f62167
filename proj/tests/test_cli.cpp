#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "nn2poly/dataset.hpp"
#include "nn2poly/network.hpp"

using namespace nn2poly;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "nn2poly_test_cli";
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string read(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double field(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + ": ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 2));
}

const std::string toy_poly = R"({"p":5,"max_order":2,"labels":[[0],[1],[2,3],[4]],"values":[[2],[-2],[5],[3]]})";

}  // namespace

TEST_CASE("generate") {
    const auto dir = scratch();
    write(dir / "poly.json", toy_poly);
    auto r = call({"generate", "--poly", (dir / "poly.json").string(), "--n", "500", "--noise", "0.05", "--seed", "1",
                   "--out", (dir / "d.csv").string(), "--scale", "--split"});
    REQUIRE(r.code == 0);
    const auto data = read_csv(dir / "d.csv");
    CHECK(data.rows() == 500);
    CHECK(data.x.cols() == 5);
    for (double v : data.x.flat()) CHECK(std::abs(v) <= 1.0 + 1e-12);
    CHECK(read_csv(dir / "d_train.csv").rows() == 375);
    CHECK(read_csv(dir / "d_test.csv").rows() == 125);

    r = call({"generate", "--poly", (dir / "poly.json").string(), "--n", "0", "--seed", "1", "--out", (dir / "z.csv").string()});
    CHECK(r.code == cli::validation_error);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(dir / "z.csv"));
    r = call({"generate", "--n", "5", "--seed", "1", "--out", (dir / "z.csv").string()});
    CHECK(r.code == cli::validation_error);
    r = call({"generate", "--blobs", "3", "--features", "2", "--n", "30", "--seed", "1", "--out", (dir / "b.csv").string()});
    CHECK(r.code == 0);
    CHECK(class_labels(read_csv(dir / "b.csv").y).size() == 30);
}

TEST_CASE("train, extract, predict, compare, report, inspect") {
    const auto dir = scratch();
    write(dir / "poly.json", toy_poly);
    REQUIRE(call({"generate", "--poly", (dir / "poly.json").string(), "--n", "200", "--noise", "0.05", "--seed", "3",
                  "--out", (dir / "g.csv").string(), "--scale", "--split"})
                .code == 0);
    auto r = call({"train", "--data", (dir / "g_train.csv").string(), "--arch", "8:tanh,8:tanh,1:linear", "--epochs", "5",
                   "--batch-size", "25", "--lr", "0.01", "--seed", "2", "--validation-split", "0.2", "--out",
                   (dir / "net.json").string(), "--history", (dir / "h.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(read(dir / "h.csv").find("NA") == std::string::npos);

    r = call({"inspect", "--network", (dir / "net.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("input_dim: 5") != std::string::npos);
    CHECK(r.out.find("layer 1: tanh 6x8") != std::string::npos);
    CHECK(r.out.find("layer 2: tanh 9x8 max_l1_norm=") != std::string::npos);

    r = call({"extract", "--network", (dir / "net.json").string(), "--out", (dir / "p.json").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("terms: 56") != std::string::npos);
    CHECK(r.out.find("1=6 2=15 3=35") != std::string::npos);

    r = call({"extract", "--network", (dir / "net.json").string(), "--keep-layers", "--taylor-order", "3,3", "--out",
              (dir / "layers.json").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("layer entries: 3 + final") != std::string::npos);
    r = call({"extract", "--network", (dir / "net.json").string(), "--taylor-order", "3,3,3", "--out",
              (dir / "x.json").string()});
    CHECK(r.code == cli::validation_error);

    r = call({"compare", "--network", (dir / "net.json").string(), "--poly", (dir / "layers.json").string(), "--data",
              (dir / "g_test.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "n_test") == 50);
    CHECK(field(r.out, "r_squared") <= 1.0);

    r = call({"compare", "--poly", (dir / "p.json").string(), "--data", (dir / "g_test.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "max_abs_diff") == 0.0);

    r = call({"predict", "--poly", (dir / "p.json").string(), "--data", (dir / "g_test.csv").string(), "--out",
              (dir / "pred.csv").string()});
    REQUIRE(r.code == 0);
    const auto pred = read_csv(dir / "pred.csv", 0);
    CHECK(pred.x.rows() == 50);
    CHECK(pred.x.cols() == 1);

    r = call({"report", "--poly", (dir / "p.json").string(), "--n", "4", "--csv", (dir / "rep.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(read(dir / "rep.csv").find("channel,rank,term,value,sign") == 0);
    const auto rep = read(dir / "rep.csv");
    CHECK(std::count(rep.begin(), rep.end(), '\n') == 5);
}

TEST_CASE("predict on an intercept-only polynomial") {
    const auto dir = scratch();
    write(dir / "c.json", R"({"p":2,"labels":[[0]],"values":[[1.5]]})");
    write(dir / "x.csv", "a,b\n1,2\n-3,4\n0,0\n");
    REQUIRE(call({"predict", "--poly", (dir / "c.json").string(), "--data", (dir / "x.csv").string(), "--out",
                  (dir / "o.csv").string()})
                .code == 0);
    const auto o = read_csv(dir / "o.csv", 0);
    for (double v : o.x.flat()) CHECK(v == 1.5);
    auto r = call({"report", "--poly", (dir / "c.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("x1") == std::string::npos);
}

TEST_CASE("softmax_argmax postprocessing") {
    const auto dir = scratch();
    // Three channels: logits x1, x2, -x1 - x2.
    write(dir / "k.json", R"({"p":2,"labels":[[0],[1],[2]],"values":[[0,0,0],[1,0,-1],[0,1,-1]]})");
    write(dir / "k2.json", R"({"p":2,"labels":[[0],[1],[2]],"values":[[7,7,7],[1,0,-1],[0,1,-1]]})");
    write(dir / "x.csv", "a,b\n2,1\n1,2\n-2,-2\n0.5,0.1\n");
    for (const auto* name : {"k.json", "k2.json"}) {
        REQUIRE(call({"predict", "--poly", (dir / name).string(), "--data", (dir / "x.csv").string(), "--postprocess",
                      "softmax_argmax", "--out", (dir / "cls.csv").string()})
                    .code == 0);
        const auto cls = read_csv(dir / "cls.csv", 0);
        CHECK(read(dir / "cls.csv").find("class") == 0);
        CHECK(cls.x(0, 0) == 0);
        CHECK(cls.x(1, 0) == 1);
        CHECK(cls.x(2, 0) == 2);
        CHECK(cls.x(3, 0) == 0);
    }
    REQUIRE(call({"predict", "--poly", (dir / "k.json").string(), "--data", (dir / "x.csv").string(), "--out",
                  (dir / "raw.csv").string()})
                .code == 0);
    const auto raw = read_csv(dir / "raw.csv", 0).x;
    const auto cls = cli::softmax_argmax(raw);
    CHECK(cls == std::vector<int>{0, 1, 2, 0});
    CHECK(call({"predict", "--poly", (dir / "k.json").string(), "--data", (dir / "x.csv").string(), "--postprocess",
                "bogus", "--out", (dir / "cls.csv").string()})
              .code == cli::validation_error);
}

TEST_CASE("exit codes") {
    const auto dir = scratch();
    CHECK(call({}).code == cli::validation_error);
    CHECK(call({"nonsense"}).code == cli::validation_error);
    CHECK(call({"inspect", "--network", (dir / "missing.json").string()}).code == cli::validation_error);
    write(dir / "relu.json", R"({"layers":[{"activation":"relu","weights":[[0],[1]]}]})");
    auto r = call({"inspect", "--network", (dir / "relu.json").string()});
    CHECK(r.code == cli::validation_error);
    CHECK(r.err.find("ReLU") != std::string::npos);

    write(dir / "nan.csv", "a,y\n1,2\nnan,3\n1,1\n2,2\n");
    r = call({"train", "--data", (dir / "nan.csv").string(), "--arch", "2:tanh,1:linear", "--batch-size", "2", "--seed",
              "1", "--out", (dir / "n.json").string()});
    CHECK(r.code == cli::numeric_error);
    CHECK_FALSE(fs::exists(dir / "n.json"));

    write(dir / "wide.json", R"({"layers":[{"activation":"tanh","weights":[[0],[1],[1],[1],[1],[1],[1],[1],[1]]},)"
                             R"({"activation":"linear","weights":[[0],[1]]}]})");
    r = call({"extract", "--network", (dir / "wide.json").string(), "--max-order", "14", "--out",
              (dir / "w.json").string()});
    CHECK(r.code == cli::resource_error);
    fs::remove_all(dir);
}
