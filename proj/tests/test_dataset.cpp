#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "nn2poly/errors.hpp"
#include "nn2poly/dataset.hpp"

using namespace nn2poly;

namespace {

Polynomial toy_poly() {
    return Polynomial(5, 2, {Monomial{}, Monomial{{1}}, Monomial{{2, 3}}, Monomial{{4}}}, Matrix{{2.0}, {-2.0}, {5.0}, {3.0}});
}

}  // namespace

TEST_CASE("gen_poly_data with a constant polynomial") {
    const Polynomial c(3, 1, {Monomial{}}, Matrix{{4.0}});
    const auto d = gen_poly_data(c, 50, 0.0, 1);
    CHECK(d.x.rows() == 50);
    CHECK(d.x.cols() == 3);
    for (std::size_t i = 0; i < 50; ++i) CHECK(d.y(i, 0) == 4.0);
    const auto one = gen_poly_data(toy_poly(), 1, 0.1, 1);
    CHECK(one.x.rows() == 1);
    CHECK(one.y.cols() == 1);
    CHECK_THROWS_AS(gen_poly_data(c, 0, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(gen_poly_data(c, 5, -1.0, 1), ValidationError);
}

TEST_CASE("gen_poly_data follows the polynomial and is seeded") {
    const auto poly = toy_poly();
    const auto d = gen_poly_data(poly, 2000, 0.0, 7);
    const auto expect = eval_poly(poly, d.x);
    for (std::size_t i = 0; i < d.rows(); ++i) CHECK(d.y(i, 0) == doctest::Approx(expect(i, 0)));
    CHECK(gen_poly_data(poly, 20, 0.1, 3).y == gen_poly_data(poly, 20, 0.1, 3).y);

    // x5 does not enter the polynomial: its sample covariance with y is small.
    double mean_y = 0.0, mean_x = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        mean_y += d.y(i, 0);
        mean_x += d.x(i, 4);
    }
    mean_y /= 2000.0;
    mean_x /= 2000.0;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        cov += (d.x(i, 4) - mean_x) * (d.y(i, 0) - mean_y);
        var += (d.x(i, 4) - mean_x) * (d.x(i, 4) - mean_x);
    }
    CHECK(std::abs(cov / var) < 0.5);
    double cov4 = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) cov4 += d.x(i, 3) * (d.y(i, 0) - mean_y);
    CHECK(cov4 / 2000.0 == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("scaling to [-1, 1]") {
    DatasetSpec d{Matrix{{0.0, 0.0}, {10.0, 5.0}}, Matrix{{1.0}, {3.0}}, std::nullopt, std::nullopt};
    const auto s = scale_to_unit(d);
    CHECK(s.x(0, 0) == -1.0);
    CHECK(s.x(1, 0) == 1.0);
    CHECK(s.y(0, 0) == -1.0);
    REQUIRE(s.x_scaling);
    CHECK(s.x_scaling->center[0] == 5.0);
    CHECK(s.x_scaling->scale[0] == 5.0);

    DatasetSpec three{Matrix{{0.0}, {5.0}, {10.0}}, Matrix{{1.0}, {2.0}, {3.0}}, std::nullopt, std::nullopt};
    const auto t = scale_to_unit(three, false);
    CHECK(t.x(1, 0) == 0.0);
    CHECK(t.y == three.y);
    CHECK_FALSE(t.y_scaling);

    DatasetSpec flat{Matrix{{1.0}, {1.0}}, Matrix{{1.0}, {2.0}}, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(scale_to_unit(flat), ValidationError);
}

TEST_CASE("train/test split") {
    const auto d = gen_poly_data(toy_poly(), 500, 0.05, 2);
    const auto s = train_test_split(d, 0.75, 9);
    CHECK(s.train.rows() == 375);
    CHECK(s.test.rows() == 125);
    const auto again = train_test_split(d, 0.75, 9);
    CHECK(again.train.x == s.train.x);
    const auto odd = train_test_split(gen_poly_data(toy_poly(), 7, 0.0, 1), 0.5, 1);
    CHECK(odd.train.rows() + odd.test.rows() == 7);
    CHECK_THROWS_AS(train_test_split(d, 1.5, 1), ValidationError);
}

TEST_CASE("blob data") {
    const auto d = gen_blob_data(90, 4, 3, 12);
    CHECK(d.x.rows() == 90);
    CHECK(d.x.cols() == 4);
    const auto labels = class_labels(d.y);
    for (int k = 0; k < 3; ++k) CHECK(std::count(labels.begin(), labels.end(), k) == 30);
    CHECK_THROWS_AS(class_labels(Matrix{{0.5}}), ValidationError);
    CHECK_THROWS_AS(class_labels(Matrix{{-1.0}}), ValidationError);
}

TEST_CASE("csv round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "nn2poly_test_dataset";
    std::filesystem::create_directories(dir);
    const auto d = gen_poly_data(toy_poly(), 25, 0.3, 4);
    write_csv(d, dir / "d.csv");
    const auto back = read_csv(dir / "d.csv");
    CHECK(back.x == d.x);
    CHECK(back.y == d.y);
    const auto all = read_csv(dir / "d.csv", 0);
    CHECK(all.x.cols() == 6);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv"), ValidationError);
    write_file_atomic(dir / "bad.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(dir / "bad.csv"), ValidationError);
    write_file_atomic(dir / "nan.csv", "a,b\n1,x\n");
    CHECK_THROWS_AS(read_csv(dir / "nan.csv"), ValidationError);
    std::filesystem::remove_all(dir);
}
