#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "acae/matrix.hpp"
#include "acae/optim.hpp"
#include "acae/rng.hpp"

using namespace acae;

namespace {

// Naive triple-loop oracle, independent of the library kernels.
Matrix matvec_oracle(const Matrix& m, const Matrix& v) {
    Matrix out(m.rows, 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out.values[r] += m(r, c) * v.values[c];
    }
    return out;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix m(rows, cols);
    for (auto& x : m.values) x = 2.0 * rng.next_double() - 1.0;
    return m;
}

}  // namespace

TEST_CASE("matvec basics") {
    CHECK(matvec(Matrix::identity(3), Matrix::column({1, 2, 3})).values ==
          std::vector<double>{1, 2, 3});

    Matrix m(2, 2);
    m(0, 0) = 1; m(0, 1) = 2; m(1, 0) = 3; m(1, 1) = 4;
    CHECK(matvec(m, Matrix::column({1, 1})).values == std::vector<double>{3, 7});

    CHECK_THROWS_AS(matvec(m, Matrix::column({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("matvec and outer agree with loop oracles on random shapes") {
    RngStream rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 1 + rng.next_below(8);
        const std::size_t cols = 1 + rng.next_below(8);
        const Matrix m = random_matrix(rows, cols, rng);
        const Matrix v = random_matrix(cols, 1, rng);
        const Matrix got = matvec(m, v);
        const Matrix want = matvec_oracle(m, v);
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got.values[i] == doctest::Approx(want.values[i]).epsilon(1e-12));
        }

        const Matrix u = random_matrix(rows, 1, rng);
        const Matrix w = random_matrix(cols, 1, rng);
        const Matrix o = outer(u, w);
        REQUIRE(o.rows == rows);
        REQUIRE(o.cols == cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                CHECK(o(i, j) == doctest::Approx(u.values[i] * w.values[j]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("outer basics") {
    const Matrix a = outer(Matrix::column({1, 0}), Matrix::column({0, 1}));
    CHECK(a.values == std::vector<double>{0, 1, 0, 0});
    const Matrix b = outer(Matrix::column({2}), Matrix::column({3}));
    CHECK(b.values == std::vector<double>{6});
}

TEST_CASE("frobenius norm") {
    Matrix m(1, 2);
    m(0, 0) = 3; m(0, 1) = 4;
    CHECK(frobenius_norm(m) == doctest::Approx(5.0));
    CHECK(frobenius_norm(Matrix(3, 3)) == 0.0);

    RngStream rng(5);
    const Matrix r = random_matrix(6, 7, rng);
    double sum_sq = 0.0;
    for (double x : r.values) sum_sq += x * x;
    const double n = frobenius_norm(r);
    CHECK(n * n == doctest::Approx(sum_sq).epsilon(1e-12));
}

TEST_CASE("scale_to_norm") {
    Matrix m(1, 2);
    m(0, 0) = 3; m(0, 1) = 4;
    const Matrix unit = scale_to_norm(m, 1.0);
    CHECK(unit.values[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(unit.values[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(scale_to_norm(Matrix(2, 2), 5.0).values == std::vector<double>{0, 0, 0, 0});
    const Matrix ten = scale_to_norm(Matrix::column({3, 4}), 10.0);
    CHECK(ten.values[0] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(ten.values[1] == doctest::Approx(8.0).epsilon(1e-12));

    RngStream rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const double target = 10.0 * rng.next_double();
        const Matrix r = random_matrix(1 + rng.next_below(5), 1 + rng.next_below(5), rng);
        if (frobenius_norm(r) < kDegenerateNorm) continue;
        CHECK(frobenius_norm(scale_to_norm(r, target)) ==
              doctest::Approx(target).epsilon(1e-9));
    }
    CHECK_THROWS_AS(scale_to_norm(m, -1.0), std::invalid_argument);
}

TEST_CASE("bce_with_logits values and stability") {
    CHECK(bce_with_logits(1, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce_with_logits(0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // Far tail: analytic value is 50 + log1p(exp(-50)); no overflow allowed.
    const double far = bce_with_logits(1, -50.0);
    CHECK(std::isfinite(far));
    CHECK(far == doctest::Approx(50.0 + std::log1p(std::exp(-50.0))).epsilon(1e-12));

    CHECK(std::isfinite(bce_with_logits(0, 1e308)));
    CHECK(std::isfinite(bce_with_logits(1, -1e308)));

    // Agrees with the naive formula evaluated in extended precision; past
    // |z| ~ 20 the naive form cancels below the 1e-10 target and stops being
    // a usable oracle.
    RngStream rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const double z = 32.0 * rng.next_double() - 16.0;
        const double y = rng.next_below(2) ? 1.0 : 0.0;
        const long double s = 1.0L / (1.0L + std::exp(static_cast<long double>(-z)));
        const long double naive =
            -static_cast<long double>(y) * std::log(s) -
            (1.0L - static_cast<long double>(y)) * std::log(1.0L - s);
        const double stable = bce_with_logits(y, z);
        CHECK(stable >= 0.0);
        CHECK(stable == doctest::Approx(static_cast<double>(naive)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(bce_with_logits(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("gaussian_fill determinism and moments") {
    RngStream a(99), b(99);
    const Matrix m1 = gaussian_fill(20, 20, 0.5, a);
    const Matrix m2 = gaussian_fill(20, 20, 0.5, b);
    CHECK(m1.values == m2.values);

    RngStream z(1);
    CHECK(frobenius_norm(gaussian_fill(10, 10, 0.0, z)) == 0.0);

    // Sample mean of 1e6 unit-variance draws within 4 sigma / sqrt(n).
    RngStream big(123);
    const std::size_t n = 1'000'000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += big.next_gaussian();
    CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("rng stream is reproducible and next_below is in range") {
    RngStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RngStream c(7);
    for (int i = 0; i < 1000; ++i) {
        const double d = c.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        CHECK(c.next_below(10) < 10);
    }
}

TEST_CASE("adagrad_step") {
    SUBCASE("zero gradient leaves param and accumulator untouched") {
        Matrix p = Matrix::column({1, 2});
        Matrix g(2, 1);
        Matrix acc = Matrix::column({0.5, 0.25});
        adagrad_step(p, g, acc, 0.1, 0.0);
        CHECK(p.values == std::vector<double>{1, 2});
        CHECK(acc.values == std::vector<double>{0.5, 0.25});
    }

    SUBCASE("first step with near-zero damping moves by ~rate*sign(grad)") {
        Matrix p = Matrix::column({0, 0});
        Matrix g = Matrix::column({3.0, -0.2});
        Matrix acc(2, 1);
        adagrad_step(p, g, acc, 0.1, 1e-12);
        CHECK(p.values[0] == doctest::Approx(-0.1).epsilon(1e-9));
        CHECK(p.values[1] == doctest::Approx(0.1).epsilon(1e-9));
    }

    SUBCASE("constant gradient yields strictly shrinking steps") {
        Matrix p = Matrix::column({0});
        const Matrix g = Matrix::column({2.0});
        Matrix acc(1, 1);
        double prev = p.values[0];
        double prev_step = 1e18;
        for (int i = 0; i < 10; ++i) {
            adagrad_step(p, g, acc, 0.1, 1e-8);
            const double step = std::fabs(p.values[0] - prev);
            CHECK(step < prev_step);
            prev_step = step;
            prev = p.values[0];
        }
    }

    SUBCASE("shape mismatch is fatal") {
        Matrix p(2, 1), g(3, 1), acc(2, 1);
        CHECK_THROWS_AS(adagrad_step(p, g, acc, 0.1, 1e-8), std::invalid_argument);
    }
}
