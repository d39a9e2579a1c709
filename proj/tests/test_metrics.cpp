#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <mortcast/metrics.hpp>

using namespace mortcast;

TEST_CASE("rmse") {
    Vector a(2);
    a << 0.0, 0.0;
    Vector p(2);
    p << 1.0, 1.0;
    CHECK(rmse(a, a) == doctest::Approx(0.0));
    // Printed form: sqrt(2/1).
    CHECK(rmse(a, p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rmse(a, p, MetricDenominator::count) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(static_cast<void>(rmse(a, Vector::Zero(3))), std::invalid_argument);
}

TEST_CASE("rmse is invariant under pair permutation") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    Vector a(18);
    Vector p(18);
    for (Index i = 0; i < 18; ++i) {
        a[i] = noise(rng);
        p[i] = noise(rng);
    }
    const double reference = rmse(a, p);
    std::vector<Index> order(18);
    for (Index i = 0; i < 18; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Vector a2(18);
    Vector p2(18);
    for (Index i = 0; i < 18; ++i) {
        a2[i] = a[order[static_cast<std::size_t>(i)]];
        p2[i] = p[order[static_cast<std::size_t>(i)]];
    }
    CHECK(rmse(a2, p2) == doctest::Approx(reference).epsilon(1e-14));
}

namespace {

struct CoverageFixture {
    Vector actual{18};
    Vector lower{18};
    Vector upper{18};

    CoverageFixture(int inside) {
        for (Index i = 0; i < 18; ++i) {
            actual[i] = static_cast<double>(i);
            if (i < inside) {
                lower[i] = actual[i] - 1.0;
                upper[i] = actual[i] + 1.0;
            } else {
                lower[i] = actual[i] + 1.0;
                upper[i] = actual[i] + 3.0;
            }
        }
    }
};

} // namespace

TEST_CASE("picp") {
    const CoverageFixture all(18);
    CHECK(picp(all.actual, all.lower, all.upper) == doctest::Approx(1.0));
    // Literal s-1 denominator pushes full coverage above one.
    CHECK(picp(all.actual, all.lower, all.upper, MetricDenominator::count_minus_one) ==
          doctest::Approx(18.0 / 17.0).epsilon(1e-12));

    const CoverageFixture none(0);
    CHECK(picp(none.actual, none.lower, none.upper) == doctest::Approx(0.0));

    const CoverageFixture six(6);
    CHECK(picp(six.actual, six.lower, six.upper) == doctest::Approx(6.0 / 18.0).epsilon(1e-9));
    CHECK(std::abs(picp(six.actual, six.lower, six.upper) - 0.333) < 5e-4);
}

TEST_CASE("picp rejects inverted bounds") {
    Vector a = Vector::Zero(3);
    Vector lo = Vector::Constant(3, 1.0);
    Vector hi = Vector::Constant(3, -1.0);
    CHECK_THROWS_AS(static_cast<void>(picp(a, lo, hi)), std::invalid_argument);
}

TEST_CASE("picp is monotone under interval widening") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 1.0);
    Vector a(20);
    Vector lo(20);
    Vector hi(20);
    for (Index i = 0; i < 20; ++i) {
        a[i] = noise(rng);
        lo[i] = a[i] + noise(rng) - 0.5;
        hi[i] = lo[i] + std::abs(noise(rng));
    }
    const double narrow = picp(a, lo, hi);
    const Vector wider_lo = lo.array() - 0.5;
    const Vector wider_hi = hi.array() + 0.5;
    CHECK(picp(a, wider_lo, wider_hi) >= narrow);
}

TEST_CASE("mpiw") {
    Vector lo = Vector::Zero(18);
    Vector hi = Vector::Constant(18, 2.0);
    CHECK(mpiw(lo, lo) == doctest::Approx(0.0));
    CHECK(mpiw(lo, hi) == doctest::Approx(2.0));
    CHECK(mpiw(lo, hi, MetricDenominator::count_minus_one) == doctest::Approx(36.0 / 17.0).epsilon(1e-9));
}

TEST_CASE("denominator strings") {
    CHECK(metric_denominator_from_string("s") == MetricDenominator::count);
    CHECK(metric_denominator_from_string("s_minus_1") == MetricDenominator::count_minus_one);
    CHECK_THROWS_AS(static_cast<void>(metric_denominator_from_string("n")), std::invalid_argument);
}
