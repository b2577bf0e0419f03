#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "shieldperc/bounds_engine.hpp"

using namespace shieldperc;

namespace {

// Geometric-series reference for f(q): the rational term expanded as
// (1/d)(1-1/d) sum_{j>=1} d^{-j} q^{-(2d-1)j}.
double f_series_oracle(int d, double q, double p2, int terms) {
    double s = 0.0;
    for (int j = 1; j <= terms; ++j)
        s += std::pow(static_cast<double>(d), -j) *
             std::pow(q, -(2.0 * d - 1.0) * j);
    return (1.0 / d) * (1.0 - 1.0 / d) * s + p2 - 1.0 / (d * d);
}

// Reference for the closed-form MGF: (1-p2) * [geometric coincidence-run
// factor] * [excursion sum], both series truncated at relative error 1e-12.
double mgf_series_oracle(int d, double p, double p2) {
    const double q = 1.0 - p;
    double run = 0.0;
    for (int j = 0;; ++j) {
        const double term = (1.0 - 1.0 / d) * std::pow(static_cast<double>(d), -j) *
                            std::pow(q, -(2.0 * d - 1.0) * j);
        run += term;
        if (term < 1e-13 * run) break;
    }
    const double f = f_of_q(Dimension(d), q, p2);
    double exc = 0.0;
    for (int k = 1;; ++k) {
        const double term = std::pow(q, -k) * std::pow(f, k - 1);
        exc += term;
        if (term < 1e-13 * exc) break;
    }
    return (1.0 - p2) * run * exc;
}

}  // namespace

TEST_CASE("closed-form upper bound on the threshold", "[upper_bound]") {
    CHECK(upper_bound_pshield(Dimension(2)) == Catch::Approx(0.3066).margin(1e-3));
    CHECK(upper_bound_pshield(Dimension(3)) == Catch::Approx(0.2752).margin(1e-3));
    CHECK(upper_bound_pshield(Dimension(2), 1.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK_THROWS_AS(upper_bound_pshield(Dimension(2), 0.5), std::domain_error);
    for (int d = 3; d <= 18; ++d)
        CHECK(upper_bound_pshield(Dimension(d)) <
              upper_bound_pshield(Dimension(d - 1)));
}

TEST_CASE("f(q) formula", "[f_of_q]") {
    SECTION("matches the geometric-series expansion") {
        const double v = f_of_q(Dimension(10), 0.95, 0.11);
        CHECK(v == Catch::Approx(f_series_oracle(10, 0.95, 0.11, 64)).epsilon(1e-12));
    }
    SECTION("affine in p2 with unit slope") {
        const double a = f_of_q(Dimension(10), 0.95, 0.11);
        const double b = f_of_q(Dimension(10), 0.95, 0.61);
        CHECK(b - a == Catch::Approx(0.5).epsilon(1e-12));
    }
    SECTION("domain error when d q^{2d-1} <= 1") {
        CHECK_THROWS_AS(f_of_q(Dimension(4), 0.5, 0.5), std::domain_error);
    }
    SECTION("near the singular surface the value is huge but above p2 - 1/d^2") {
        const double q = std::pow((1.0 + 1e-9) / 4.0, 1.0 / 7.0);
        const double v = f_of_q(Dimension(4), q, 0.5);
        CHECK(v > 0.5 - 1.0 / 16.0);
        CHECK(v > 1e6);
    }
}

TEST_CASE("second-moment ratio bound", "[moment_ratio]") {
    const auto cb10 = collision_bounds(Dimension(10), 1e-18);
    SECTION("finite positive value at the reference point") {
        const auto m = moment_ratio_bound(Dimension(10), 0.05, cb10.p2_upper);
        CHECK(m.mgf > 0.0);
        CHECK(std::isfinite(m.mgf));
        CHECK(m.ratio >= m.mgf);
    }
    SECTION("agrees with the excursion-series evaluation") {
        for (double p : {0.0, 0.02, 0.05}) {
            const auto m = moment_ratio_bound(Dimension(10), p, cb10.p2_upper);
            CHECK(m.mgf ==
                  Catch::Approx(mgf_series_oracle(10, p, cb10.p2_upper)).epsilon(1e-11));
        }
    }
    SECTION("diverges as p2 approaches the f(q) < q boundary") {
        const double q = 0.95;
        const double fv = f_of_q(Dimension(10), q, 0.0);
        const double p2_crit = q - fv;  // p2 at which f(q) = q
        const double a = moment_ratio_bound(Dimension(10), 0.05, p2_crit - 0.1).mgf;
        const double b = moment_ratio_bound(Dimension(10), 0.05, p2_crit - 0.001).mgf;
        CHECK(b > 10.0 * a);
        CHECK_THROWS_AS(moment_ratio_bound(Dimension(10), 0.05, p2_crit + 0.001),
                        std::domain_error);
    }
    SECTION("precondition violations are reported") {
        const double p_bad = 1.0 - std::pow(0.9 / 10.0, 1.0 / 19.0);
        CHECK_THROWS_AS(moment_ratio_bound(Dimension(10), p_bad, 0.5),
                        std::domain_error);
        CHECK_THROWS_AS(moment_ratio_bound(Dimension(10), 0.05, 1.0),
                        std::domain_error);
    }
}

TEST_CASE("admissibility check", "[admissibility]") {
    SECTION("p = 0 boundary") {
        const auto c = admissibility_check(Dimension(12), 0.0, 0.4);
        CHECK(c.lhs1 == 0.0);
        CHECK(c.lhs2 == Catch::Approx(0.4).epsilon(1e-12));
        CHECK(c.pass);
    }
    SECTION("d < 4 rejected") {
        CHECK_THROWS_AS(admissibility_check(Dimension(3), 0.1, 0.5), std::domain_error);
    }
    SECTION("lhs2 reported as +inf beyond the singular surface") {
        const auto c = admissibility_check(Dimension(4), 0.9, 0.5);
        CHECK(std::isinf(c.lhs2));
        CHECK_FALSE(c.pass);
    }
}

TEST_CASE("admissibility table rows", "[table1]") {
    const auto rows = table1();
    REQUIRE(rows.size() == 10);
    // spot goldens (full 20-entry comparison lives in the acceptance gate)
    CHECK(rows[1].d == 10);
    CHECK(rows[1].lhs1 == Catch::Approx(0.8975950).margin(1e-6));
    CHECK(rows[1].lhs2 == Catch::Approx(0.943856).margin(1e-6));
    CHECK(rows[4].d == 13);
    CHECK(rows[4].lhs1 == Catch::Approx(0.7955493).margin(1e-6));
    CHECK(rows[4].lhs2 == Catch::Approx(0.443074).margin(1e-6));
    CHECK(rows[9].d == 18);
    CHECK(rows[9].lhs1 == Catch::Approx(0.7034060).margin(1e-3));
    CHECK(rows[9].lhs2 == Catch::Approx(0.235671).margin(1e-3));
    // the verdict flips between d = 9 and d = 10
    CHECK(rows[0].lhs2 > 1.0);
    CHECK_FALSE(rows[0].pass);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].lhs1 < 1.0);
        CHECK(rows[i].lhs2 < 1.0);
        CHECK(rows[i].pass);
    }
}

TEST_CASE("lower-bound solver", "[pshield_lower]") {
    SECTION("reference dimensions") {
        const auto c7 = collision_bounds_auto(Dimension(7));
        CHECK(pshield_lower_bound(Dimension(7), c7.p2_upper, 1e-5) ==
              Catch::Approx(0.0812421).margin(5e-4));
        const auto c9 = collision_bounds_auto(Dimension(9));
        CHECK(pshield_lower_bound(Dimension(9), c9.p2_upper, 1e-5) ==
              Catch::Approx(0.1037889).margin(5e-4));
    }
    SECTION("large margin forces a tiny admissible p") {
        const double p = pshield_lower_bound(Dimension(4), 5e-4, 0.999);
        CHECK(p >= 0.0);
        CHECK(p < 1e-3);
        CHECK(admissibility_check(Dimension(4), p, 5e-4).pass);
    }
    SECTION("empty admissible set") {
        CHECK_THROWS_AS(pshield_lower_bound(Dimension(4), 0.9, 0.999),
                        std::domain_error);
    }
    SECTION("certification at and just above the solution") {
        for (int d : {5, 7, 9}) {
            const auto cb = collision_bounds_auto(Dimension(d));
            double max_lhs = 0.0;
            const double p = pshield_lower_bound(Dimension(d), cb.p2_upper, 1e-5,
                                                 &max_lhs);
            CHECK(max_lhs <= 1.0 - 1e-5 + 1e-9);
            CHECK(admissibility_check(Dimension(d), p, cb.p2_upper).pass);
            const auto above = admissibility_check(Dimension(d), p + 1e-3, cb.p2_upper);
            CHECK(std::max(above.lhs1, above.lhs2) > 1.0 - 1e-5);
        }
    }
}

TEST_CASE("lower-bound table", "[table2]") {
    const auto rows = table2();
    REQUIRE(rows.size() == 5);
    const double printed[5] = {0.0206815, 0.0532370, 0.0812421, 0.0980804, 0.1037889};
    for (int i = 0; i < 5; ++i) {
        CHECK(rows[static_cast<std::size_t>(i)].d == 5 + i);
        CHECK(rows[static_cast<std::size_t>(i)].p_lower ==
              Catch::Approx(printed[i]).margin(5e-4));
        CHECK(rows[static_cast<std::size_t>(i)].max_lhs_at_p_lower < 1.0);
        CHECK(rows[static_cast<std::size_t>(i)].p_lower <=
              rows[static_cast<std::size_t>(i)].upper_bound);
    }
    CHECK_FALSE(rows[0].exceeds_pc);  // d = 5
    CHECK_FALSE(rows[1].exceeds_pc);  // d = 6
    CHECK(rows[2].exceeds_pc);        // d = 7
    CHECK(rows[3].exceeds_pc);
    CHECK(rows[4].exceeds_pc);

    CHECK_THROWS_AS(table2({{5, 0.118}}), std::domain_error);
}

TEST_CASE("ordering across dimensions", "[ordering]") {
    double prev_g = 1e300;
    for (int d = 5; d <= 18; ++d) {
        const auto cb = collision_bounds_auto(Dimension(d));
        CHECK(cb.g < prev_g);
        prev_g = cb.g;
    }
}

TEST_CASE("asymptote comparison", "[asymptotic]") {
    const double r10 = asymptotic_ratio(Dimension(10));
    const auto cb10 = collision_bounds_auto(Dimension(10));
    const double p10 = pshield_lower_bound(Dimension(10), cb10.p2_upper, 1e-5);
    CHECK(r10 == Catch::Approx(p10 * 20.0 / std::log(10.0)).epsilon(1e-12));
    CHECK(r10 < 1.0);
}
