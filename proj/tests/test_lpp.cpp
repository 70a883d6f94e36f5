#include "lppd/lpp.hpp"
#include "lppd/mass_field.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace lppd;
using lppd::test::Grid;

namespace {

Grid two_by_two() {
    Grid g(Region{0, 0, 1, 1});
    g.at(1, 0) = 2.0;
    g.at(0, 1) = 3.0;
    g.at(1, 1) = 1.0;
    g.at(0, 0) = 100.0;  // start-exclusive: never counted
    return g;
}

} // namespace

TEST_CASE("last passage small examples") {
    const Grid g = two_by_two();
    CHECK(last_passage(g, {0, 0}, {1, 1}) == 4.0);
    CHECK(last_passage(g, {0, 0}, {0, 0}) == 0.0);
    CHECK(last_passage(g, {1, 1}, {1, 1}) == 0.0);
    CHECK(last_passage(g, {0, 0}, {1, 0}) == 2.0);

    const LatticePath p = geodesic(g, {0, 0}, {1, 1});
    REQUIRE(p.size() == 3);
    CHECK(p.points[0] == Point{0, 0});
    CHECK(p.points[1] == Point{0, 1});
    CHECK(p.points[2] == Point{1, 1});
    CHECK(p.is_valid());

    const LatticePath single = geodesic(g, {1, 0}, {1, 0});
    CHECK(single.size() == 1);

    const Environment env = gen_interior(Region{0, 0, 10, 10}, 3);
    CHECK(last_passage(env, {2, 4}, {4, 4}) == env.weight(3, 4) + env.weight(4, 4));
    const LatticePath row = geodesic(env, {2, 4}, {6, 4});
    CHECK(row.size() == 5);
    for (std::size_t k = 0; k < row.size(); ++k) CHECK(row.points[k] == Point{2 + static_cast<Coord>(k), 4});
}

TEST_CASE("last passage domain errors") {
    const Environment env = gen_interior(Region{0, 0, 10, 10}, 3);
    CHECK_THROWS_AS(last_passage(env, {3, 3}, {2, 5}), DomainError);
    CHECK_THROWS_AS(last_passage(env, {0, 0}, {11, 3}), DomainError);
    CHECK_THROWS_AS(geodesic(env, {0, 0}, {3, 11}), DomainError);
    CHECK_THROWS_AS(lbar(env, {2, 2}), DomainError);
}

TEST_CASE("sweep agrees with exhaustive enumeration") {
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<int> side(1, 6);
    for (int t = 0; t < 100; ++t) {
        const int w = side(gen), h = side(gen);
        const Grid g = lppd::test::random_grid(Region{-2, 5, -2 + w - 1, 5 + h - 1}, gen);
        const Point a = g.region.lower(), b = g.region.upper();
        const double brute = lppd::test::brute_force_last_passage(g, a, b);
        CHECK(lppd::test::relative_error(last_passage(g, a, b), brute) <= 1e-9);
    }
}

TEST_CASE("field, geodesic and path weight are consistent") {
    std::mt19937_64 gen(7);
    for (int t = 0; t < 20; ++t) {
        const Grid g = lppd::test::random_grid(Region{0, 0, 30, 17}, gen);
        const Point a{3, 2}, b{30, 17};
        const Eigen::ArrayXXd f = last_passage_field(g, a, b);
        const Eigen::ArrayXXd ref = lppd::test::dp_field(g, a, b);
        CHECK(((f - ref).abs() <= 1e-9 * ref.abs().max(1.0)).all());
        const LatticePath p = geodesic(g, a, b);
        CHECK(p.is_valid());
        CHECK(p.front() == a);
        CHECK(p.back() == b);
        // Same summation order: bit-identical.
        CHECK(path_weight(g, p) == last_passage(g, a, b));
    }
}

TEST_CASE("superadditivity") {
    const WeightLattice lat(55, EnvironmentKind::interior);
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> d(0, 20);
    for (int t = 0; t < 200; ++t) {
        const Point x{d(gen), d(gen)};
        const Point z = x + Point{d(gen), d(gen)};
        const Point y = z + Point{d(gen), d(gen)};
        CHECK(last_passage(lat, x, y) >= last_passage(lat, x, z) + last_passage(lat, z, y) - 1e-9);
    }
}

TEST_CASE("lbar examples") {
    const Environment b = gen_boundary(Region{0, 0, 8, 8}, 17);
    CHECK(lbar(b, {0, 0}) == 0.0);
    CHECK(lbar(b, {1, 0}) == b.weight(1, 0));
    CHECK(lbar(b, {0, 3}) == b.weight(0, 1) + b.weight(0, 2) + b.weight(0, 3));
}

TEST_CASE("exit point examples") {
    Grid g(Region{0, 0, 1, 1}, EnvironmentKind::boundary);
    g.at(1, 0) = 5.0;
    g.at(0, 1) = 1.0;
    g.at(1, 1) = 0.7;
    CHECK(exit_point(g, {1, 1}).value() == 1);
    CHECK(variational_exit(g, {1, 1}).value() == 1);
    g.at(1, 0) = 1.0;
    g.at(0, 1) = 5.0;
    CHECK(exit_point(g, {1, 1}).value() == -1);
    CHECK(variational_exit(g, {1, 1}).value() == -1);

    const Environment b = gen_boundary(Region{0, 0, 4, 4}, 1);
    CHECK_THROWS_AS(exit_point(b, {0, 3}), DomainError);
    const Environment i = gen_interior(Region{0, 0, 4, 4}, 1);
    CHECK_THROWS_AS(exit_point(i, {2, 2}), DomainError);
}

TEST_CASE("exit point equals the variational argmax") {
    std::mt19937_64 gen(2024);
    for (int t = 0; t < 100; ++t) {
        const Grid g = lppd::test::random_boundary_grid(15, gen);
        for (const Point x : {Point{15, 15}, Point{7, 15}, Point{15, 3}, Point{1, 9}}) {
            const Coord z = exit_point(g, x).value();
            CHECK(z == variational_exit(g, x).value());
            CHECK(z == lppd::test::variational_exit_oracle(g, x));
        }
    }
}

TEST_CASE("variational terms") {
    const Environment b = gen_boundary(Region{0, 0, 20, 20}, 31);
    const Point x{20, 14};
    const Eigen::ArrayXd terms = variational_terms(b, x);
    REQUIRE(terms.size() == 35);
    CHECK(terms.maxCoeff() == doctest::Approx(lbar(b, x)).epsilon(1e-12));
    // The z = 0 term is dominated by one of z = +-1.
    CHECK(terms(x.y) <= std::max(terms(x.y - 1), terms(x.y + 1)));
    CHECK(variational_term(b, x, -14) == terms(0));
    CHECK(variational_term(b, x, 20) == terms(34));
    CHECK_THROWS_AS(variational_term(b, x, 21), DomainError);
    CHECK_THROWS_AS(variational_term(b, x, -15), DomainError);

    // Boundary mass: cumulative axis sums with M(0) = 0.
    const Eigen::ArrayXd m = boundary_mass(b, -3, 2);
    CHECK(m(3) == 0.0);
    CHECK(m(5) == doctest::Approx(b.weight(1, 0) + b.weight(2, 0)));
    CHECK(m(0) == doctest::Approx(b.weight(0, 1) + b.weight(0, 2) + b.weight(0, 3)));
    CHECK_THROWS_AS(boundary_mass(b, 1, 3), DomainError);
}

TEST_CASE("exit profile matches exit_point and is monotone") {
    const WeightLattice lat(99, EnvironmentKind::boundary);
    for (Coord n : {1, 5, 32}) {
        const std::vector<Coord> prof = exit_profile(lat, n, 3 * n);
        for (Coord x = 1; x <= 3 * n; ++x) CHECK(prof[x - 1] == exit_point(lat, {x, n}).value());
        for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k] >= prof[k - 1]);
    }
    CHECK_THROWS_AS(exit_profile(lat, 0, 3), DomainError);
}

TEST_CASE("exit interval count against a dense scan") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const WeightLattice lat(seed, EnvironmentKind::boundary);
        const Coord n = 24, m = 5;
        const std::vector<Coord> dense = exit_profile(lat, n, 2000);
        REQUIRE(dense.back() > m);
        std::vector<Coord> seen;
        for (Coord z : dense)
            if (z >= -m && z <= m && std::find(seen.begin(), seen.end(), z) == seen.end()) seen.push_back(z);
        CHECK(exit_interval_count(lat, n, m, {4, 1 << 20}) == seen.size());
    }
    // Heavy vertical axis, then a heavy horizontal stretch: the exits jump
    // from -n straight past m, so the window [-m, m] is never hit.
    Grid g(Region{0, 0, 12, 3}, EnvironmentKind::boundary);
    for (Coord y = 1; y <= 3; ++y) g.at(0, y) = 50.0;
    for (Coord x = 1; x <= 12; ++x) g.at(x, 0) = x < 3 ? 0.01 : 100.0;
    for (Coord x = 1; x <= 12; ++x)
        for (Coord y = 1; y <= 3; ++y) g.at(x, y) = 1.0;
    const std::vector<Coord> prof = exit_profile(g, 3, 12);
    CHECK(prof.front() == -3);
    CHECK(prof.back() > 2);
    CHECK(count_in_window(prof, 2) == 0);
    CHECK_THROWS_AS(count_in_window({3, 2}, 5), DomainError);
}

TEST_CASE("mass field evolution") {
    const MassField f = iid_exponential_masses(0.5, 8, -200, 50);
    CHECK(f.mass(0, 3) + f.mass(3, 10) == doctest::Approx(f.mass(0, 10)));
    CHECK(f.mass(4, 4) == 0.0);
    CHECK_THROWS_AS(f.mass(5, 4), DomainError);
    CHECK_THROWS_AS(iid_exponential_masses(1.5, 8, 0, 5), DomainError);

    const MassEvolution zero = evolve_mass(f, 0, -10, 20, 3);
    CHECK((zero.field.masses == f.masses.segment(-9 + 200, 30)).all());

    // Brute force: Lbar(x,n) = max_z { M(z) + best path from (z,1) to (x,n) }.
    const Coord n = 6, a = 0, b = 12, K = 199;
    const MassEvolution ev = evolve_mass(f, n, a, b, 77, {K, 0});
    const WeightLattice lat(77, EnvironmentKind::interior);
    auto M = [&](Coord z) { return z >= 0 ? f.mass(0, z) : -f.mass(z, 0); };
    auto lbar_m = [&](Coord x) {
        double best = -1e300;
        for (Coord z = -K; z <= x; ++z) {
            Grid g(Region{z, 1, x, n});
            for (Coord yy = 1; yy <= n; ++yy)
                for (Coord xx = z; xx <= x; ++xx) g.at(xx, yy) = lat.weight(xx, yy);
            const double path = g.weight(z, 1) + lppd::test::dp_field(g, {z, 1}, {x, n})(x - z, n - 1);
            best = std::max(best, M(z) + path);
        }
        return best;
    };
    for (Coord x = a + 1; x <= b; ++x)
        CHECK(ev.field.site(x) == doctest::Approx(lbar_m(x) - lbar_m(x - 1)).epsilon(1e-9));
}
