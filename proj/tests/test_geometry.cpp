#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "nlheat/error.hpp"
#include "nlheat/geometry.hpp"

using namespace nlheat;
using std::numbers::pi;

TEST_CASE("boundary projection") {
    const auto iv = Domain::interval(0.0, 1.0);
    const auto p = iv.project({0.03, 0.0});
    CHECK(p.xbar.x == 0.0);
    CHECK(p.eta.x == -1.0);
    CHECK(p.dist == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(iv.project({0.9, 0.0}).eta.x == 1.0);

    const auto disk = Domain::disk({0.0, 0.0}, 1.0);
    const auto q = disk.project({0.9, 0.0});
    CHECK(q.xbar.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q.xbar.y == 0.0);
    CHECK(q.eta.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q.dist == doctest::Approx(0.1).epsilon(1e-14));
    CHECK_THROWS_AS(disk.project({0.0, 0.0}), ContractError);
}

TEST_CASE("projection invariants on random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.4, 1.4);
    const auto disk = Domain::disk({0.2, -0.1}, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const Point x{0.2 + U(rng), -0.1 + U(rng)};
        const double sd = disk.signed_distance(x);
        if (std::abs(sd) >= 1.0) continue;
        const auto p = disk.project(x);
        CHECK(std::abs(norm(p.xbar - x) - std::abs(sd)) < 1e-12);
        CHECK(std::abs(dot(p.eta, x - p.xbar) - sd) < 1e-12);
        CHECK(std::abs(norm(p.eta) - 1.0) < 1e-15);
        // Idempotence.
        const auto pp = disk.project(p.xbar);
        CHECK(pp.dist < 1e-12);
        CHECK(norm(pp.eta - p.eta) < 1e-12);
    }
    const auto iv = Domain::interval(-0.5, 1.5);
    std::uniform_real_distribution<double> V(-0.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const Point x{V(rng), 0.0};
        const double sd = iv.signed_distance(x);
        const auto p = iv.project(x);
        CHECK(norm(p.xbar - x) == std::abs(sd));
        CHECK(dot(p.eta, x - p.xbar) == sd);
        const auto pp = iv.project(p.xbar);
        CHECK(pp.dist == 0.0);
        CHECK(pp.eta.x == p.eta.x);
    }
}

TEST_CASE("signed distance is negative inside, positive outside and 1-Lipschitz") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const auto& dom : {Domain::interval(0.0, 1.0), Domain::disk({0.0, 0.0}, 1.0)}) {
        for (int t = 0; t < 300; ++t) {
            const Point x{U(rng), dom.dim() == 1 ? 0.0 : U(rng)};
            const Point y{U(rng), dom.dim() == 1 ? 0.0 : U(rng)};
            CHECK(std::abs(dom.signed_distance(x) - dom.signed_distance(y)) <=
                  norm(x - y) * (1.0 + 1e-14));
        }
        CHECK(dom.signed_distance({0.5, 0.0}) < 0.0);
        CHECK(dom.signed_distance({1.5, 0.0}) > 0.0);
        CHECK(dom.signed_distance({1.0, 0.0}) == 0.0);
    }
}

TEST_CASE("interval grid") {
    const auto g = build_grid(Domain::interval(0.0, 1.0), 0.125);
    REQUIRE(g.size() == 8);
    CHECK(g.nodes.front().x == 0.0625);
    const auto coarse = build_grid(Domain::interval(0.0, 1.0), 0.2);
    REQUIRE(coarse.size() == 5);
    CHECK(coarse.nodes[0].x == doctest::Approx(0.1));
    CHECK(coarse.nodes[4].x == doctest::Approx(0.9));
    for (double v : coarse.volumes) CHECK(v == 0.2);
    CHECK(coarse.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), 0.3), ContractError);
    CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), 0.0), ContractError);
}

TEST_CASE("interval grid with four cells") {
    const auto g = build_grid(Domain::interval(0.0, 1.0), 0.25);
    REQUIRE(g.size() == 4);
    const double expect[] = {0.125, 0.375, 0.625, 0.875};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(g.nodes[i].x == expect[i]);
        CHECK(g.volumes[i] == 0.25);
    }
    CHECK(g.total_volume() == 1.0);
}

TEST_CASE("disk grid volume") {
    const auto disk = Domain::disk({0.0, 0.0}, 1.0);
    const auto g = build_grid(disk, 0.02);
    // Brute-force area count: cells of side h whose centers lie in the unit disk.
    const double h = 0.02;
    long count = 0;
    for (int i = -60; i < 60; ++i) {
        for (int j = -60; j < 60; ++j) {
            const double x = (i + 0.5) * h, y = (j + 0.5) * h;
            if (x * x + y * y < 1.0) ++count;
        }
    }
    CHECK(g.size() == static_cast<std::size_t>(count));
    CHECK(std::abs(g.total_volume() - pi) < 0.15);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(disk.contains(g.nodes[i]));
    }
    // Row-major node order.
    for (std::size_t i = 1; i < g.size(); ++i) {
        const auto& a = g.cells[i - 1];
        const auto& b = g.cells[i];
        CHECK((a.iy < b.iy || (a.iy == b.iy && a.ix < b.ix)));
    }
}

TEST_CASE("disk grid volume error shrinks with h") {
    const auto disk = Domain::disk({0.0, 0.0}, 1.0);
    double prev = 1e9;
    for (double h : {0.04, 0.02, 0.01}) {
        const double err = std::abs(build_grid(disk, h).total_volume() - pi);
        CHECK(err <= 2.0 * h * disk.boundary_measure());
        prev = std::min(prev, err);
    }
    // O(h) bound holds at every level; cancellation can make individual errors smaller.
    CHECK(prev < 2.0 * 0.01 * 2.0 * pi);
}

TEST_CASE("band membership") {
    const auto iv = Domain::interval(0.0, 1.0);
    CHECK_FALSE(band_membership(iv, 0.1, {0.5, 0.0}).has_value());
    const auto b = band_membership(iv, 0.1, {0.05, 0.0});
    REQUIRE(b.has_value());
    CHECK(b->xbar.x == 0.0);
    CHECK(b->eta.x == -1.0);
    CHECK(b->depth == doctest::Approx(0.5).epsilon(1e-14));

    const auto disk = Domain::disk({0.0, 0.0}, 1.0);
    const auto c = band_membership(disk, 0.05, {0.97, 0.0});
    REQUIRE(c.has_value());
    CHECK(c->xbar.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c->eta.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c->depth == doctest::Approx(0.6).epsilon(1e-12));

    auto grid = build_grid(disk, 0.01);
    index_band(grid, 0.05);
    std::size_t members = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.band[i]) continue;
        ++members;
        const auto& info = *grid.band[i];
        const double dist = -disk.signed_distance(grid.nodes[i]);
        CHECK(dist < 0.05);
        CHECK(info.depth > 0.0);
        CHECK(info.depth < 1.0);
        CHECK(std::abs(dot(info.eta, info.xbar - grid.nodes[i]) - dist) < 1e-12);
    }
    CHECK(members > 0);
}

TEST_CASE("interval collar") {
    const auto iv = Domain::interval(0.0, 1.0);
    const auto collar = build_collar(iv, 0.1, 0.025, nullptr);
    REQUIRE(collar.size() == 8);
    const double expect[] = {-0.0875, -0.0625, -0.0375, -0.0125, 1.0125, 1.0375, 1.0625, 1.0875};
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(collar.nodes[k].x == doctest::Approx(expect[k]).epsilon(1e-12));
    }
    for (double v : collar.flux_values(0.3)) CHECK(v == 0.0);
    CHECK_THROWS_AS(build_collar(iv, 0.1, 0.1, nullptr), ContractError);

    const auto poly = build_collar(iv, 0.1, 0.025, [](const Point& xbar, double) {
        return xbar.x > 0.5 ? 2.0 : 0.0;
    });
    for (std::size_t k = 0; k < poly.size(); ++k) {
        CHECK(poly.flux_value(k, 0.0) == (poly.nodes[k].x > 1.0 ? 2.0 : 0.0));
    }
}

TEST_CASE("collar lies outside the domain and is disjoint from the band") {
    const auto disk = Domain::disk({0.0, 0.0}, 1.0);
    const double eps = 0.1, h = 0.01;
    auto grid = build_grid(disk, h);
    index_band(grid, eps);
    const auto collar = build_collar(disk, eps, h, nullptr);
    CHECK(collar.size() > 0);
    for (const auto& y : collar.nodes) {
        const double sd = disk.signed_distance(y);
        CHECK(sd > 0.0);
        CHECK(sd < eps);
    }
    // Same lattice, so a collar cell never coincides with a grid cell.
    std::set<std::pair<int, int>> inside;
    for (const auto& c : grid.cells) inside.insert({c.ix, c.iy});
    std::size_t shared = 0;
    for (const auto& c : collar.cells) shared += inside.count({c.ix, c.iy});
    CHECK(shared == 0);
}

TEST_CASE("domain parsing") {
    CHECK(Domain::parse("interval:0,1").to_string() == "interval:0,1");
    const auto d = Domain::parse("disk: 0.5, -1, 2");
    CHECK_FALSE(d.is_interval());
    CHECK(d.measure() == doctest::Approx(4.0 * pi));
    CHECK(d.max_curvature() == 0.5);
    CHECK_THROWS_AS(Domain::parse("square:0,1"), ValidationError);
    CHECK_THROWS_AS(Domain::parse("interval:0"), ValidationError);
    CHECK_THROWS_AS(Domain::parse("interval:1,0"), ValidationError);
    CHECK_THROWS_AS(Domain::parse("disk:0,0,x"), ValidationError);
}
