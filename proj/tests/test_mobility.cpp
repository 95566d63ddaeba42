#include <doctest.h>

#include <cmath>

#include "dm/errors.hpp"
#include "dm/mobility.hpp"

using namespace dm;
using dm::util::Vec2;

namespace {

const util::Rect kBigWorld{-1e6, -1e6, 1e6, 1e6};

mob::UeProfile stationary_profile() {
  mob::UeProfile p;
  p.ue_id = 1;
  p.pattern = mob::PatternKind::Stationary;
  p.speed_mps = 0.0;
  return p;
}

}  // namespace

TEST_CASE("stationary profile never moves") {
  mob::UeProfile p = stationary_profile();
  mob::UeState s;
  s.position = {12.0, -7.0};
  util::Rng rng(1);
  for (double dt : {0.1, 1.0, 60.0}) {
    mob::UeState next = mob::step(s, p, dt, kBigWorld, rng);
    CHECK(next.position.x == s.position.x);
    CHECK(next.position.y == s.position.y);
    CHECK(next.velocity.x == 0.0);
    CHECK(next.velocity.y == 0.0);
  }
}

TEST_CASE("random waypoint moves exactly speed*dt toward the waypoint") {
  mob::UeProfile p;
  p.ue_id = 2;
  p.pattern = mob::PatternKind::RandomWaypoint;
  p.speed_mps = 10.0;
  mob::UeState s;
  s.position = {0.0, 0.0};
  s.waypoint = {100.0, 0.0};
  s.has_waypoint = true;
  util::Rng rng(1);
  mob::UeState next = mob::step(s, p, 1.0, kBigWorld, rng);
  CHECK(next.position.x == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(next.position.y == doctest::Approx(0.0));
  CHECK(next.velocity.x == doctest::Approx(10.0));
}

TEST_CASE("routine dwell jitter stays within the 3-sigma per-axis envelope") {
  mob::UeProfile p;
  p.ue_id = 3;
  p.pattern = mob::PatternKind::Routine;
  p.speed_mps = 1.0;
  p.jitter_sigma_m = 5.0;
  p.anchors = {{{500.0, 500.0}, 1e18}};
  mob::UeState s;
  s.position = {500.0, 500.0};
  util::Rng rng(77);
  // First step arrives at the anchor and starts the dwell.
  s = mob::step(s, p, 1.0, kBigWorld, rng);
  int inside = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    s = mob::step(s, p, 1.0, kBigWorld, rng);
    double dx = std::abs(s.position.x - 500.0);
    double dy = std::abs(s.position.y - 500.0);
    if (dx <= 15.0 && dy <= 15.0) ++inside;
  }
  CHECK(double(inside) / n >= 0.99);
}

TEST_CASE("speed bound holds for random waypoint trajectories") {
  mob::UeProfile p;
  p.ue_id = 4;
  p.pattern = mob::PatternKind::RandomWaypoint;
  p.speed_mps = 17.0;
  util::Rect world{0.0, 0.0, 1000.0, 1000.0};
  mob::UeState s;
  s.position = {500.0, 500.0};
  util::Rng rng(5);
  const double dt = 0.12;
  for (int i = 0; i < 5000; ++i) {
    mob::UeState next = mob::step(s, p, dt, world, rng);
    double moved = util::distance(next.position, s.position);
    CHECK(moved / dt <= p.speed_mps + 1e-9);
    CHECK(world.contains(next.position));
    CHECK(util::norm(next.velocity) <= p.speed_mps + 1e-9);
    s = next;
  }
}

TEST_CASE("trajectories are deterministic by seed") {
  mob::UeProfile p;
  p.ue_id = 5;
  p.pattern = mob::PatternKind::RandomWaypoint;
  p.speed_mps = 8.0;
  util::Rect world{0.0, 0.0, 500.0, 500.0};

  auto trace = [&](std::uint64_t seed) {
    mob::UeState s;
    s.position = {100.0, 100.0};
    util::Rng rng(seed);
    std::vector<Vec2> out;
    for (int i = 0; i < 300; ++i) {
      s = mob::step(s, p, 0.12, world, rng);
      out.push_back(s.position);
    }
    return out;
  };
  auto a = trace(42), b = trace(42), c = trace(43);
  REQUIRE(a.size() == b.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].y != b[i].y) same = false;
    if (a[i].x != c[i].x || a[i].y != c[i].y) differs = true;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("routine cycle is periodic with jitter disabled") {
  mob::UeProfile p;
  p.ue_id = 6;
  p.pattern = mob::PatternKind::Routine;
  p.speed_mps = 10.0;
  p.jitter_sigma_m = 0.0;
  p.anchors = {{{0.0, 0.0}, 5.0}, {{100.0, 0.0}, 5.0}};
  mob::UeState s;
  s.position = {0.0, 0.0};
  util::Rng rng(1);
  // Cycle: dwell 5 + travel 10 + dwell 5 + travel 10 = 30 ticks at dt=1.
  std::vector<Vec2> pos;
  for (int i = 0; i < 100; ++i) {
    s = mob::step(s, p, 1.0, kBigWorld, rng);
    pos.push_back(s.position);
  }
  for (std::size_t k = 2; k + 30 < pos.size(); ++k) {
    CHECK(pos[k].x == pos[k + 30].x);
    CHECK(pos[k].y == pos[k + 30].y);
  }
}

TEST_CASE("position clamps to world bounds") {
  mob::UeProfile p;
  p.ue_id = 7;
  p.pattern = mob::PatternKind::Routine;
  p.speed_mps = 10.0;
  p.jitter_sigma_m = 0.0;
  p.anchors = {{{200.0, 0.0}, 0.0}};
  util::Rect world{0.0, 0.0, 50.0, 50.0};
  mob::UeState s;
  s.position = {0.0, 0.0};
  util::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    s = mob::step(s, p, 1.0, world, rng);
    CHECK(world.contains(s.position));
  }
  CHECK(s.position.x == 50.0);  // pinned at the edge nearest the anchor
}

TEST_CASE("time_context examples") {
  auto [d0, t0] = mob::time_context(0.0, 0);
  CHECK(d0 == 0);
  CHECK(t0 == 0);
  auto [d1, t1] = mob::time_context(86400.0, 0);
  CHECK(d1 == 1);
  CHECK(t1 == 0);
  auto [d2, t2] = mob::time_context(90000.7, 6);
  CHECK(d2 == 0);
  CHECK(t2 == 3600);
}

TEST_CASE("profile invariants are enforced") {
  mob::UeProfile p = stationary_profile();
  p.speed_mps = 41.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.speed_mps = 1.0;  // stationary with nonzero speed
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.pattern = mob::PatternKind::Routine;
  p.anchors.clear();
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
