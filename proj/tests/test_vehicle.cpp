#include <doctest.h>

#include <random>

#include "ocbf/vehicle.hpp"

using namespace ocbf;

TEST_CASE("integrate_step: coasting") {
  VehicleState s;
  s.x = 0.0;
  s.v = 20.0;
  const auto r = integrate_step(s, 0.0, 0.1);
  CHECK(r.state.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.state.v == doctest::Approx(20.0));
  CHECK(!r.velocity_clamped);
  CHECK(r.state.u == 0.0);
}

TEST_CASE("integrate_step: braking, exact zero-order hold") {
  VehicleState s;
  s.x = 10.0;
  s.v = 20.0;
  const auto r = integrate_step(s, -2.0, 0.1);
  // x + v dt + u dt^2 / 2 = 10 + 2 - 0.01
  CHECK(r.state.x == doctest::Approx(11.99).epsilon(1e-12));
  CHECK(r.state.v == doctest::Approx(19.8).epsilon(1e-12));
  CHECK(!r.velocity_clamped);
}

TEST_CASE("integrate_step: velocity floored at zero") {
  VehicleState s;
  s.x = 0.0;
  s.v = 0.1;
  const auto r = integrate_step(s, -2.0, 0.1);
  // stops at t = v/|u| = 0.05 s having travelled v^2 / (2|u|) = 0.0025 m
  CHECK(r.state.v == 0.0);
  CHECK(r.state.x == doctest::Approx(0.0025).epsilon(1e-12));
  CHECK(r.velocity_clamped);
}

TEST_CASE("integrate_step: stopped vehicle stays put under braking") {
  VehicleState s;
  s.x = 5.0;
  s.v = 0.0;
  const auto r = integrate_step(s, -1.0, 0.05);
  CHECK(r.state.x == 5.0);
  CHECK(r.state.v == 0.0);
  CHECK(r.velocity_clamped);
}

TEST_CASE("integrate_step matches the closed form on random states") {
  std::mt19937_64 eng(42);
  auto uni = [&](double a, double b) {
    return a + (eng() >> 11) * 0x1.0p-53 * (b - a);
  };
  for (int i = 0; i < 1000; ++i) {
    VehicleState s;
    s.x = uni(0.0, 400.0);
    s.v = uni(0.0, 35.0);
    const double u = uni(-2.0, 3.0);
    const double dt = uni(0.01, 0.2);
    const auto r = integrate_step(s, u, dt);
    if (s.v + u * dt >= 0.0) {
      CHECK(r.state.x == doctest::Approx(s.x + s.v * dt + 0.5 * u * dt * dt).epsilon(1e-14));
      CHECK(r.state.v == doctest::Approx(s.v + u * dt).epsilon(1e-14));
    } else {
      CHECK(r.state.v == 0.0);
      CHECK(r.state.x >= s.x);
    }
  }
}

TEST_CASE("gap: sign and antisymmetry") {
  VehicleState a, b;
  a.x = 100.0;
  b.x = 60.0;
  CHECK(gap(a, b) == 40.0);
  b.x = 100.0;
  CHECK(gap(a, b) == 0.0);
  a.x = 50.0;
  b.x = 60.0;
  CHECK(gap(a, b) == -10.0);

  std::mt19937_64 eng(7);
  for (int i = 0; i < 100; ++i) {
    a.x = (eng() >> 11) * 0x1.0p-53 * 400.0;
    b.x = (eng() >> 11) * 0x1.0p-53 * 400.0;
    CHECK(gap(a, b) == -gap(b, a));
  }
}
