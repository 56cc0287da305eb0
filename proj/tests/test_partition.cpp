#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kac/partition.hpp"
#include "support/oracles.hpp"

using namespace kac;

namespace {

const VelocityGrid kGrid{10.0, 1025};

double log_chi_square_density(int m, double u) {
  return (0.5 * m - 1.0) * std::log(u) - 0.5 * u - 0.5 * m * std::log(2.0) -
         std::lgamma(0.5 * m);
}

double maxwellian_log_z(int n) {
  // f^{⊗N} is constant on the sphere of radius sqrt(N).
  return -0.5 * n * (std::log(2.0 * 3.14159265358979323846) + 1.0);
}

}  // namespace

TEST_CASE("sphere area log values") {
  CHECK(std::exp(log_sphere_area(2)) == doctest::Approx(2.0 * 3.14159265358979).epsilon(1e-12));
  CHECK(std::exp(log_sphere_area(3)) == doctest::Approx(4.0 * 3.14159265358979).epsilon(1e-12));
  CHECK(std::exp(log_sphere_area(4)) == doctest::Approx(2.0 * 3.14159265358979 * 3.14159265358979).epsilon(1e-12));
  CHECK(std::isfinite(log_sphere_area(2000)));
}

TEST_CASE("maxwellian closed form at the sphere energy") {
  PartitionTable table(maxwellian(1.0, kGrid));
  for (int n : {3, 4, 10, 100, 1000}) {
    table.ensure(n);
    double lz = table.log_partition(n, static_cast<double>(n));
    CHECK(lz == doctest::Approx(maxwellian_log_z(n)).epsilon(1e-7));
  }
}

TEST_CASE("maxwellian convolution powers match chi-square off the bulk center") {
  PartitionTable table(maxwellian(1.0, kGrid));
  for (int m : {3, 10, 100}) {
    table.ensure(m);
    double sigma = std::sqrt(2.0 * m);
    for (double u : {m - sigma, static_cast<double>(m), m + sigma}) {
      double got = table.log_conv_power(m, u);
      CHECK(got == doctest::Approx(log_chi_square_density(m, u)).epsilon(2e-7));
    }
  }
}

TEST_CASE("pair power table matches the analytic chi-square(2)") {
  PartitionTable table(maxwellian(1.0, kGrid));
  table.ensure(2);
  for (double u : {0.3, 1.0, 2.5, 7.0}) {
    CHECK(table.log_conv_power(2, u) ==
          doctest::Approx(log_chi_square_density(2, u)).epsilon(1e-8));
  }
}

TEST_CASE("uniform-energy density has piecewise-exact convolution powers") {
  GridDensity unif = GridDensity::uniform_energy(kGrid);
  PartitionTable table(unif);
  table.ensure(3);
  table.ensure(4);
  // h^{*3}(u) = pi sqrt(u) / (12 sqrt 3) and h^{*4}(u) = pi^2 u / 144 on (0,3].
  const double pi = 3.14159265358979323846;
  for (double u : {0.5, 1.5, 2.5}) {
    CHECK(std::exp(table.log_conv_power(3, u)) ==
          doctest::Approx(pi * std::sqrt(u) / (12.0 * std::sqrt(3.0))).epsilon(2e-7));
    CHECK(std::exp(table.log_conv_power(4, u)) ==
          doctest::Approx(pi * pi * u / 144.0).epsilon(2e-7));
  }
  // Z at radii strictly inside the support plateau is the constant value.
  double c = unif.evaluate(0.0);
  CHECK(table.log_partition(3, 2.5) == doctest::Approx(3.0 * std::log(c)).epsilon(1e-6));
  CHECK(table.log_partition(4, 2.9) == doctest::Approx(4.0 * std::log(c)).epsilon(1e-6));
}

TEST_CASE("direct spherical quadrature oracle validates on closed forms") {
  GridDensity m1 = maxwellian(1.0, kGrid);
  double z3 = oracles::sphere_z3(m1, std::sqrt(3.0));
  CHECK(std::log(z3) == doctest::Approx(maxwellian_log_z(3)).epsilon(1e-9));
  double z4 = oracles::sphere_z4(m1, 2.0);
  CHECK(std::log(z4) == doctest::Approx(maxwellian_log_z(4)).epsilon(1e-8));
}

TEST_CASE("log partition agrees with the sphere-quadrature oracle at N=3,4") {
  GridDensity m1 = maxwellian(1.0, kGrid);
  GridDensity bim = GridDensity::bimodal(1.2, 0.3, kGrid);
  GridDensity unif = GridDensity::uniform_energy(kGrid);
  struct Case {
    const GridDensity* f;
    double u3, u4;
  } cases[] = {{&m1, 3.0, 4.0}, {&bim, 3.0, 4.0}, {&unif, 2.5, 2.9}};
  for (const auto& c : cases) {
    PartitionTable table(*c.f);
    table.ensure(3);
    table.ensure(4);
    double lz3 = table.log_partition(3, c.u3);
    double lz4 = table.log_partition(4, c.u4);
    double oz3 = std::log(oracles::sphere_z3(*c.f, std::sqrt(c.u3)));
    double oz4 = std::log(oracles::sphere_z4(*c.f, std::sqrt(c.u4)));
    CHECK(std::abs(lz3 - oz3) < 1e-6);
    CHECK(std::abs(lz4 - oz4) < 1e-6);
  }
}

TEST_CASE("fft powers cross-check against direct convolution doubling") {
  GridDensity bim = GridDensity::bimodal(1.2, 0.3, kGrid);
  PartitionTable table(bim);
  table.ensure(4);
  table.ensure(16);
  for (int m : {4, 16}) {
    auto direct = oracles::direct_conv_power_doubling(bim, m, 4.0 * m + 8.0, 8192);
    double du = (4.0 * m + 8.0) / 8192;
    for (double u : {m - 1.0, static_cast<double>(m), m + 1.0}) {
      int j = static_cast<int>(u / du);
      double ref = direct[j];
      double got = std::exp(table.log_conv_power(m, j * du));
      CHECK(got == doctest::Approx(ref).epsilon(5e-3));
    }
  }
}

TEST_CASE("conv power mass is preserved") {
  GridDensity bim = GridDensity::bimodal(1.2, 0.3, kGrid);
  PartitionTable table(bim);
  table.ensure(10);
  // ∫ h^{*10} du over the stored window by trapezoid on the table grid.
  double mass = 0.0;
  double du = 40.0 / 20000;
  for (int i = 0; i <= 20000; ++i) {
    double u = i * du;
    double lh = table.log_conv_power(10, u);
    if (lh > -700.0) mass += ((i == 0 || i == 20000) ? 0.5 : 1.0) * std::exp(lh);
  }
  CHECK(mass * du == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("export/import round trip") {
  GridDensity bim = GridDensity::bimodal(1.2, 0.3, kGrid);
  PartitionTable table(bim);
  table.ensure(10);
  table.export_csv("logz_test.csv", {10});
  PartitionTable fresh(bim);
  fresh.import_csv("logz_test.csv");
  double a = table.log_partition(10, 10.0);
  double b = fresh.log_partition(10, 10.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}
