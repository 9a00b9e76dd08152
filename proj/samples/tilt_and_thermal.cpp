// c(theta) of a half-plane facing a plane from the two-reflection formula, and
// the first-reflection free energy against d/lambda_T.

#include <casimir/casimir.hpp>

#include <cstdio>
#include <numbers>

int main() {
  using namespace casimir;
  std::printf("%8s %14s\n", "theta", "c(theta)");
  for (double th = 0.0; th < 1.6; th += 0.25)
    std::printf("%8.3f %14.10f\n", th, c_of_theta(th, Method::two_reflection()).value);
  std::printf("%8s %14.10f\n", "pi/2", c_of_theta(std::numbers::pi / 2, Method::two_reflection()).value);

  const EdgeCoefficient edge = edge_coefficient(Method::two_reflection(), 0.05);
  std::printf("c_edge (two reflections) = %.8f\n", edge.value);

  const HalfPlaneVsPlaneConfig config{1.0, 0.0};
  std::printf("\n%8s %16s %16s %16s\n", "d/l_T", "F_em", "F_dirichlet", "F_neumann");
  for (double x : {0.1, 0.3, 1.0, 3.0}) {
    const thermal::ThermalConfig tc{x, 100000};
    std::printf("%8.2f %16.10f %16.10f %16.10f\n", x, thermal::em_free_energy_closed(config, tc),
                thermal::matsubara_free_energy(config, tc, Polarization::dirichlet).value,
                thermal::matsubara_free_energy(config, tc, Polarization::neumann).value);
  }
}
