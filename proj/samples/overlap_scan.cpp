// Energy of two parallel half-planes at d_y = 1 against the horizontal
// displacement, comparing the first reflection with the proximity-force line,
// and the lateral force on the upper plane.

#include <casimir/casimir.hpp>

#include <cstdio>
#include <vector>

int main() {
  using namespace casimir;
  const std::vector<double> xs = {-2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 6.0};
  const CurveTable first = overlap_curve(1.0, xs, Method::reflection(1));
  std::printf("%8s %16s %16s %16s\n", "d_x/d_y", "reflection:1", "pfa", "F_x");
  for (const auto& row : first.rows) {
    const double pfa = row.abscissa > 0 ? pfa_energy(row.abscissa, 1.0).value : 0.0;
    const double force = lateral_force({row.abscissa, 1.0}, Method::reflection(1)).value;
    std::printf("%8.2f %16.10f %16.10f %16.10f\n", row.abscissa, row.energy, pfa, force);
  }

  // One exact point; skip the doubled-cutoff check to keep this quick.
  EngineOptions fast;
  fast.verify = false;
  const EnergyResult exact = overlap_energy(0.0, 1.0, Method::exact(), fast);
  std::printf("exact at d_x = 0: %.10f (first reflection %.10f)\n", exact.value,
              wedge::energy_first_reflection_overlap(0.0, 1.0).value);
}
