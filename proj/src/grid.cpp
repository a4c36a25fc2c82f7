#include "ptt/grid.hpp"

#include <cstdlib>
#include <string>

#include "ptt/error.hpp"

namespace ptt {

Grid::Grid(int n) : Grid(n, n / 3) {}

Grid::Grid(int n, int dealias_cut) : n_(n), cut_(dealias_cut) {
  if (n < 8 || n % 2 != 0) {
    throw ParameterError("grid size must be even and at least 8, got " + std::to_string(n));
  }
  if (dealias_cut < 1 || dealias_cut > n / 2 - 1) {
    throw ParameterError("dealias cut must lie in [1, n/2-1], got " + std::to_string(dealias_cut));
  }
}

bool Grid::retained(int k1, int k2, int k3) const {
  return std::abs(k1) <= cut_ && std::abs(k2) <= cut_ && std::abs(k3) <= cut_;
}

}  // namespace ptt
