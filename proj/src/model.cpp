#include "slm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slm/errors.hpp"

namespace slm {

void SimParams::validate() const {
  if (!(mortality >= 0.0) || !std::isfinite(mortality)) throw ConfigError("m", "mortality must be >= 0");
  const int d = domain.dimension();
  if (dispersal.dimension() != d) throw ConfigError("dispersal", "kernel dimension does not match the domain");
  if (competition.dimension() != d) throw ConfigError("competition", "kernel dimension does not match the domain");
  // Offspring displacements are wrapped once; a dispersal range of half the
  // side or more would make the wrapped displacement ambiguous.
  if (domain.bounded() && !dispersal.is_zero() && !(domain.side() > 2.0 * dispersal.range()))
    throw ConfigError("dispersal.range", "torus side must exceed twice the dispersal range");
  // Constructing the index validates the side / cell-edge relation.
  (void)empty_configuration();
}

double SimParams::cell_edge() const {
  double edge = 0.0;
  if (!competition.is_zero()) edge = std::max(edge, competition.range());
  if (!dispersal.is_zero()) edge = std::max(edge, dispersal.range());
  return edge;
}

Configuration SimParams::empty_configuration() const { return Configuration(domain, competition, cell_edge()); }

}  // namespace slm
