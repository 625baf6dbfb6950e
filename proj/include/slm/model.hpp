#pragma once

#include "slm/configuration.hpp"
#include "slm/domain.hpp"
#include "slm/kernels.hpp"

namespace slm {

/// One instance of the spatial logistic model: intrinsic mortality,
/// dispersal kernel a+ and pairwise competition kernel a- on a domain.
struct SimParams {
  double mortality = 0.0;
  Kernel dispersal = Kernel::zero(1);
  Kernel competition = Kernel::zero(1);
  Domain domain = Domain::free_space(1);

  /// Throws ConfigError naming the offending field.
  void validate() const;

  double plus_mass() const { return dispersal.mass(); }
  /// max(competition range, dispersal range) over nonzero kernels; 0 if both are zero.
  double cell_edge() const;
  /// An empty configuration indexed for this model.
  Configuration empty_configuration() const;
};

}  // namespace slm
