#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "slm/domain.hpp"
#include "slm/kernels.hpp"

namespace slm {

/// Stable reference to a stored point. A handle goes stale when its point is
/// removed; the slot may be reused later under a new generation.
struct Handle {
  std::uint32_t slot = 0;
  std::uint32_t generation = 0;
  friend auto operator<=>(const Handle&, const Handle&) = default;
};

/// Deviation between cached and freshly recomputed competition sums.
struct DriftReport {
  double total_cached = 0.0;
  double total_fresh = 0.0;
  /// |cached - fresh| / max(fresh, kernel peak), for the total and worst point.
  double total_deviation = 0.0;
  double max_point_deviation = 0.0;
};

/// Finite simple point configuration with a cell-list index.
///
/// Keeps, for every point x, the competition sum E(x) = sum_{y != x} a(x - y)
/// and the configuration total sum_x E(x) up to date under insert/remove.
/// Sums are accumulated in 128-bit fixed point (resolution 2^-80 of the kernel
/// peak), so removing a point exactly undoes its insertion.
/// Pairs interact through the minimum-image displacement on the torus, so
/// every unordered pair contributes at most once per direction even when the
/// competition range exceeds half the side.
class Configuration {
 public:
  /// `min_cell_edge` must be >= the competition range. On the torus the side
  /// must be an integer multiple of it (ConfigError otherwise).
  Configuration(Domain domain, Kernel competition, double min_cell_edge);

  Handle insert(std::span<const double> x);
  void remove(Handle h);

  bool valid(Handle h) const;
  /// True if a point with exactly these (wrapped) coordinates is stored.
  bool contains_point(std::span<const double> x) const;

  std::span<const double> position(Handle h) const;
  /// Cached E(x, gamma \ x).
  double competition_at(Handle h) const;
  /// E(x, gamma \ x) recomputed from the cell index.
  double compute_competition_at(Handle h) const;
  /// Cached sum over all points of competition_at.
  double total_competition() const { return total_competition_; }

  std::size_t size() const { return live_.size(); }
  bool empty() const { return live_.empty(); }

  /// m |gamma| + E(gamma) + plus_mass |gamma|: the rate of leaving gamma.
  double total_rate(double mortality, double plus_mass) const;

  /// Live handles in an order that depends only on the insert/remove history.
  std::span<const Handle> handles() const { return live_; }
  /// Live handles ordered by slot.
  std::vector<Handle> sorted_handles() const;

  /// All stored points within distance r of x (closed ball).
  std::vector<Handle> neighbors_within(std::span<const double> x, double r) const;

  /// Recomputes every cached sum from the index and replaces the caches.
  DriftReport refresh();

  /// O(n^2) reference values that bypass the cell index.
  double brute_force_competition_at(Handle h) const;
  double brute_force_total_competition() const;

  bool has_coincident_points() const;
  /// Every point is stored in the bucket its coordinates map to.
  bool index_consistent() const;

  const Domain& domain() const { return domain_; }
  const Kernel& competition() const { return competition_; }
  double cell_edge() const { return cell_edge_; }

 private:
  using CellKey = std::vector<std::int64_t>;
  __extension__ using Fixed = __int128;
  struct CellKeyHash {
    std::size_t operator()(const CellKey& key) const noexcept;
  };
  struct Slot {
    std::uint32_t generation = 0;
    bool alive = false;
    std::uint32_t live_index = 0;
    std::uint32_t interacting = 0;  // neighbors with a(x - y) > 0
    Fixed competition = 0;
    CellKey cell;
  };

  const Slot& checked(Handle h) const;
  std::span<const double> coords(std::uint32_t slot) const {
    return {coords_.data() + static_cast<std::size_t>(slot) * dim_, dim_};
  }
  CellKey cell_of(std::span<const double> x) const;
  void for_each_nearby(const CellKey& center, int rings, const std::function<void(std::uint32_t)>& fn) const;
  double pair_weight(std::uint32_t a, std::uint32_t b) const;
  Fixed to_fixed(double w) const;
  double to_double(Fixed v) const;

  Domain domain_;
  Kernel competition_;
  std::size_t dim_;
  double cell_edge_;
  std::int64_t cells_per_axis_ = 0;  // torus only

  std::vector<double> coords_;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<Handle> live_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> buckets_;

  double fixed_scale_ = 1.0;
  Fixed total_fixed_ = 0;
  double total_competition_ = 0.0;
  std::uint64_t interacting_pairs_ = 0;
};

}  // namespace slm
