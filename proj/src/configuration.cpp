#include "slm/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slm/errors.hpp"

namespace slm {

std::size_t Configuration::CellKeyHash::operator()(const CellKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t c : key) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Configuration::Configuration(Domain domain, Kernel competition, double min_cell_edge)
    : domain_(domain),
      competition_(std::move(competition)),
      dim_(static_cast<std::size_t>(domain.dimension())),
      cell_edge_(min_cell_edge) {
  if (competition_.dimension() != domain_.dimension())
    throw ConfigError("competition", "kernel dimension does not match the domain");
  if (!competition_.is_zero() && cell_edge_ < competition_.range())
    throw ConfigError("competition.range", "cell edge is smaller than the competition range");
  if (domain_.bounded()) {
    if (!(cell_edge_ > 0.0)) cell_edge_ = domain_.side();
    const double ratio = domain_.side() / cell_edge_;
    const double cells = std::round(ratio);
    if (cells > 0x1p62) throw ConfigError("domain.side", "cell grid too fine for the torus side");
    if (cells < 1.0 || std::abs(ratio - cells) > 1e-9 * ratio)
      throw ConfigError("domain.side", "torus side " + std::to_string(domain_.side()) +
                                           " is not an integer multiple of the cell edge " +
                                           std::to_string(cell_edge_));
    cells_per_axis_ = static_cast<std::int64_t>(cells);
    cell_edge_ = domain_.side() / cells;
  } else if (!(cell_edge_ > 0.0)) {
    cell_edge_ = 1.0;
  }
  if (!competition_.is_zero()) fixed_scale_ = std::ldexp(1.0, 80 - std::ilogb(competition_.peak()));
}

Configuration::Fixed Configuration::to_fixed(double w) const { return static_cast<Fixed>(std::nearbyint(w * fixed_scale_)); }

double Configuration::to_double(Fixed v) const { return static_cast<double>(v) / fixed_scale_; }

Configuration::CellKey Configuration::cell_of(std::span<const double> x) const {
  CellKey key(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double f = std::floor(x[i] / cell_edge_);
    if (!(std::abs(f) < 0x1p62)) throw DomainError("coordinate too far from the origin for the cell index");
    auto c = static_cast<std::int64_t>(f);
    if (domain_.bounded()) c = std::clamp<std::int64_t>(c, 0, cells_per_axis_ - 1);
    key[i] = c;
  }
  return key;
}

void Configuration::for_each_nearby(const CellKey& center, int rings,
                                    const std::function<void(std::uint32_t)>& fn) const {
  // Per-axis candidate cell coordinates; on a small torus the ring wraps onto
  // itself, so the whole axis is visited once instead.
  std::vector<std::vector<std::int64_t>> axes(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (domain_.bounded() && 2 * rings + 1 >= cells_per_axis_) {
      for (std::int64_t c = 0; c < cells_per_axis_; ++c) axes[i].push_back(c);
    } else {
      for (std::int64_t o = -rings; o <= rings; ++o) {
        std::int64_t c = center[i] + o;
        if (domain_.bounded()) c = ((c % cells_per_axis_) + cells_per_axis_) % cells_per_axis_;
        axes[i].push_back(c);
      }
    }
  }
  std::vector<std::size_t> odometer(dim_, 0);
  CellKey key(dim_);
  for (;;) {
    for (std::size_t i = 0; i < dim_; ++i) key[i] = axes[i][odometer[i]];
    if (auto it = buckets_.find(key); it != buckets_.end())
      for (std::uint32_t s : it->second) fn(s);
    std::size_t axis = 0;
    while (axis < dim_ && ++odometer[axis] == axes[axis].size()) odometer[axis++] = 0;
    if (axis == dim_) break;
  }
}

double Configuration::pair_weight(std::uint32_t a, std::uint32_t b) const {
  return competition_.eval_radial(domain_.distance(coords(a), coords(b)));
}

Handle Configuration::insert(std::span<const double> x) {
  if (x.size() != dim_) throw DomainError("point has dimension " + std::to_string(x.size()));
  std::vector<double> p(x.begin(), x.end());
  for (double c : p)
    if (!std::isfinite(c)) throw DomainError("non-finite coordinate");
  domain_.wrap(p);
  CellKey key = cell_of(p);

  if (auto it = buckets_.find(key); it != buckets_.end()) {
    for (std::uint32_t s : it->second) {
      if (std::equal(p.begin(), p.end(), coords(s).begin()))
        throw CoincidenceError("point already present in configuration");
    }
  }

  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
    coords_.resize(coords_.size() + dim_);
  }
  std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(slot * dim_));
  Slot& s = slots_[slot];
  s.alive = true;
  s.competition = 0;
  s.interacting = 0;
  s.cell = key;
  s.live_index = static_cast<std::uint32_t>(live_.size());
  const Handle h{slot, s.generation};
  live_.push_back(h);

  if (!competition_.is_zero()) {
    for_each_nearby(s.cell, 1, [&](std::uint32_t other) {
      const double w = pair_weight(slot, other);
      if (w > 0.0) {
        const Fixed f = to_fixed(w);
        slots_[other].competition += f;
        ++slots_[other].interacting;
        slots_[slot].competition += f;
        ++slots_[slot].interacting;
        total_fixed_ += 2 * f;
        interacting_pairs_ += 1;
      }
    });
    total_competition_ = to_double(total_fixed_);
  }
  buckets_[key].push_back(slot);
  return h;
}

const Configuration::Slot& Configuration::checked(Handle h) const {
  if (h.slot >= slots_.size() || !slots_[h.slot].alive || slots_[h.slot].generation != h.generation)
    throw InvalidHandle("stale or invalid handle (slot " + std::to_string(h.slot) + ")");
  return slots_[h.slot];
}

bool Configuration::valid(Handle h) const {
  return h.slot < slots_.size() && slots_[h.slot].alive && slots_[h.slot].generation == h.generation;
}

void Configuration::remove(Handle h) {
  checked(h);
  const std::uint32_t slot = h.slot;
  Slot& s = slots_[slot];

  auto bucket_it = buckets_.find(s.cell);
  auto& bucket = bucket_it->second;
  bucket.erase(std::find(bucket.begin(), bucket.end(), slot));
  if (bucket.empty()) buckets_.erase(bucket_it);

  if (!competition_.is_zero() && s.interacting > 0) {
    for_each_nearby(s.cell, 1, [&](std::uint32_t other) {
      const double w = pair_weight(slot, other);
      if (w > 0.0) {
        const Fixed f = to_fixed(w);
        Slot& o = slots_[other];
        --o.interacting;
        o.competition -= f;
        total_fixed_ -= 2 * f;
        interacting_pairs_ -= 1;
      }
    });
    total_competition_ = to_double(total_fixed_);
  }

  const std::uint32_t li = s.live_index;
  live_[li] = live_.back();
  slots_[live_[li].slot].live_index = li;
  live_.pop_back();

  s.alive = false;
  s.competition = 0;
  s.interacting = 0;
  ++s.generation;
  free_slots_.push_back(slot);
}

bool Configuration::contains_point(std::span<const double> x) const {
  if (x.size() != dim_) return false;
  std::vector<double> p(x.begin(), x.end());
  domain_.wrap(p);
  auto it = buckets_.find(cell_of(p));
  if (it == buckets_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](std::uint32_t s) { return std::equal(p.begin(), p.end(), coords(s).begin()); });
}

std::span<const double> Configuration::position(Handle h) const {
  checked(h);
  return coords(h.slot);
}

double Configuration::competition_at(Handle h) const { return to_double(checked(h).competition); }

double Configuration::compute_competition_at(Handle h) const {
  const Slot& s = checked(h);
  if (competition_.is_zero()) return 0.0;
  double sum = 0.0;
  for_each_nearby(s.cell, 1, [&](std::uint32_t other) {
    if (other != h.slot) sum += pair_weight(h.slot, other);
  });
  return sum;
}

double Configuration::total_rate(double mortality, double plus_mass) const {
  const auto n = static_cast<double>(size());
  return mortality * n + total_competition_ + plus_mass * n;
}

std::vector<Handle> Configuration::sorted_handles() const {
  std::vector<Handle> out(live_.begin(), live_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Handle> Configuration::neighbors_within(std::span<const double> x, double r) const {
  if (x.size() != dim_) throw DomainError("query point has wrong dimension");
  std::vector<double> p(x.begin(), x.end());
  domain_.wrap(p);
  const int rings = std::max(1, static_cast<int>(std::ceil(r / cell_edge_)));
  std::vector<Handle> out;
  for_each_nearby(cell_of(p), rings, [&](std::uint32_t s) {
    if (domain_.distance(p, coords(s)) <= r) out.push_back(Handle{s, slots_[s].generation});
  });
  return out;
}

DriftReport Configuration::refresh() {
  DriftReport report;
  report.total_cached = total_competition_;
  if (competition_.is_zero()) return report;

  const double scale_floor = competition_.peak();
  Fixed fresh_total = 0;
  std::uint64_t pairs = 0;
  for (const Handle& h : live_) {
    Slot& s = slots_[h.slot];
    Fixed sum = 0;
    std::uint32_t count = 0;
    for_each_nearby(s.cell, 1, [&](std::uint32_t other) {
      if (other == h.slot) return;
      const double w = pair_weight(h.slot, other);
      if (w > 0.0) {
        sum += to_fixed(w);
        ++count;
      }
    });
    const double fresh = to_double(sum);
    const double dev = std::abs(to_double(s.competition) - fresh) / std::max(fresh, scale_floor);
    report.max_point_deviation = std::max(report.max_point_deviation, dev);
    s.competition = sum;
    s.interacting = count;
    fresh_total += sum;
    pairs += count;
  }
  report.total_fresh = to_double(fresh_total);
  report.total_deviation =
      std::abs(total_competition_ - report.total_fresh) / std::max(report.total_fresh, scale_floor);
  total_fixed_ = fresh_total;
  total_competition_ = report.total_fresh;
  interacting_pairs_ = pairs / 2;
  return report;
}

double Configuration::brute_force_competition_at(Handle h) const {
  checked(h);
  std::vector<double> disp(dim_);
  double sum = 0.0;
  for (const Handle& other : live_) {
    if (other.slot == h.slot) continue;
    domain_.displacement(coords(h.slot), coords(other.slot), disp);
    sum += competition_.eval(disp);
  }
  return sum;
}

double Configuration::brute_force_total_competition() const {
  double total = 0.0;
  for (const Handle& h : live_) total += brute_force_competition_at(h);
  return total;
}

bool Configuration::has_coincident_points() const {
  for (std::size_t i = 0; i < live_.size(); ++i)
    for (std::size_t j = i + 1; j < live_.size(); ++j) {
      auto a = coords(live_[i].slot);
      auto b = coords(live_[j].slot);
      if (std::equal(a.begin(), a.end(), b.begin())) return true;
    }
  return false;
}

bool Configuration::index_consistent() const {
  std::size_t stored = 0;
  for (const auto& [key, bucket] : buckets_) {
    for (std::uint32_t s : bucket) {
      if (!slots_[s].alive || cell_of(coords(s)) != key || slots_[s].cell != key) return false;
      ++stored;
    }
  }
  return stored == live_.size();
}

}  // namespace slm
