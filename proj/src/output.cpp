#include "slm/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "slm/errors.hpp"

namespace slm {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

void coordinate_header(std::ostream& out, int dimension) {
  for (int i = 0; i < dimension; ++i) out << ",x" << i;
}

void coordinates(std::ostream& out, const std::vector<double>& x, int dimension) {
  for (int i = 0; i < dimension; ++i) {
    out << ',';
    if (static_cast<std::size_t>(i) < x.size()) out << format_double(x[i]);
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int dimension) {
  out << "event_index,time,event_type,count";
  coordinate_header(out, dimension);
  out << '\n';
  for (const auto& e : trajectory.events) {
    out << e.index << ',' << format_double(e.time) << ',' << to_string(e.kind) << ',' << e.count;
    coordinates(out, e.location, dimension);
    out << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot, int dimension) {
  out << "point_id";
  coordinate_header(out, dimension);
  out << '\n';
  for (const auto& p : snapshot.points) {
    out << p.id;
    coordinates(out, p.x, dimension);
    out << '\n';
  }
}

void write_moment_csv(std::ostream& out, const MomentReport& report) {
  out << "time,stat,order_or_beta,value,std_error,replicas\n";
  for (const auto& r : report.rows) {
    out << format_double(r.time) << ',' << r.stat << ',' << format_double(r.order_or_beta) << ','
        << format_double(r.estimate.value) << ',' << format_double(r.estimate.std_error) << ',' << r.replicas << '\n';
  }
}

void write_distribution_csv(std::ostream& out, const std::vector<TimedDistribution>& series) {
  out << "time,n,p_n\n";
  for (const auto& s : series) {
    for (std::size_t n = 0; n < s.dist.p.size(); ++n)
      out << format_double(s.time) << ',' << n << ',' << format_double(s.dist.p[n]) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<LabelledSweep>& sweeps) {
  out << "Nmax,beta,t,value,verdict\n";
  for (const auto& s : sweeps) {
    for (const auto& r : s.result.rows) {
      out << r.n_max << ',' << format_double(s.beta) << ',' << format_double(r.t) << ',' << format_double(r.value)
          << ',' << to_string(s.result.verdict) << '\n';
    }
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f << content;
    if (!f) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace slm
