#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptt/diagnostics.hpp"
#include "ptt/particles.hpp"

namespace ptt {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

/// %.17g, which round-trips every double.
std::string format_number(double v);

/// Comment block: the artifact version followed by each config line prefixed with "# ".
void write_provenance(std::ostream& out, std::string_view config_echo);

/// Comma-separated numeric table; the header line is written on construction.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);
  /// Throws DimensionError when the row width differs from the header.
  void row(std::span<const double> values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

/// Streams EnergyRecords as CSV rows.
class CsvRecordSink : public RecordSink {
 public:
  explicit CsvRecordSink(std::ostream& out);
  void on_record(const EnergyRecord& rec) override;

 private:
  CsvWriter writer_;
};

/// Columns t, particle, q1, q2, q3, tr_interp, tr_riccati, det_grad_q.
void write_trajectories(std::ostream& out, std::span<const TrajectoryRow> rows);

}  // namespace ptt
