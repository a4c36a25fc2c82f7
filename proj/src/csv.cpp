#include "ptt/csv.hpp"

#include <cstdio>
#include <ostream>

#include "ptt/error.hpp"

namespace ptt {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_provenance(std::ostream& out, std::string_view config_echo) {
  out << "# ptt " << kArtifactVersion << '\n';
  std::size_t pos = 0;
  while (pos < config_echo.size()) {
    auto end = config_echo.find('\n', pos);
    if (end == std::string_view::npos) end = config_echo.size();
    if (end > pos) out << "# " << config_echo.substr(pos, end - pos) << '\n';
    pos = end + 1;
  }
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != width_) {
    throw DimensionError("CSV row has " + std::to_string(values.size()) + " values, header has " +
                         std::to_string(width_));
  }
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

CsvRecordSink::CsvRecordSink(std::ostream& out) : writer_(out, EnergyRecord::column_names()) {}

void CsvRecordSink::on_record(const EnergyRecord& rec) { writer_.row(rec.values()); }

void write_trajectories(std::ostream& out, std::span<const TrajectoryRow> rows) {
  CsvWriter w(out, {"t", "particle", "q1", "q2", "q3", "tr_interp", "tr_riccati", "det_grad_q"});
  for (const auto& r : rows) {
    const double v[] = {r.t, static_cast<double>(r.particle_id), r.q[0], r.q[1], r.q[2],
                        r.tr_interp, r.tr_riccati, r.det_grad_q};
    w.row(v);
  }
}

}  // namespace ptt
