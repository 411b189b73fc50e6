#pragma once

#include <string>
#include <vector>

#include "sonig/belief.hpp"

namespace sonig {

// One input/output signal pair sampled at a fixed rate. Read from CSV files
// with a `u,y` header; dt is supplied out of band.
struct SignalData {
  Vector u;
  Vector y;
  double dt{0.0};

  Eigen::Index size() const { return u.size(); }
};

SignalData read_signal_csv(const std::string& path);
void write_signal_csv(const std::string& path, const SignalData& data);

// One row of an exported prediction trace with a 95% confidence band.
struct TraceRow {
  double t{0.0};
  double mean{0.0};
  double lower95{0.0};
  double upper95{0.0};
  double truth{0.0};
};

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

}  // namespace sonig
