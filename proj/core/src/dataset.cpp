#include "sonig/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sonig/errors.hpp"

namespace sonig {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  const std::string v = strip(field);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InputError(path + ": line " + std::to_string(line) + ": not a number: '" + v + "'");
  }
  return out;
}

}  // namespace

SignalData read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  {
    std::stringstream header(line);
    std::string u_col, y_col;
    std::getline(header, u_col, ',');
    std::getline(header, y_col, ',');
    if (strip(u_col) != "u" || strip(y_col) != "y") {
      throw InputError(path + ": expected header 'u,y'");
    }
  }

  std::vector<double> u, y;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    std::stringstream row(line);
    std::string u_field, y_field, extra;
    if (!std::getline(row, u_field, ',') || !std::getline(row, y_field, ',')) {
      throw InputError(path + ": line " + std::to_string(line_no) + ": expected two columns");
    }
    if (std::getline(row, extra, ',') && !strip(extra).empty()) {
      throw InputError(path + ": line " + std::to_string(line_no) + ": too many columns");
    }
    u.push_back(parse_double(u_field, path, line_no));
    y.push_back(parse_double(y_field, path, line_no));
  }
  if (u.empty()) throw InputError(path + ": no data rows");

  SignalData out;
  out.u = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size()));
  out.y = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return out;
}

void write_signal_csv(const std::string& path, const SignalData& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write dataset file: " + path);
  out << "u,y\n";
  out.precision(12);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.u(i) << "," << data.y(i) << "\n";
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trace file: " + path);
  out << "t,mean,lower95,upper95,truth\n";
  out.precision(12);
  for (const TraceRow& r : rows) {
    out << r.t << "," << r.mean << "," << r.lower95 << "," << r.upper95 << "," << r.truth
        << "\n";
  }
}

}  // namespace sonig
