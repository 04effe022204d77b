// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "umimc/harness.hpp"

namespace umimc::harness {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += std::string(",") + nl;
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump(it.value(), indent, depth + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const auto& e) { return e.is_structured(); });
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) out += nl + pad;
        dump(e, indent, depth + 1, out);
      }
      if (!flat) out += nl + close;
      out += "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& doc, int indent) {
  std::string out;
  dump(doc, indent, 0, out);
  out += "\n";
  return out;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<TrajectoryRecord> read_trajectories(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trajectory file " + path.string());
  std::string line;
  while (std::getline(f, line) && line.rfind("#", 0) == 0) {
  }
  if (line.rfind("method,rep,step,cost,estimate", 0) != 0) {
    throw std::runtime_error(path.string() + " is not a trajectory file");
  }
  std::size_t wall_column = 0;
  {
    std::istringstream in(line);
    std::string name;
    for (std::size_t i = 0; std::getline(in, name, ','); ++i) {
      if (name == "wall_seconds") wall_column = i;
    }
  }
  std::vector<TrajectoryRecord> out;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5) throw std::runtime_error("malformed trajectory row: " + line);
    TrajectoryRecord r;
    r.method = cells[0];
    r.rep = std::stoi(cells[1]);
    r.step = std::stoull(cells[2]);
    r.cost = std::stod(cells[3]);
    r.estimate = std::stod(cells[4]);
    if (wall_column > 0 && cells.size() > wall_column) r.wall_seconds = std::stod(cells[wall_column]);
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<double> estimate_at(const std::vector<TrajectoryRecord>& records, int rep,
                                  double cost) {
  std::optional<double> last;
  for (const auto& r : records) {
    if (r.rep != rep) continue;
    if (r.cost > cost) break;
    last = r.estimate;
  }
  return last;
}

std::vector<CurvePoint> rmse_curves(const std::vector<TrajectoryRecord>& records, double reference,
                                    int grid_points) {
  if (records.empty()) throw std::invalid_argument("no trajectory records");
  if (grid_points < 1) throw std::invalid_argument("grid needs at least one point");

  // method -> rep -> (cost, estimate) in file order
  std::map<std::string, std::map<int, std::vector<std::pair<double, double>>>> series;
  for (const auto& r : records) series[r.method][r.rep].emplace_back(r.cost, r.estimate);

  double lo = 0.0, hi = 0.0;
  for (const auto& [method, reps] : series) {
    for (const auto& [rep, pts] : reps) {
      lo = std::max(lo, pts.front().first);
      hi = std::max(hi, pts.back().first);
    }
  }
  std::vector<double> grid;
  if (grid_points == 1 || !(hi > lo)) {
    grid.push_back(hi);
  } else {
    const double ratio = std::log(hi / lo) / (grid_points - 1);
    for (int g = 0; g < grid_points; ++g) grid.push_back(g + 1 == grid_points ? hi : lo * std::exp(ratio * g));
  }

  std::vector<CurvePoint> out;
  for (const auto& [method, reps] : series) {
    for (double c : grid) {
      std::vector<double> sq;
      for (const auto& [rep, pts] : reps) {
        std::optional<double> est;
        for (const auto& [cost, value] : pts) {
          if (cost > c) break;
          est = value;
        }
        if (est) sq.push_back((*est - reference) * (*est - reference));
      }
      if (sq.empty()) continue;
      const double n = static_cast<double>(sq.size());
      double mse = 0.0;
      for (double e : sq) mse += e;
      mse /= n;
      double var = 0.0;
      for (double e : sq) var += (e - mse) * (e - mse);
      var = sq.size() > 1 ? var / (n - 1) : 0.0;
      const double rmse = std::sqrt(mse);
      // Delta method on sqrt of the mean squared error.
      const double se = rmse > 0.0 ? std::sqrt(var / n) / (2.0 * rmse) : 0.0;
      out.push_back({method, c, rmse, se});
    }
  }
  return out;
}

ReferenceValue read_reference(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("reference value not found at " + path.string() +
                             "; run `umimc reference` first");
  }
  const auto doc = nlohmann::json::parse(f);
  ReferenceValue r;
  r.value = doc.at("value").get<double>();
  r.std_error = doc.at("stderr").get<double>();
  r.method = doc.at("method").get<std::string>();
  r.samples = doc.at("samples").get<std::uint64_t>();
  return r;
}

}  // namespace umimc::harness
