#pragma once

#include <algorithm>
#include <charconv>
#include <functional>
#include <fstream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gold/common.hpp"

namespace gold {

/// One recorded (round, player) entry. head = -1 encodes the empty pool.
struct TraceRow {
  Round t = 0;
  std::size_t player = 0;
  Vector pivot;
  Vector played;
  double reward = 0.0;
  Round triggered_delay = 0;
  Round head = -1;
  std::size_t pool_size = 0;
  Round empty_rounds = 0;
};

/// Rows sorted by (t, player). With thin = k only rounds t = 1, 1 + k, ...
/// are kept; metrics that need every round refuse thinned traces.
struct RunTrace {
  std::size_t players = 0;
  Round horizon = 0;
  Round thin = 1;
  std::vector<TraceRow> rows;

  bool complete() const noexcept {
    return thin == 1 && rows.size() == players * static_cast<std::size_t>(horizon);
  }

  /// Rows of round t, assuming a complete trace.
  const TraceRow& at(Round t, std::size_t player) const {
    return rows[static_cast<std::size_t>(t - 1) * players + player];
  }
};

inline constexpr std::string_view kTraceHeader =
    "t,player,pivot,played,reward,triggered_delay,head,pool_size,empty_rounds";

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

inline void append_vector(std::string& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out.push_back(';');
    append_double(out, v[i]);
  }
}

template <typename T>
T parse_number(std::string_view field, int lineno) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw validation_error("trace line " + std::to_string(lineno) + ": bad number '" +
                           std::string(field) + "'");
  }
  return value;
}

inline Vector parse_vector(std::string_view field, int lineno) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = field.find(';', start);
    parts.push_back(parse_number<double>(field.substr(start, end - start), lineno));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return Eigen::Map<Vector>(parts.data(), static_cast<Eigen::Index>(parts.size()));
}

}  // namespace detail

/// CSV rendering; floats use the shortest representation that round-trips.
inline std::string format_row(const TraceRow& row) {
  std::string line;
  line += std::to_string(row.t);
  line += ',';
  line += std::to_string(row.player);
  line += ',';
  detail::append_vector(line, row.pivot);
  line += ',';
  detail::append_vector(line, row.played);
  line += ',';
  detail::append_double(line, row.reward);
  line += ',';
  line += std::to_string(row.triggered_delay);
  line += ',';
  line += std::to_string(row.head);
  line += ',';
  line += std::to_string(row.pool_size);
  line += ',';
  line += std::to_string(row.empty_rounds);
  return line;
}

inline void write_trace(std::ostream& out, const RunTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRow& row : trace.rows) out << format_row(row) << '\n';
}

inline void write_trace(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw runtime_error("cannot write trace: " + path);
  write_trace(out, trace);
  if (!out) throw runtime_error("error writing trace: " + path);
}

/// Parses a trace CSV. players/horizon are inferred; thin is inferred from
/// the spacing of the first two recorded rounds.
inline RunTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw validation_error("trace: missing or unexpected header row");
  RunTrace trace;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 9) {
      throw validation_error("trace line " + std::to_string(lineno) + ": expected 9 fields");
    }
    TraceRow row;
    row.t = detail::parse_number<Round>(fields[0], lineno);
    row.player = detail::parse_number<std::size_t>(fields[1], lineno);
    row.pivot = detail::parse_vector(fields[2], lineno);
    row.played = detail::parse_vector(fields[3], lineno);
    row.reward = detail::parse_number<double>(fields[4], lineno);
    row.triggered_delay = detail::parse_number<Round>(fields[5], lineno);
    row.head = detail::parse_number<Round>(fields[6], lineno);
    row.pool_size = detail::parse_number<std::size_t>(fields[7], lineno);
    row.empty_rounds = detail::parse_number<Round>(fields[8], lineno);
    if (!trace.rows.empty()) {
      const TraceRow& prev = trace.rows.back();
      if (row.t < prev.t || (row.t == prev.t && row.player <= prev.player)) {
        throw validation_error("trace line " + std::to_string(lineno) +
                               ": rows must be strictly increasing in (t, player)");
      }
    }
    trace.players = std::max(trace.players, row.player + 1);
    trace.horizon = std::max(trace.horizon, row.t);
    trace.rows.push_back(std::move(row));
  }
  for (const TraceRow& row : trace.rows) {
    if (row.t != trace.rows.front().t) {
      trace.thin = row.t - trace.rows.front().t;
      break;
    }
  }
  return trace;
}

inline RunTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open trace: " + path);
  return read_trace(in);
}

/// Re-derives every player's head sequence from the recorded delays alone
/// (oldest-origin-first pooling) and compares it with the recorded heads.
/// Returns the first mismatching round, or nullopt when the replay agrees.
inline std::optional<Round> replay_heads_mismatch(const RunTrace& trace) {
  if (!trace.complete()) throw validation_error("head replay needs a complete, unthinned trace");
  for (std::size_t p = 0; p < trace.players; ++p) {
    std::vector<std::vector<Round>> arrivals(static_cast<std::size_t>(trace.horizon) + 1);
    std::priority_queue<Round, std::vector<Round>, std::greater<>> pool;
    for (Round t = 1; t <= trace.horizon; ++t) {
      const TraceRow& row = trace.at(t, p);
      const Round arrive = t + row.triggered_delay;
      if (arrive <= trace.horizon) arrivals[static_cast<std::size_t>(arrive)].push_back(t);
      for (Round s : arrivals[static_cast<std::size_t>(t)]) pool.push(s);
      Round head = -1;
      if (!pool.empty()) {
        head = pool.top();
        pool.pop();
      }
      if (head != row.head) return t;
    }
  }
  return std::nullopt;
}

}  // namespace gold
