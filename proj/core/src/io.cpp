#include "swarmsgd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "swarmsgd/error.hpp"

namespace swarmsgd {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed ") + what + " JSON: " + e.what());
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(key, "missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> from_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  return json{{"n", g.size()}, {"edges", std::move(edges)}}.dump();
}

Graph graph_from_json(std::string_view text) {
  const json j = parse(text, "graph");
  const int n = require<int>(j, "n");
  const auto raw = require<std::vector<std::vector<int>>>(j, "edges");
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    if (e.size() != 2) throw ConfigError("edges", "each edge must be a pair [i, j]");
    if (e[0] >= e[1]) throw ConfigError("edges", "edges must be listed once with i < j");
    edges.emplace_back(e[0], e[1]);
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("edges", "duplicate edge");
  try {
    return Graph::from_edges(n, edges, true);
  } catch (const DisconnectedGraph&) {
    throw ConfigError("edges", "graph is not connected");
  } catch (const InvalidArgument& e) {
    throw ConfigError("edges", e.what());
  }
}

std::string objective_to_json(const ObjectiveSpec& spec) {
  json j;
  j["kind"] = std::string(spec.kind());
  j["dim"] = spec.dim();
  if (const auto* r = std::get_if<RidgeParams>(&spec.params())) {
    j["rho"] = r->rho;
    j["x_tilde"] = from_vector(r->x_tilde);
  } else if (const auto* q = std::get_if<QuadraticParams>(&spec.params())) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < q->Q.rows(); ++i) rows.push_back(from_vector(q->Q.row(i).transpose()));
    j["Q"] = rows;
    j["b"] = from_vector(q->b);
    j["noise_std"] = q->noise_std;
  } else {
    j["noise_std"] = std::get<NonconvexSineParams>(spec.params()).noise_std;
  }
  return j.dump();
}

ObjectiveSpec objective_from_json(std::string_view text) {
  const json j = parse(text, "objective");
  const auto kind = require<std::string>(j, "kind");
  try {
    if (kind == "ridge") return ObjectiveSpec::ridge(require<double>(j, "rho"), to_vector(require<std::vector<double>>(j, "x_tilde")));
    if (kind == "quadratic") {
      const auto rows = require<std::vector<std::vector<double>>>(j, "Q");
      Matrix Q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw ConfigError("Q", "must be square");
        for (std::size_t c = 0; c < rows.size(); ++c) Q(i, c) = rows[i][c];
      }
      return ObjectiveSpec::quadratic(Q, to_vector(require<std::vector<double>>(j, "b")), j.value("noise_std", 1.0));
    }
    if (kind == "nonconvex_sine") return ObjectiveSpec::nonconvex_sine(require<int>(j, "dim"), j.value("noise_std", 1.0));
  } catch (const InvalidArgument& e) {
    throw ConfigError("objective", e.what());
  }
  throw ConfigError("kind", "unknown objective kind '" + kind + "'");
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << format_double(r.t) << ',' << format_double(r.U) << ',' << format_double(r.Vbar) << ','
        << format_double(r.f_gap) << ',' << format_double(r.grad_norm_sq) << '\n';
  }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) throw ConfigError("csv", "unexpected trace header");
  auto field = [](std::string_view s) -> double {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ConfigError("csv", "bad number '" + std::string(s) + "'");
    return v;
  };
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      cols.push_back(rest.substr(0, pos));
    cols.push_back(rest);
    if (cols.size() != 6) throw ConfigError("csv", "expected 6 columns, got " + std::to_string(cols.size()));
    TraceRecord r{};
    const auto res = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), r.k);
    if (res.ec != std::errc()) throw ConfigError("csv", "bad update index");
    r.t = field(cols[1]);
    r.U = field(cols[2]);
    r.Vbar = field(cols[3]);
    r.f_gap = field(cols[4]);
    r.grad_norm_sq = field(cols[5]);
    out.push_back(r);
  }
  return out;
}

std::string summary_to_json(const TraceSummary& s) {
  json j;
  j["T_hit"] = s.T_hit ? json(*s.T_hit) : json(nullptr);
  j["k_hit"] = s.k_hit ? json(*s.k_hit) : json(nullptr);
  j["threshold"] = s.threshold;
  j["final_U"] = number_or_null(s.final.U);
  j["final_Vbar"] = number_or_null(s.final.Vbar);
  j["final_f_gap"] = number_or_null(s.final.f_gap);
  j["final_grad_norm_sq"] = number_or_null(s.final.grad_norm_sq);
  j["final_k"] = s.final.k;
  j["final_t"] = s.final.t;
  j["seed"] = s.seed;
  j["scheme"] = std::string(to_string(s.scheme));
  j["updates"] = s.updates;
  j["samples_consumed"] = s.samples_consumed;
  j["per_thread_updates"] = s.per_thread_updates;
  return j.dump(2);
}

TraceSummary summary_from_json(std::string_view text) {
  const json j = parse(text, "summary");
  TraceSummary s;
  const auto scheme = parse_scheme(require<std::string>(j, "scheme"));
  if (!scheme) throw ConfigError("scheme", "unknown scheme");
  s.scheme = *scheme;
  s.seed = require<std::uint64_t>(j, "seed");
  s.threshold = require<double>(j, "threshold");
  if (!j.at("T_hit").is_null()) s.T_hit = j.at("T_hit").get<double>();
  if (j.contains("k_hit") && !j.at("k_hit").is_null()) s.k_hit = j.at("k_hit").get<std::uint64_t>();
  s.final.U = number_or_nan(j.at("final_U"));
  s.final.Vbar = number_or_nan(j.value("final_Vbar", json(nullptr)));
  s.final.f_gap = number_or_nan(j.value("final_f_gap", json(nullptr)));
  s.final.grad_norm_sq = number_or_nan(j.value("final_grad_norm_sq", json(nullptr)));
  s.final.k = j.value("final_k", std::uint64_t{0});
  s.final.t = j.value("final_t", 0.0);
  s.updates = j.value("updates", std::uint64_t{0});
  s.samples_consumed = j.value("samples_consumed", std::uint64_t{0});
  s.per_thread_updates = j.value("per_thread_updates", std::vector<std::uint64_t>{});
  return s;
}

}  // namespace swarmsgd
