#include "graphtest/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"

namespace graphtest {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse_error, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::parse_error, path + ": cannot open for writing");
  return out;
}

struct Cell {
  std::string text;
  int line = 0;  // 1-based
  int column = 0;
};

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Comma-split rows; blank lines are skipped, cells keep their 1-based
// line/column for error messages.
std::vector<std::vector<Cell>> csv_rows(const std::string& text) {
  std::vector<std::vector<Cell>> rows;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (eol == std::string::npos ? text.size() : eol) - pos);
    ++line_no;
    if (!trimmed(line).empty()) {
      std::vector<Cell> row;
      std::size_t start = 0;
      for (;;) {
        std::size_t comma = line.find(',', start);
        std::string_view raw =
            line.substr(start, (comma == std::string_view::npos ? line.size() : comma) - start);
        row.push_back(
            {std::string(trimmed(raw)), line_no, static_cast<int>(start) + 1});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      rows.push_back(std::move(row));
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return rows;
}

bool try_parse_double(std::string_view s, double* out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last && !s.empty();
}

double parse_double(const std::string& path, const Cell& cell) {
  double v = 0.0;
  if (!try_parse_double(cell.text, &v)) {
    fail(errc::parse_error, path + ":" + std::to_string(cell.line) + ":" +
                                std::to_string(cell.column) + ": '" + cell.text +
                                "' is not a number");
  }
  return v;
}

long parse_int(const std::string& path, const Cell& cell) {
  std::string_view s(cell.text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(errc::parse_error, path + ":" + std::to_string(cell.line) + ":" +
                                std::to_string(cell.column) + ": '" + cell.text +
                                "' is not an integer");
  }
  return v;
}

bool row_is_numeric(const std::vector<Cell>& row) {
  double v;
  return std::all_of(row.begin(), row.end(),
                     [&](const Cell& c) { return try_parse_double(c.text, &v); });
}

// Drops a leading header row (any non-numeric cell marks it as one).
std::vector<std::vector<Cell>> numeric_rows(const std::string& path, const std::string& text) {
  auto rows = csv_rows(text);
  if (!rows.empty() && !row_is_numeric(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) fail(errc::parse_error, path + ": no data rows");
  return rows;
}

void write_double(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

VectorDataset read_vector_csv(const std::string& path) {
  auto rows = numeric_rows(path, slurp(path));
  VectorDataset data;
  data.rows = static_cast<int>(rows.size());
  data.cols = static_cast<int>(rows.front().size());
  data.values.reserve(static_cast<std::size_t>(data.rows) * data.cols);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != data.cols) {
      fail(errc::dimension_mismatch,
           path + ": row " + std::to_string(row.front().line) + " has " +
               std::to_string(row.size()) + " columns, expected " + std::to_string(data.cols));
    }
    for (const auto& cell : row) data.values.push_back(parse_double(path, cell));
  }
  return data;
}

void write_vector_csv(const std::string& path, const VectorDataset& data) {
  auto out = open_out(path);
  for (int i = 0; i < data.rows; ++i) {
    for (int j = 0; j < data.cols; ++j) {
      if (j) out << ',';
      write_double(out, data.at(i, j));
    }
    out << '\n';
  }
}

TwoSampleLayout read_labels(const std::string& path) {
  auto rows = numeric_rows(path, slurp(path));
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != 1) {
      fail(errc::parse_error, path + ":" + std::to_string(row.front().line) +
                                  ": labels want one value per line");
    }
    labels.push_back(static_cast<int>(parse_int(path, row.front())));
  }
  return make_layout(std::move(labels));
}

void write_labels(const std::string& path, const TwoSampleLayout& layout) {
  auto out = open_out(path);
  for (int v : layout.labels) out << v << '\n';
}

DistanceMatrix read_distance_csv(const std::string& path) {
  auto rows = numeric_rows(path, slurp(path));
  int n = static_cast<int>(rows.size());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) {
      fail(errc::dimension_mismatch,
           path + ": row " + std::to_string(row.front().line) + " has " +
               std::to_string(row.size()) + " columns, expected a " + std::to_string(n) + "x" +
               std::to_string(n) + " matrix");
    }
    for (const auto& cell : row) values.push_back(parse_double(path, cell));
  }
  return make_distance_matrix(n, std::move(values));
}

void write_distance_csv(const std::string& path, const DistanceMatrix& d) {
  auto out = open_out(path);
  for (int i = 0; i < d.size; ++i) {
    for (int j = 0; j < d.size; ++j) {
      if (j) out << ',';
      write_double(out, d.at(i, j));
    }
    out << '\n';
  }
}

namespace {

void append_network_rows(const std::string& path, const std::vector<std::vector<Cell>>& rows,
                         NetworkDataset* nets) {
  int s = static_cast<int>(rows.size());
  if (nets->size == 0) nets->size = s;
  if (s != nets->size) {
    fail(errc::shape_mismatch, path + ": network has " + std::to_string(s) +
                                   " rows, expected " + std::to_string(nets->size));
  }
  for (int i = 0; i < s; ++i) {
    if (static_cast<int>(rows[i].size()) != s) {
      fail(errc::shape_mismatch, path + ": row " + std::to_string(rows[i].front().line) +
                                     " has " + std::to_string(rows[i].size()) +
                                     " columns, expected " + std::to_string(s));
    }
    for (int j = 0; j < s; ++j) {
      long v = parse_int(path, rows[i][j]);
      if (v != 0 && v != 1) {
        fail(errc::parse_error, path + ":" + std::to_string(rows[i][j].line) +
                                    ": adjacency entries must be 0 or 1, got " +
                                    std::to_string(v));
      }
      if (i == j && v != 0) {
        fail(errc::parse_error,
             path + ":" + std::to_string(rows[i][j].line) + ": diagonal must be zero");
      }
      nets->values.push_back(static_cast<std::uint8_t>(v));
    }
  }
  ++nets->count;
}

NetworkDataset read_networks_json(const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(slurp(path));
  } catch (const std::exception& e) {
    fail(errc::parse_error, path + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    fail(errc::parse_error, path + ": expected a non-empty JSON array of adjacency matrices");
  }
  NetworkDataset nets;
  for (const auto& mat : doc) {
    int s = static_cast<int>(mat.size());
    if (nets.size == 0) nets.size = s;
    if (!mat.is_array() || s != nets.size) {
      fail(errc::shape_mismatch, path + ": every network must be a " +
                                     std::to_string(nets.size) + "x" +
                                     std::to_string(nets.size) + " matrix");
    }
    for (int i = 0; i < s; ++i) {
      const auto& row = mat[i];
      if (!row.is_array() || static_cast<int>(row.size()) != s) {
        fail(errc::shape_mismatch, path + ": network row " + std::to_string(i) +
                                       " is not length " + std::to_string(s));
      }
      for (int j = 0; j < s; ++j) {
        if (!row[j].is_number_integer()) {
          fail(errc::parse_error, path + ": adjacency entries must be integers");
        }
        long v = row[j].get<long>();
        if (v != 0 && v != 1) {
          fail(errc::parse_error,
               path + ": adjacency entries must be 0 or 1, got " + std::to_string(v));
        }
        if (i == j && v != 0) {
          fail(errc::parse_error, path + ": diagonal must be zero");
        }
        nets.values.push_back(static_cast<std::uint8_t>(v));
      }
    }
    ++nets.count;
  }
  return nets;
}

}  // namespace

NetworkDataset read_networks(const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(errc::parse_error, path + ": directory holds no files");
    NetworkDataset nets;
    for (const auto& f : files) append_network_rows(f, numeric_rows(f, slurp(f)), &nets);
    return nets;
  }
  return read_networks_json(path);
}

void write_networks_json(const std::string& path, const NetworkDataset& nets) {
  ordered_json doc = ordered_json::array();
  for (int a = 0; a < nets.count; ++a) {
    ordered_json mat = ordered_json::array();
    for (int i = 0; i < nets.size; ++i) {
      ordered_json row = ordered_json::array();
      for (int j = 0; j < nets.size; ++j) row.push_back(static_cast<int>(nets.at(a, i, j)));
      mat.push_back(std::move(row));
    }
    doc.push_back(std::move(mat));
  }
  open_out(path) << doc.dump(1) << '\n';
}

SimilarityGraph read_edge_list(const std::string& path, int node_count) {
  std::string text = slurp(path);
  std::vector<Edge> edges;
  int max_node = -1;
  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream cells{line};
    long u, v;
    if (!(cells >> u)) continue;  // blank or comment-only line
    std::string extra;
    if (!(cells >> v) || (cells >> extra)) {
      fail(errc::parse_error,
           path + ":" + std::to_string(line_no) + ": want exactly two node indices per line");
    }
    if (u < 0 || v < 0 || u > 1 << 30 || v > 1 << 30) {
      fail(errc::parse_error,
           path + ":" + std::to_string(line_no) + ": node indices out of range");
    }
    edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    max_node = std::max(max_node, static_cast<int>(std::max(u, v)));
  }
  if (node_count < 0) node_count = max_node + 1;
  return validate_graph(node_count, std::move(edges));
}

void write_edge_list(const std::string& path, const SimilarityGraph& graph) {
  open_out(path) << edge_list_text(graph);
}

std::string edge_list_text(const SimilarityGraph& graph) {
  std::ostringstream out;
  for (const auto& e : graph.edges) out << e.u << ' ' << e.v << '\n';
  return out.str();
}

namespace {

ordered_json graph_meta_json(const GraphMeta& graph) {
  ordered_json g;
  g["kind"] = graph.kind;
  if (graph.k) {
    g["k"] = *graph.k;
  } else {
    g["k"] = nullptr;
  }
  g["edges"] = graph.edges;
  return g;
}

ordered_json result_body(const TestResult& r) {
  ordered_json j;
  j["statistic"] = statistic_name(r.kind);
  j["value"] = r.observed;
  j["mean"] = r.null_mean;
  j["sd"] = r.null_sd;
  j["z"] = r.z_score;
  if (r.p_permutation) {
    j["p_perm"] = *r.p_permutation;
  } else {
    j["p_perm"] = nullptr;
  }
  if (r.p_asymptotic) {
    j["p_asym"] = *r.p_asymptotic;
  } else {
    j["p_asym"] = nullptr;
  }
  j["direction"] = r.reject_small ? "lower" : "upper";
  j["config"] = ordered_json{{"seed", r.seed}, {"n_permutations", r.n_permutations}};
  return j;
}

}  // namespace

std::string test_result_json(const TestResult& result, const GraphMeta& graph) {
  ordered_json j = result_body(result);
  j["graph"] = graph_meta_json(graph);
  return j.dump(1);
}

std::string test_results_json(const std::vector<TestResult>& results, const GraphMeta& graph) {
  ordered_json j;
  j["graph"] = graph_meta_json(graph);
  j["results"] = ordered_json::array();
  for (const auto& r : results) j["results"].push_back(result_body(r));
  return j.dump(1);
}

ParsedTestResult test_result_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("test result JSON: ") + e.what());
  }
  try {
    ParsedTestResult parsed;
    TestResult& r = parsed.result;
    r.kind = statistic_from_name(j.at("statistic").get<std::string>());
    r.observed = j.at("value").get<double>();
    r.null_mean = j.at("mean").get<double>();
    r.null_sd = j.at("sd").get<double>();
    r.z_score = j.at("z").get<double>();
    if (!j.at("p_perm").is_null()) r.p_permutation = j["p_perm"].get<double>();
    if (!j.at("p_asym").is_null()) r.p_asymptotic = j["p_asym"].get<double>();
    r.reject_small = j.at("direction").get<std::string>() == "lower";
    r.seed = j.at("config").at("seed").get<std::uint64_t>();
    r.n_permutations = j.at("config").at("n_permutations").get<int>();
    const auto& g = j.at("graph");
    parsed.graph.kind = g.at("kind").get<std::string>();
    if (!g.at("k").is_null()) parsed.graph.k = g["k"].get<int>();
    parsed.graph.edges = g.at("edges").get<int>();
    return parsed;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("test result JSON: ") + e.what());
  }
}

}  // namespace graphtest
