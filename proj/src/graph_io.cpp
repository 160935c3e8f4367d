#include "consctl/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "consctl/error.hpp"

namespace consctl {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long parse_int(std::string_view tok, int line, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
  }
  return value;
}

double parse_real(std::string_view tok, int line) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(line, "expected decimal weight, got '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

DirectedGraph parse_graph(std::string_view text) {
  long n = -1;
  std::vector<Edge> edges;
  std::vector<int> edge_line;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tok = split_tokens(line);
    if (tok.empty()) continue;

    if (n < 0) {
      if (tok[0] != "n" || tok.size() != 2) fail(line_no, "first data line must be 'n <node-count>'");
      n = parse_int(tok[1], line_no, "node count");
      if (n <= 0) fail(line_no, "node count must be positive");
      continue;
    }
    if (tok.size() < 2 || tok.size() > 3) {
      fail(line_no, "expected '<src> <dst> [weight]'");
    }
    long src = parse_int(tok[0], line_no, "source id");
    long dst = parse_int(tok[1], line_no, "target id");
    double w = tok.size() == 3 ? parse_real(tok[2], line_no) : 1.0;
    if (src < 1 || src > n || dst < 1 || dst > n) {
      fail(line_no, "node id outside 1.." + std::to_string(n));
    }
    if (src == dst) fail(line_no, "self-loop at node " + std::to_string(src));
    if (!(w > 0.0) || !std::isfinite(w)) fail(line_no, "weight must be positive and finite");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (edges[k].src == src - 1 && edges[k].dst == dst - 1) {
        fail(line_no, "duplicate edge " + std::to_string(src) + " -> " +
                          std::to_string(dst) + " (first on line " +
                          std::to_string(edge_line[k]) + ")");
      }
    }
    edges.push_back({static_cast<NodeId>(src - 1), static_cast<NodeId>(dst - 1), w});
    edge_line.push_back(line_no);
  }
  if (n < 0) throw Error(ErrorKind::Parse, "missing 'n <node-count>' line");
  return DirectedGraph(static_cast<int>(n), std::move(edges));
}

DirectedGraph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_graph(const DirectedGraph& g) {
  std::string out = "n " + std::to_string(g.size()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.src + 1) + " " + std::to_string(e.dst + 1) + " " +
           format_number(e.weight) + "\n";
  }
  return out;
}

}  // namespace consctl
