#include "dynareg/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>

#include "dynareg/linalg.hpp"

namespace dynareg::io {

static_assert(std::endian::native == std::endian::little, "state files assume a little-endian host");

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? fmt::format("{}: {}", source, what)
                                   : fmt::format("{}:{}: {}", source, line, what)),
      line_(line) {}

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

/// Splits the stream into non-empty token lists, dropping comments.
std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ss(text);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

template <typename T>
T parse_number(const std::string& tok, const std::string& source, std::size_t line, const char* what) {
  T value{};
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(source, line, fmt::format("expected {} but found '{}'", what, tok));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(source, line, fmt::format("non-finite {} '{}'", what, tok));
  }
  return value;
}

NodeId parse_id(const std::string& tok, const std::string& source, std::size_t line) {
  const auto id = parse_number<std::uint64_t>(tok, source, line, "a node id");
  if (id == kSentinel || id > std::numeric_limits<NodeId>::max())
    throw ParseError(source, line, fmt::format("node id {} is out of range", tok));
  return static_cast<NodeId>(id);
}

void expect_arity(const Line& l, std::size_t want, const std::string& source, const char* what) {
  if (l.tokens.size() != want)
    throw ParseError(source, l.number, fmt::format("{} takes {} fields, found {}", what, want, l.tokens.size()));
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

// Little-endian primitive writer and reader.

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void u8(std::uint8_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void vec(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void matrix(const DenseMatrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double x : m.data()) f64(x);
  }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename T>
  T get() {
    T v{};
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof(T))) fail("truncated file");
    return v;
  }
  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t count(std::uint64_t limit = std::uint64_t{1} << 32) {
    const std::uint64_t n = u64();
    if (n > limit) fail("implausible element count");
    return static_cast<std::size_t>(n);
  }
  DenseVector vec() {
    DenseVector v(count());
    for (double& x : v) x = f64();
    return v;
  }
  DenseMatrix matrix() {
    const std::size_t rows = count();
    const std::size_t cols = count();
    if (rows != 0 && cols > (std::size_t{1} << 32) / rows) fail("implausible matrix size");
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
  }
  std::string str() {
    std::string s(count(1 << 20), '\0');
    if (!in_.read(s.data(), static_cast<std::streamsize>(s.size()))) fail("truncated file");
    return s;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes after state");
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, 0, what); }

 private:
  std::istream& in_;
  std::string source_;
};

enum class SketchTag : std::uint8_t { kNone = 0, kSrht = 1, kCountSketch = 2 };

}  // namespace

GraphFile parse_graph(std::istream& in, const std::string& source) {
  const std::vector<Line> lines = tokenize(in);
  if (lines.empty()) throw ParseError(source, 0, "missing 'n m_embed' header");
  const Line& head = lines.front();
  expect_arity(head, 2, source, "header");
  GraphFile out;
  const auto n = parse_number<std::uint64_t>(head.tokens[0], source, head.number, "a node count");
  out.m_embed = parse_number<std::size_t>(head.tokens[1], source, head.number, "an embedding width");
  if (n > std::numeric_limits<NodeId>::max()) throw ParseError(source, head.number, "node count is too large");
  if (out.m_embed == 0) throw ParseError(source, head.number, "embedding width must be positive");
  out.graph = DynamicGraph::with_nodes(static_cast<std::size_t>(n));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    expect_arity(l, 2, source, "an edge");
    const NodeId u = parse_id(l.tokens[0], source, l.number);
    const NodeId v = parse_id(l.tokens[1], source, l.number);
    if (u > n || v > n) throw ParseError(source, l.number, fmt::format("edge {} {} names a node above {}", u, v, n));
    if (u == v) throw ParseError(source, l.number, fmt::format("self-loop on node {}", u));
    if (out.graph.has_edge(u, v)) throw ParseError(source, l.number, fmt::format("duplicate edge {} {}", u, v));
    out.graph.add_edge(u, v);
  }
  return out;
}

std::vector<double> parse_values(std::istream& in, const std::string& source) {
  std::vector<double> values;
  for (const Line& l : tokenize(in)) {
    expect_arity(l, 1, source, "a measured value");
    values.push_back(parse_number<double>(l.tokens[0], source, l.number, "a real number"));
  }
  return values;
}

std::vector<UpdateRecord> parse_updates(std::istream& in, const std::string& source) {
  std::vector<UpdateRecord> records;
  for (const Line& l : tokenize(in)) {
    const std::string& op = l.tokens[0];
    if (op == "+e" || op == "-e") {
      expect_arity(l, 3, source, "an edge record");
      const NodeId u = parse_id(l.tokens[1], source, l.number);
      const NodeId v = parse_id(l.tokens[2], source, l.number);
      if (op == "+e")
        records.emplace_back(EdgeInsert{u, v});
      else
        records.emplace_back(EdgeDelete{u, v});
    } else if (op == "+n") {
      if (l.tokens.size() < 3) throw ParseError(source, l.number, "node insertion needs an id and a measured value");
      NodeInsert rec{parse_id(l.tokens[1], source, l.number),
                     parse_number<double>(l.tokens[2], source, l.number, "a real number"),
                     {}};
      for (std::size_t t = 3; t < l.tokens.size(); ++t) rec.neighbors.push_back(parse_id(l.tokens[t], source, l.number));
      records.emplace_back(std::move(rec));
    } else if (op == "-n") {
      expect_arity(l, 2, source, "a node deletion");
      records.emplace_back(NodeDelete{parse_id(l.tokens[1], source, l.number)});
    } else {
      throw ParseError(source, l.number, fmt::format("unknown record type '{}'", op));
    }
  }
  return records;
}

GraphFile read_graph(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_graph(in, path.string());
}

std::vector<double> read_values(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_values(in, path.string());
}

std::vector<UpdateRecord> read_updates(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_updates(in, path.string());
}

std::string format_update(const UpdateRecord& record) {
  if (const auto* r = std::get_if<EdgeInsert>(&record)) return fmt::format("+e {} {}", r->u, r->v);
  if (const auto* r = std::get_if<EdgeDelete>(&record)) return fmt::format("-e {} {}", r->u, r->v);
  if (const auto* r = std::get_if<NodeInsert>(&record)) {
    std::string s = fmt::format("+n {} {:.17g}", r->id, r->value);
    for (NodeId nb : r->neighbors) s += fmt::format(" {}", nb);
    return s;
  }
  return fmt::format("-n {}", std::get<NodeDelete>(record).id);
}

void write_graph(std::ostream& out, const DynamicGraph& g, std::size_t m_embed) {
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (g.node_at(i) != i + 1) throw std::invalid_argument("write_graph: node ids must be 1..n in order");
  out << g.node_count() << ' ' << m_embed << '\n';
  for (NodeId u : g.nodes())
    for (NodeId v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

void write_values(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) out << fmt::format("{:.17g}\n", v);
}

void write_updates(std::ostream& out, const std::vector<UpdateRecord>& records) {
  for (const auto& r : records) out << format_update(r) << '\n';
}

void save_state(std::ostream& out, const RegressionSession& session) {
  Writer w(out);
  const RegressionState& s = session.state();
  const DynamicGraph& g = session.graph();
  out.write(kStateMagic, sizeof kStateMagic);
  w.u32(kStateVersion);

  w.u8(static_cast<std::uint8_t>(s.config.backend));
  w.f64(s.config.eps);
  w.u8(static_cast<std::uint8_t>(s.config.mode));
  w.f64(s.config.srht_constant);
  w.f64(s.config.countsketch_constant);
  w.u64(s.config.seed);
  w.u64(s.config.sketch_rows);
  w.u64(s.config.refresh_interval);
  w.u64(session.width());
  w.u64(session.max_node_edges());

  w.u64(g.node_count());
  for (NodeId id : g.nodes()) w.u32(id);
  w.u64(g.edge_count());
  for (NodeId u : g.nodes())
    for (NodeId v : g.neighbors(u))
      if (u < v) {
        w.u32(u);
        w.u32(v);
      }
  w.vec(session.values());

  if (const auto* srht = std::get_if<SrhtSketch>(&s.sketch)) {
    w.u8(static_cast<std::uint8_t>(SketchTag::kSrht));
    w.u64(srht->n_logical);
    w.u64(srht->n_padded);
    w.u64(srht->r);
    w.u64(srht->seed);
    w.f64(srht->scale);
    for (std::int8_t sg : srht->signs) w.put(sg);
    for (std::uint64_t k : srht->samples) w.u64(k);
  } else if (const auto* cs = std::get_if<CountSketch>(&s.sketch)) {
    w.u8(static_cast<std::uint8_t>(SketchTag::kCountSketch));
    w.u64(cs->q());
    w.u64(cs->n());
    w.u64(cs->seed());
    w.u64(cs->rng_state());
    for (const auto& e : cs->entries()) {
      w.u32(e.row);
      w.put(e.sign);
    }
  } else {
    w.u8(static_cast<std::uint8_t>(SketchTag::kNone));
  }

  w.u64(s.m_width);
  w.u64(s.updates_since_refresh);
  w.u64(s.rebuilds);
  w.u64(s.pinv_refreshes);
  w.matrix(s.sm);
  w.matrix(s.sm_pinv);
  w.vec(s.sb);
  w.vec(s.x_approx);
  w.u64(s.warnings.size());
  for (const auto& msg : s.warnings) w.str(msg);
  if (!out) throw std::runtime_error("failed to write state");
}

RegressionSession load_state(std::istream& in, const std::string& source) {
  Reader r(in, source);
  char magic[sizeof kStateMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kStateMagic))
    r.fail("not a dynareg state file");
  if (const std::uint32_t version = r.u32(); version != kStateVersion)
    r.fail(fmt::format("unsupported state version {}", version));

  RegressionState s;
  const std::uint8_t backend = r.u8();
  if (backend > static_cast<std::uint8_t>(Backend::kExact)) r.fail("unknown backend tag");
  s.config.backend = static_cast<Backend>(backend);
  s.config.eps = r.f64();
  const std::uint8_t mode = r.u8();
  if (mode > static_cast<std::uint8_t>(SizingMode::kPractical)) r.fail("unknown sizing mode");
  s.config.mode = static_cast<SizingMode>(mode);
  s.config.srht_constant = r.f64();
  s.config.countsketch_constant = r.f64();
  s.config.seed = r.u64();
  s.config.sketch_rows = r.u64();
  s.config.refresh_interval = r.u64();
  const std::size_t width = r.count();
  const std::size_t max_node_edges = r.count();

  DynamicGraph g;
  const std::size_t n = r.count();
  try {
    for (std::size_t i = 0; i < n; ++i) g.add_node(r.u32());
    const std::size_t edges = r.count();
    for (std::size_t i = 0; i < edges; ++i) {
      const NodeId u = r.u32();
      const NodeId v = r.u32();
      g.add_edge(u, v);
    }
  } catch (const std::invalid_argument& e) {
    r.fail(std::string("invalid graph: ") + e.what());
  }
  DenseVector values = r.vec();

  switch (static_cast<SketchTag>(r.u8())) {
    case SketchTag::kNone: break;
    case SketchTag::kSrht: {
      SrhtSketch sk;
      sk.n_logical = r.count();
      sk.n_padded = r.count();
      sk.r = r.count();
      sk.seed = r.u64();
      sk.scale = r.f64();
      if (!is_power_of_two(sk.n_padded) || sk.n_padded < sk.n_logical || sk.n_logical != n)
        r.fail("inconsistent SRHT dimensions");
      sk.signs.resize(sk.n_padded);
      for (auto& sg : sk.signs) sg = r.get<std::int8_t>();
      sk.samples.resize(sk.r);
      for (auto& k : sk.samples) {
        k = r.u64();
        if (k >= sk.n_padded) r.fail("SRHT sample index out of range");
      }
      s.sketch = std::move(sk);
      break;
    }
    case SketchTag::kCountSketch: {
      const std::size_t q = r.count();
      const std::size_t cols = r.count();
      if (cols != n) r.fail("CountSketch column count does not match the graph");
      const std::uint64_t seed = r.u64();
      const std::uint64_t state = r.u64();
      std::vector<kernels::SketchEntry> entries(cols);
      for (auto& e : entries) {
        e.row = r.u32();
        e.sign = r.get<std::int8_t>();
        if (e.row >= q || (e.sign != 1 && e.sign != -1)) r.fail("invalid CountSketch entry");
      }
      s.sketch = CountSketch::restore(q, seed, state, std::move(entries));
      break;
    }
    default: r.fail("unknown sketch tag");
  }

  s.m_width = r.count();
  s.updates_since_refresh = r.count(std::numeric_limits<std::uint64_t>::max());
  s.rebuilds = r.count(std::numeric_limits<std::uint64_t>::max());
  s.pinv_refreshes = r.count(std::numeric_limits<std::uint64_t>::max());
  s.sm = r.matrix();
  s.sm_pinv = r.matrix();
  s.sb = r.vec();
  s.x_approx = r.vec();
  s.warnings.resize(r.count(1 << 16));
  for (auto& msg : s.warnings) msg = r.str();
  r.expect_end();

  if (s.sm.cols() != width || s.sm_pinv.rows() != width || s.sm_pinv.cols() != s.sm.rows() ||
      s.sb.size() != s.sm.rows() || s.x_approx.size() != width)
    r.fail("inconsistent matrix dimensions");
  try {
    return RegressionSession::restore(std::move(g), width, std::move(values), std::move(s), max_node_edges);
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

void save_state_file(const std::filesystem::path& path, const RegressionSession& session) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_state(out, session);
}

RegressionSession load_state_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return load_state(in, path.string());
}

}  // namespace dynareg::io
