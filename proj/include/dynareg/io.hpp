#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynareg/graph.hpp"
#include "dynareg/session.hpp"

namespace dynareg::io {

/// Malformed input; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct GraphFile {
  DynamicGraph graph;  // nodes 1..n in order
  std::size_t m_embed = 0;
};

// Text formats. Blank lines and '#' comments are ignored.
//   graph:   "n m_embed" header, then one "u v" edge per line (ids 1..n)
//   values:  one real per line, in node order
//   updates: "+e u v" | "-e u v" | "+n id b [nbr ...]" | "-n id"
GraphFile parse_graph(std::istream& in, const std::string& source = "graph");
std::vector<double> parse_values(std::istream& in, const std::string& source = "values");
std::vector<UpdateRecord> parse_updates(std::istream& in, const std::string& source = "updates");

GraphFile read_graph(const std::filesystem::path& path);
std::vector<double> read_values(const std::filesystem::path& path);
std::vector<UpdateRecord> read_updates(const std::filesystem::path& path);

std::string format_update(const UpdateRecord& record);
void write_graph(std::ostream& out, const DynamicGraph& g, std::size_t m_embed);
void write_values(std::ostream& out, const std::vector<double>& values);
void write_updates(std::ostream& out, const std::vector<UpdateRecord>& records);

inline constexpr char kStateMagic[8] = {'D', 'Y', 'N', 'A', 'R', 'E', 'G', '1'};
inline constexpr std::uint32_t kStateVersion = 1;

/// Binary session snapshot; see README for the byte layout. The embedding
/// is not stored and is rebuilt from the graph on load.
void save_state(std::ostream& out, const RegressionSession& session);
RegressionSession load_state(std::istream& in, const std::string& source = "state");

void save_state_file(const std::filesystem::path& path, const RegressionSession& session);
RegressionSession load_state_file(const std::filesystem::path& path);

}  // namespace dynareg::io
