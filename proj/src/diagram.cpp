#include "treeph/diagram.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "treeph/error.hpp"
#include "treeph/tree.hpp"

namespace treeph {

namespace {

double parse_value(const std::string& s, std::size_t line_no) {
  if (s == "inf" || s == "Inf" || s == "+inf") return kInfinity;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) throw ParseError(line_no, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::size_t PersistenceDiagram::essential_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(dots.begin(), dots.end(), [](const Dot& d) { return d.essential(); }));
}

std::vector<Dot> PersistenceDiagram::sorted_dots() const {
  auto out = dots;
  std::sort(out.begin(), out.end(), [](const Dot& a, const Dot& b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
  });
  return out;
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram) {
  if (diagram.truncated_at) out << "# truncated at " << format_double(*diagram.truncated_at) << '\n';
  out << "dim,birth,death\n";
  for (const auto& d : diagram.dots)
    out << d.dimension << ',' << format_double(d.birth) << ',' << format_double(d.death) << '\n';
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram diagram;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool dim_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string tag = "# truncated at ";
      if (line.rfind(tag, 0) == 0) diagram.truncated_at = parse_value(line.substr(tag.size()), line_no);
      continue;
    }
    if (!header_seen) {
      if (line != "dim,birth,death") throw ParseError(line_no, "expected header 'dim,birth,death'");
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string f_dim, f_birth, f_death, extra;
    if (!std::getline(ss, f_dim, ',') || !std::getline(ss, f_birth, ',') || !std::getline(ss, f_death, ',') ||
        std::getline(ss, extra, ','))
      throw ParseError(line_no, "expected 3 fields");
    Dot d;
    if (f_dim == "0")
      d.dimension = 0;
    else if (f_dim == "1")
      d.dimension = 1;
    else
      throw ParseError(line_no, "dimension must be 0 or 1");
    d.birth = parse_value(f_birth, line_no);
    d.death = parse_value(f_death, line_no);
    if (std::isinf(d.birth)) throw ParseError(line_no, "infinite birth");
    if (!(d.death > d.birth)) throw ParseError(line_no, "death must exceed birth");
    if (dim_seen && d.dimension != diagram.dimension) throw ParseError(line_no, "mixed dimensions");
    diagram.dimension = d.dimension;
    dim_seen = true;
    diagram.dots.push_back(d);
  }
  if (!header_seen) throw ParseError(line_no, "missing diagram header");
  return diagram;
}

}  // namespace treeph
