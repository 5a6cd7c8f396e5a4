#include "treeph/cohort.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "treeph/error.hpp"
#include "treeph/tree.hpp"

namespace treeph {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

char sex_code(Sex s) { return s == Sex::Male ? 'M' : 'F'; }

std::filesystem::path CohortManifest::resolve(const ManifestRow& row, const std::filesystem::path& base) const {
  std::filesystem::path p(row.tree_path);
  return p.is_absolute() ? p : base / p;
}

CohortManifest parse_manifest(std::istream& in) {
  CohortManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"subject_id", "tree_path", "age", "sex"})
        throw ParseError(line_no, "expected header 'subject_id,tree_path,age,sex'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields");

    ManifestRow row;
    row.subject_id = fields[0];
    row.tree_path = fields[1];
    if (row.subject_id.empty()) throw ParseError(line_no, "empty subject_id");
    const auto& age = fields[2];
    auto [ptr, ec] = std::from_chars(age.data(), age.data() + age.size(), row.age);
    if (ec != std::errc() || ptr != age.data() + age.size() || !std::isfinite(row.age))
      throw ParseError(line_no, "bad age");
    if (row.age <= 0.0) throw ParseError(line_no, "age must be positive");
    if (fields[3] == "M" || fields[3] == "m")
      row.sex = Sex::Male;
    else if (fields[3] == "F" || fields[3] == "f")
      row.sex = Sex::Female;
    else
      throw ParseError(line_no, "sex must be M or F");
    if (!seen.insert(row.subject_id).second) throw DuplicateError("duplicate subject_id " + row.subject_id);
    manifest.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(line_no, "missing manifest header");
  return manifest;
}

CohortManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  return parse_manifest(in);
}

void write_manifest(std::ostream& out, const CohortManifest& manifest) {
  out << "subject_id,tree_path,age,sex\n";
  for (const auto& r : manifest.rows)
    out << r.subject_id << ',' << r.tree_path << ',' << format_double(r.age) << ',' << sex_code(r.sex) << '\n';
}

}  // namespace treeph
