#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace treeph {

enum class Sex { Male, Female };

char sex_code(Sex s);

struct ManifestRow {
  std::string subject_id;
  std::string tree_path;
  double age = 0.0;
  Sex sex = Sex::Female;
};

/// CSV with header `subject_id,tree_path,age,sex`. Subject ids are unique and
/// ages positive.
struct CohortManifest {
  std::vector<ManifestRow> rows;

  /// tree_path resolved against `base` when relative.
  std::filesystem::path resolve(const ManifestRow& row, const std::filesystem::path& base) const;
};

CohortManifest parse_manifest(std::istream& in);
CohortManifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const CohortManifest& manifest);

}  // namespace treeph
