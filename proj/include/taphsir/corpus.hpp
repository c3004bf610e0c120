#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "taphsir/annotations.hpp"
#include "taphsir/csv.hpp"
#include "taphsir/errors.hpp"
#include "taphsir/strutil.hpp"

namespace taphsir {

// Matches "R1:", "REQ-3." and similar id prefixes.
inline constexpr const char* kDefaultIdPattern =
    R"(^([A-Za-z][A-Za-z0-9_.-]*)\s*[:.]\s+)";

struct Requirement {
  std::string id;
  std::size_t ordinal = 0;
  std::string text;
  std::string source_line;  // original input line, id prefix included
  TokenAnnotations annotations;
};

struct Document {
  std::string doc_id;
  std::vector<Requirement> requirements;

  const Requirement& at(std::size_t ordinal) const { return requirements.at(ordinal); }
};

// One input requirement per non-blank line. A leading id token matching
// `id_pattern` becomes the requirement id and is stripped from the text;
// lines without one get auto ids R1..Rn.
inline Document parse_spec(std::string_view raw_text, std::string doc_id,
                           std::optional<std::string> id_pattern = std::nullopt) {
  const std::regex pattern(id_pattern.value_or(kDefaultIdPattern));

  Document doc;
  doc.doc_id = std::move(doc_id);
  std::map<std::string, std::size_t> seen_ids;

  for (const std::string& line : split_lines(raw_text)) {
    std::string trimmed = trim(line);
    if (trimmed.empty()) continue;

    Requirement req;
    req.ordinal = doc.requirements.size();
    req.source_line = trimmed;

    std::smatch m;
    if (std::regex_search(trimmed, m, pattern) && !trim(m.suffix().str()).empty()) {
      req.id = m[1].str();
      req.text = trim(m.suffix().str());
    } else {
      req.id = "R" + std::to_string(req.ordinal + 1);
      req.text = trimmed;
    }

    if (auto [it, inserted] = seen_ids.emplace(req.id, req.ordinal); !inserted)
      throw DuplicateIdError(req.id);
    (void)seen_ids;
    doc.requirements.push_back(std::move(req));
  }

  if (doc.requirements.empty())
    throw EmptySpecificationError("specification contains no requirements");
  return doc;
}

enum class DetectionLabel { Ambiguous, Unambiguous };
enum class ResolutionFlag { Accepted, LowConfidence, None };

inline std::string to_string(DetectionLabel l) {
  return l == DetectionLabel::Ambiguous ? "ambiguous" : "unambiguous";
}
inline std::string to_string(ResolutionFlag f) {
  switch (f) {
    case ResolutionFlag::Accepted: return "accepted";
    case ResolutionFlag::LowConfidence: return "low_confidence";
    case ResolutionFlag::None: return "none";
  }
  return "none";
}

inline DetectionLabel detection_label_from(std::string_view s) {
  if (s == "ambiguous") return DetectionLabel::Ambiguous;
  if (s == "unambiguous") return DetectionLabel::Unambiguous;
  throw IoError("unknown detection label: " + std::string(s));
}
inline ResolutionFlag resolution_flag_from(std::string_view s) {
  if (s == "accepted") return ResolutionFlag::Accepted;
  if (s == "low_confidence") return ResolutionFlag::LowConfidence;
  if (s == "none") return ResolutionFlag::None;
  throw IoError("unknown resolution flag: " + std::string(s));
}

struct ReportRow {
  std::string doc_id;
  std::string req_id;
  std::size_t req_ordinal = 0;  // carried for sorting, not serialized
  std::string pronoun;
  std::size_t pronoun_token_index = 0;
  std::vector<std::string> context_req_ids;
  DetectionLabel detection_label = DetectionLabel::Ambiguous;
  double detection_confidence = 0.0;
  std::string resolved_antecedent;
  double resolution_probability = 0.0;
  ResolutionFlag resolution_flag = ResolutionFlag::None;
};

inline constexpr const char* kReportHeader =
    "doc_id,req_id,pronoun,pronoun_token_index,context_req_ids,detection_label,"
    "detection_confidence,resolved_antecedent,resolution_probability,resolution_flag";

// Rows must already be sorted by (requirement ordinal, pronoun token index).
inline std::string write_report(const std::vector<ReportRow>& rows) {
  std::string out = kReportHeader;
  out += '\n';
  for (const ReportRow& r : rows) {
    out += csv_line({r.doc_id, r.req_id, r.pronoun,
                     std::to_string(r.pronoun_token_index),
                     join(r.context_req_ids, ";"), to_string(r.detection_label),
                     format_probability(r.detection_confidence),
                     r.resolved_antecedent,
                     format_probability(r.resolution_probability),
                     to_string(r.resolution_flag)});
  }
  return out;
}

inline std::vector<ReportRow> read_report(std::string_view csv_text) {
  auto records = csv_parse(csv_text);
  if (records.empty() || csv_line(records[0]) != std::string(kReportHeader) + "\n")
    throw IoError("report is missing the expected header line");

  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 10)
      throw IoError("report row " + std::to_string(i) + " has " +
                    std::to_string(f.size()) + " fields, expected 10");
    ReportRow r;
    r.doc_id = f[0];
    r.req_id = f[1];
    r.pronoun = f[2];
    r.pronoun_token_index = static_cast<std::size_t>(std::stoull(f[3]));
    if (!f[4].empty()) r.context_req_ids = split(f[4], ';');
    r.detection_label = detection_label_from(f[5]);
    r.detection_confidence = std::stod(f[6]);
    r.resolved_antecedent = f[7];
    r.resolution_probability = std::stod(f[8]);
    r.resolution_flag = resolution_flag_from(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace taphsir
